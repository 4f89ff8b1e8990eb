"""Monotone partitions by repeated longest-subsequence extraction.

Each round takes the longer of an increasing and a decreasing subsequence
of what remains and records it as one part. Three engines supply the
subsequences:

    greedy   exact patience LIS and LDS each round
    byf      exact, via the run-galloping lis_bounded
    dynamic  two approximate dynamic instances, one over the sequence and
             one over its reverse, updated by deletions between rounds
"""

import logging
import math
from dataclasses import dataclass, field

from core import (
    BadSpec, Direction, MonotonePart, Partition, as_sequence,
)
from dynamic_lis import DynConfig, DynLisInstance
from lis_exact import lds, lis_bounded, lis_patience

log = logging.getLogger("partitioner")

ALGORITHMS = ("greedy", "byf", "dynamic")


@dataclass
class DecomposeStats:
    algo: str
    parts_count: int = 0
    rounds: int = 0
    per_round_sizes: list = field(default_factory=list)
    ops: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def total_ops(self):
        return self.ops.get("total", 0)

    def record(self, size):
        self.rounds += 1
        self.parts_count += 1
        self.per_round_sizes.append(size)

    def to_json(self):
        """JSON-ready stats block for partition_to_json."""
        return {
            "parts": self.parts_count,
            "rounds": self.rounds,
            "ops": dict(self.ops),
            "algo": self.algo,
            "config": dict(self.config),
            "per_round_sizes": list(self.per_round_sizes),
        }


def _exact_rounds(seq, algo, inc_of, dec_of):
    values = as_sequence(seq).values
    remaining = list(range(1, len(values) + 1))
    stats = DecomposeStats(algo, ops={"lis_ops": 0})
    parts = []
    while remaining:
        current = [values[p - 1] for p in remaining]
        inc = inc_of(current)
        dec = dec_of(current)
        stats.ops["lis_ops"] += inc.ops + dec.ops
        if inc.length >= dec.length:
            direction, picked = Direction.INC, inc.indices
        else:
            direction, picked = Direction.DEC, dec.indices
        positions = tuple(remaining[i - 1] for i in picked)
        parts.append(MonotonePart(direction, positions))
        stats.record(len(positions))
        taken = set(positions)
        remaining = [p for p in remaining if p not in taken]
    stats.ops["total"] = stats.ops["lis_ops"]
    return Partition(len(values), tuple(parts)), stats


def decompose_greedy_exact(seq):
    return _exact_rounds(seq, "greedy", lis_patience, lds)


def decompose_byf(seq):
    return _exact_rounds(
        seq, "byf", lis_bounded, lambda vals: lis_bounded([-v for v in vals]))


def decompose_dynamic(seq, config=None):
    """Greedy rounds driven by a forward and a reversed dynamic instance.

    The reversed instance's increasing subsequences are decreasing in the
    original order. Extracted elements leave both instances.
    """
    config = config or DynConfig()
    values = as_sequence(seq).values
    n = len(values)
    fwd = DynLisInstance(config)
    rev = DynLisInstance(config)
    fwd_key = dict(zip(range(1, n + 1), fwd.extend(values)))
    rev_key = dict(zip(range(n, 0, -1), rev.extend(values[::-1])))
    pos_fwd = {k: p for p, k in fwd_key.items()}
    pos_rev = {k: p for p, k in rev_key.items()}

    stats = DecomposeStats("dynamic", ops={"defects": 0}, config=config.to_dict())
    parts = []
    while fwd_key:
        est_fwd = fwd.estimate_lis()
        est_rev = rev.estimate_lis()
        if est_fwd == 0 and est_rev == 0:
            first = min(fwd_key)
            log.warning("zero estimate with %d elements left; taking position %d alone",
                        len(fwd_key), first)
            stats.ops["defects"] += 1
            direction, positions = Direction.INC, (first,)
        elif est_fwd >= est_rev:
            direction = Direction.INC
            positions = tuple(sorted(pos_fwd[k] for k in fwd.extract_solution()))
        else:
            direction = Direction.DEC
            positions = tuple(sorted(pos_rev[k] for k in rev.extract_solution()))
        parts.append(MonotonePart(direction, positions))
        stats.record(len(positions))
        # descending position in each instance's own order
        for p in reversed(positions):
            fwd.delete(fwd_key.pop(p))
        for p in positions:
            rev.delete(rev_key.pop(p))

    fc, rc = fwd.op_counters(), rev.op_counters()
    stats.ops.update({
        "work_fwd": fc.work,
        "work_rev": rc.work,
        "inserts": fc.cumulative["inserts"] + rc.cumulative["inserts"],
        "deletes": fc.cumulative["deletes"] + rc.cumulative["deletes"],
        "rebuilds": fc.cumulative["rebuilds"] + rc.cumulative["rebuilds"],
        "total": fc.work + rc.work,
    })
    return Partition(n, tuple(parts)), stats


def decompose(seq, algo="greedy", config=None):
    if algo == "greedy":
        return decompose_greedy_exact(seq)
    if algo == "byf":
        return decompose_byf(seq)
    if algo == "dynamic":
        return decompose_dynamic(seq, config)
    raise BadSpec(f"unknown algorithm {algo!r}; expected one of {', '.join(ALGORITHMS)}")


def ceil_sqrt(n):
    return math.isqrt(n - 1) + 1 if n > 0 else 0


def partition_count_bound_check(p, c):
    """True iff the partition has at most c * ceil(sqrt(n)) parts."""
    return len(p.parts) <= c * ceil_sqrt(p.n)
