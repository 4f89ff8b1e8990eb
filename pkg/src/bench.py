"""Benchmark matrix: algorithms x generators x sizes x seeds -> CSV rows.

Every row's partition is validated before it is emitted. Rows come out
sorted by (algo, generator, n, seed), so two runs with the same matrix
produce identical CSV apart from the wall_ms column.
"""

import csv
import io
import logging
import math
import time
from dataclasses import dataclass

import numpy as np

from config import BENCH_HEADER
from core import EspartError, validate_partition
from generators import GeneratorSpec, generate, parse_kind
from partitioner import ALGORITHMS, decompose

log = logging.getLogger("bench")


@dataclass(frozen=True)
class BenchRow:
    algo: str
    generator: str
    n: int
    seed: int
    parts_count: int
    ops: int
    wall_ms: float
    valid: bool

    @property
    def parts_over_sqrt_n(self):
        return self.parts_count / math.sqrt(self.n) if self.n else 0.0

    def sort_key(self):
        return (self.algo, self.generator, self.n, self.seed)

    def cells(self):
        return [
            self.algo, self.generator, self.n, self.seed, self.parts_count,
            f"{self.parts_over_sqrt_n:.4f}", self.ops, f"{self.wall_ms:.3f}",
            "true" if self.valid else "false",
        ]


def run_row(algo, gen, n, seed, config=None):
    """Generate, decompose and validate one matrix cell."""
    kind, params, _ = parse_kind(gen)
    spec = GeneratorSpec(kind, n, seed, params)
    label = spec.label()
    t0 = time.perf_counter()
    try:
        seq = generate(spec)
        partition, stats = decompose(seq, algo, config)
        valid = validate_partition(seq, partition).ok
    except EspartError as e:
        log.warning("bench row %s %s n=%d seed=%d failed: %s", algo, label, n, seed, e)
        return BenchRow(algo, label, n, seed, 0, 0, 0.0, False)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return BenchRow(algo, label, n, seed, stats.parts_count, stats.total_ops, wall_ms, valid)


def run_matrix(algos, gens, ns, seeds, config=None):
    for algo in algos:
        if algo not in ALGORITHMS:
            raise EspartError(f"unknown algorithm {algo!r}")
    for gen in gens:
        parse_kind(gen)
    rows = [run_row(a, g, n, s, config) for a in algos for g in gens for n in ns for s in seeds]
    rows.sort(key=BenchRow.sort_key)
    return rows


def format_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_HEADER)
    for row in rows:
        writer.writerow(row.cells())
    return buf.getvalue()


def fit_slope(xs, ys):
    """Least-squares slope of log(y) against log(x); NaN with fewer than two sizes."""
    pairs = [(x, y) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len({x for x, _ in pairs}) < 2:
        return float("nan")
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    return float(np.polyfit(x, y, 1)[0])


def fit_rows(rows, column):
    """Per-algorithm slope of a numeric column against n, over valid rows."""
    out = {}
    for algo in sorted({r.algo for r in rows}):
        mine = [r for r in rows if r.algo == algo and r.valid]
        out[algo] = fit_slope([r.n for r in mine], [getattr(r, column) for r in mine])
    return out
