#!/usr/bin/env python3
"""Standalone tests for the monotone partition toolkit.

Unit and golden checks; the slower sweeps live in test_scaling.py.
"""

import itertools
import json
import math
import os
import shutil
import sys
import tempfile

import numpy as np

# Allow running from the repo root
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from config import (
    C_COVER, C_DYN_CEILING, C_EXTRACT, C_GREEDY, LIS_BOUNDED_C1, LIS_BOUNDED_C2,
)
from core import (
    BadSpec, Direction, DuplicateValue, InputError, InvalidConfig, InvalidKappa,
    MonotonePart, OutOfBounds, Partition, PositionOutOfRange, Sequence, TooLarge,
    UnknownKey, format_sequence, parse_sequence, partition_from_json,
    partition_to_json, quantile_cells, rank_normalize, to_points, validate_partition,
)
from lis_exact import lds, lis_bounded, lis_patience, lis_quadratic_oracle
from grid_packing import (
    Table, best_chain, best_path_score, brute_force_chain, brute_force_path_score,
    build_family, chain_dp, col_segment, conflicting, cover_bound, embed_chain,
    family_from_segments, format_table, hierarchy_spans, is_monotone_path,
    measure_ratio, parse_table, precedes, row_segment, segment_score,
)
import dynamic_lis
from dynamic_lis import DynConfig, DynLisInstance
from partitioner import (
    ceil_sqrt, decompose, decompose_byf, decompose_dynamic, decompose_greedy_exact,
    partition_count_bound_check,
)
from generators import generate, parse_spec
from bench import fit_slope, format_csv, run_matrix
from replay_protocol import ReplayProtocol, replay
from logger import RunLogger
import main as cli

PASSED = 0
FAILED = 0

FIG3 = (7, 2, 4, 1, 9, 6, 3, 5, 8)
FIG2_ROWS = [[2, 1, 3, 0], [0, 1, 0, 2], [2, 5, 1, 1], [3, 0, 0, 1]]


def check(name, condition):
    global PASSED, FAILED
    if condition:
        PASSED += 1
        print(f"  PASS: {name}")
    else:
        FAILED += 1
        print(f"  FAIL: {name}")


def raises(exc, fn, *args, **kwargs):
    try:
        fn(*args, **kwargs)
    except exc:
        return True
    except Exception:
        return False
    return False


def increasing_keys(inst, keys):
    """Keys name a strictly increasing subsequence of the live sequence."""
    pos = [inst.position_of(k) for k in keys]
    vals = [inst.value_of(k) for k in keys]
    return (all(a < b for a, b in zip(pos, pos[1:]))
            and all(a < b for a, b in zip(vals, vals[1:])))


def fig2_family():
    orange = row_segment(3, 0, 3)
    red = col_segment(1, 1, 3)
    blue = row_segment(2, 1, 3)
    green = col_segment(0, 0, 0)
    return family_from_segments(4, [orange, red, blue, green])


def test_core():
    print("\n=== Core Tests ===")

    seq = Sequence((3, 1, 2))
    check("sequence at is 1-based", seq.at(1) == 3 and len(seq) == 3)
    try:
        Sequence((5, 2, 5))
        check("duplicate rejected", False)
    except DuplicateValue as e:
        check("duplicate rejected with positions", (e.first, e.second) == (1, 3))

    check("rank_normalize", rank_normalize((10, -5, 7)).values == (3, 1, 2))
    rng = np.random.default_rng(1)
    stable = iso = True
    for _ in range(30):
        raw = tuple(int(v) for v in rng.choice(10 ** 6, size=int(rng.integers(0, 40)),
                                                 replace=False) - 500000)
        ranked = rank_normalize(raw)
        stable &= rank_normalize(ranked) == ranked
        iso &= all((raw[i] < raw[j]) == (ranked.values[i] < ranked.values[j])
                   for i in range(len(raw)) for j in range(len(raw)))
    check("rank_normalize idempotent", stable)
    check("rank_normalize keeps relative order", iso)
    pts = to_points(rank_normalize((10, -5, 7)))
    check("to_points", pts.points == ((1, 3), (2, 1), (3, 2)))
    check("permutation graph", pts.is_permutation_graph())
    check("non-normalized points are not a permutation graph",
          not to_points((10, 20)).is_permutation_graph())

    cells = quantile_cells(FIG3, 3)
    check("quantile cell of position 1", cells[1] == (2, 0))
    check("quantile cell of position 5", cells[5] == (2, 1))
    check("quantile rows hold at most ceil(n/m)",
          max(list(cells.values()).count((r, c)) for r in range(3) for c in range(3)) <= 3)
    check("quantile_cells rejects m=0", raises(OutOfBounds, quantile_cells, FIG3, 0))

    # Validation
    p = Partition(3, (MonotonePart(Direction.INC, (1, 2, 3)),))
    report = validate_partition((1, 3, 2), p)
    check("not monotone detected", not report.ok)
    check("not monotone message", "part 1 values 3,2 not increasing" in report.lines())

    p = Partition(3, (MonotonePart(Direction.INC, (1, 2)),))
    report = validate_partition((1, 2, 3), p)
    check("uncovered message", str(report) == "position 3 uncovered")

    p = Partition(3, (MonotonePart(Direction.INC, (1, 3)), MonotonePart(Direction.DEC, (3, 2))))
    kinds = {v.kind for v in validate_partition((1, 3, 2), p).violations}
    check("unsorted indices detected", "unsorted_indices" in kinds)

    p = Partition(2, (MonotonePart(Direction.INC, (1, 5)),))
    kinds = {v.kind for v in validate_partition((1, 2), p).violations}
    check("out of range detected", "out_of_range" in kinds)

    p = Partition(2, (MonotonePart(Direction.INC, (1, 2)), MonotonePart(Direction.DEC, (2,))))
    kinds = {v.kind for v in validate_partition((1, 2), p).violations}
    check("duplicate coverage detected", "duplicate" in kinds)

    good = Partition(3, (MonotonePart(Direction.INC, (1, 2)), MonotonePart(Direction.DEC, (3,))))
    check("valid partition ok", validate_partition((1, 3, 2), good).ok)
    check("empty partition of empty sequence", validate_partition((), Partition(0, ())).ok)

    # Formats
    check("parse_sequence", parse_sequence("3\n1\n2\n\n").values == (3, 1, 2))
    check("parse_sequence negative", parse_sequence("-4\n7\n").values == (-4, 7))
    check("parse_sequence junk", raises(InputError, parse_sequence, "3\nx\n"))
    check("parse_sequence duplicate", raises(DuplicateValue, parse_sequence, "1\n1\n"))
    text = partition_to_json(good, {"parts": 2})
    check("partition JSON carries stats", json.loads(text)["stats"] == {"parts": 2})
    check("partition JSON reads back", partition_from_json(text) == good)
    check("malformed partition JSON", raises(InputError, partition_from_json, "{nope"))
    check("bad direction", raises(
        InputError, partition_from_json, '{"n":1,"parts":[{"direction":"up","indices":[1]}]}'))


def test_lis_exact():
    print("\n=== LIS Tests ===")

    w = lis_patience(FIG3)
    check("fig3 LIS length", w.length == 4)
    check("fig3 LIS witness is lexicographically smallest", w.indices == (2, 3, 6, 9))
    check("fig3 LDS length", lds(FIG3).length == 3)
    check("fig3 oracle", lis_quadratic_oracle(FIG3).indices == (2, 3, 6, 9))
    check("fig3 bounded", lis_bounded(FIG3).indices == (2, 3, 6, 9))

    check("empty LIS", lis_patience(()).length == 0 and lis_patience(()).indices == ())
    check("empty bounded", lis_bounded(()).length == 0)
    check("single", lis_patience((42,)).indices == (1,))
    check("sorted", lis_patience(range(1, 11)).length == 10)
    check("reversed LIS 1", lis_bounded(range(10, 0, -1)).length == 1)
    check("reversed LDS", lds(range(10, 0, -1)).length == 10)

    rng = np.random.default_rng(11)
    agree = True
    witnesses = True
    for _ in range(50):
        values = tuple(int(v) for v in rng.permutation(int(rng.integers(0, 60))))
        a, b, c = lis_patience(values), lis_quadratic_oracle(values), lis_bounded(values)
        agree &= a.length == b.length == c.length
        for wit in (a, b, c):
            vals = [values[i - 1] for i in wit.indices]
            witnesses &= len(vals) == wit.length and all(x < y for x, y in zip(vals, vals[1:]))
    check("patience, oracle and bounded agree", agree)
    check("witnesses increasing", witnesses)
    check("ops counted", lis_patience(range(100)).ops > 0)

    # Every increasing subsequence of a short input, smallest index tuple first
    rng = np.random.default_rng(12)
    smallest = True
    same = True
    mirrored = True
    for _ in range(40):
        values = tuple(int(v) for v in rng.permutation(int(rng.integers(1, 10))))
        best = max(
            (c for r in range(len(values), 0, -1)
             for c in itertools.combinations(range(1, len(values) + 1), r)
             if all(values[x - 1] < values[y - 1] for x, y in zip(c, c[1:]))),
            key=lambda c: (len(c), [-x for x in c]))
        a = lis_patience(values)
        smallest &= a.indices == best
        same &= a.indices == lis_quadratic_oracle(values).indices == lis_bounded(values).indices
        mirrored &= lis_patience(values[::-1]).length == lds(values).length
    check("witness is the smallest index tuple", smallest)
    check("all three routines pick the same witness", same)
    check("LIS of reversed input == LDS", mirrored)

    # Increasing block interiors, blocks in decreasing order
    for k in (16, 64):
        seq = generate(f"sawtooth:4096:p={k}")
        r = lis_bounded(seq)
        check(f"sawtooth p={k} bounded ops within c1*n + c2*k^2",
              r.length == k and r.ops <= LIS_BOUNDED_C1 * 4096 + LIS_BOUNDED_C2 * k * k)


def test_grid_packing():
    print("\n=== Grid Packing Tests ===")

    t = Table(FIG2_ROWS)
    score, path = best_path_score(t)
    check("fig2 table score", score == 12)
    check("fig2 path monotone", is_monotone_path(path, 4) and len(path) == 7)
    check("fig2 brute force agrees", brute_force_path_score(t) == 12)

    fam = fig2_family()
    scores = fam.scores(t)
    check("fig2 segment scores", scores == [4, 6, 7, 2])
    check("segment_score agrees", [segment_score(t, s) for s in fam.segments] == scores)
    chain = best_chain(fam, t)
    check("fig2 chain value", chain.value == 9)
    check("fig2 chain is green then blue", chain.chosen == (3, 2))
    check("fig2 chain rederives", chain.rederive() == chain.chosen)
    check("fig2 brute force chain", brute_force_chain(fam, t) == 9)
    embedded = embed_chain(fam, chain.chosen)
    covered = set(embedded)
    check("embedded chain is a path", is_monotone_path(embedded, 4))
    check("embedded path visits chain cells",
          all(cell in covered for sid in chain.chosen for cell in fam.segment(sid).cells()))

    blue, green, red = fam.segment(2), fam.segment(3), fam.segment(1)
    check("blue precedes green", precedes(blue, green))
    check("red and blue conflict", conflicting(red, blue))

    # Fig 1 layout: black's top cell shares a row with orange's first cell
    fig1 = {
        "green": col_segment(0, 0, 1), "red": row_segment(0, 1, 2),
        "black": col_segment(2, 2, 3), "orange": row_segment(3, 3, 4),
        "blue": row_segment(5, 5, 5),
    }
    check("fig1 black and orange conflict", conflicting(fig1["black"], fig1["orange"]))
    free = [("green", "black"), ("green", "orange"), ("green", "blue"),
            ("red", "orange"), ("red", "blue"), ("black", "blue")]
    check("fig1 non-conflicting pairs",
          not any(conflicting(fig1[a], fig1[b]) for a, b in free))

    # precedes is a strict partial order
    segs = build_family(8, 0.5).segments
    rng = np.random.default_rng(5)
    picks = [segs[int(i)] for i in rng.choice(len(segs), size=40, replace=False)]
    check("precedes irreflexive", not any(precedes(s, s) for s in picks))
    check("precedes antisymmetric",
          not any(precedes(a, b) and precedes(b, a) for a in picks for b in picks))
    check("precedes transitive",
          all(precedes(a, c) for a in picks for b in picks for c in picks
              if precedes(a, b) and precedes(b, c)))

    # Random chains embed and never beat the table score
    embeds = bounded = True
    for _ in range(40):
        m = int(rng.integers(2, 7))
        t = Table(rng.integers(0, 10, size=(m, m)))
        lines = []
        for _ in range(int(rng.integers(1, 10))):
            line, a, b = (int(x) for x in rng.integers(0, m, size=3))
            make = row_segment if rng.integers(2) else col_segment
            lines.append(make(line, min(a, b), max(a, b)))
        f = family_from_segments(m, lines)
        chain = best_chain(f, t)
        path = embed_chain(f, chain.chosen)
        on_path = set(path)
        embeds &= is_monotone_path(path, m) and all(
            cell in on_path for sid in chain.chosen for cell in f.segment(sid).cells())
        bounded &= chain.value <= best_path_score(t)[0]
    check("random best chains embed in a monotone path", embeds)
    check("best chain <= table score", bounded)

    check("table text round", parse_table(format_table(t)) == t)
    check("table text top row first", format_table(t).splitlines()[1] == "3 0 0 1")
    check("bad table", raises(InputError, parse_table, "2\n1 2\n"))
    check("negative weight", raises(InputError, Table, [[-1]]))
    check("non-square table", raises(OutOfBounds, Table, [[1, 2]]))
    check("path enumeration cap", raises(TooLarge, brute_force_path_score, Table.zeros(9)))

    check("spans of m=1", hierarchy_spans(1, 2) == [(0, 0)])
    spans = hierarchy_spans(8, 2)
    check("spans include root and cells", (0, 7) in spans and all((x, x) in spans for x in range(8)))
    check("leaf spans stop early", (0, 0) not in hierarchy_spans(8, 2, leaf_span=2))

    check("kappa out of range", raises(InvalidKappa, build_family, 8, 1.0))
    check("side out of range", raises(OutOfBounds, build_family, 0, 0.5))
    fam = build_family(16, 0.5)
    check("every cell covered",
          all(fam.covering(r, c) for r in range(16) for c in range(16)))
    check("max cover within bound", fam.max_cover <= cover_bound(16, 0.5, C_COVER))
    check("max cover matches cover index",
          fam.max_cover == max(len(ids) for ids in fam.cover_index.values()))
    check("family ids rows first", fam.segment(0).orientation.value == "row")

    rng = np.random.default_rng(5)
    paths_ok = chains_ok = True
    for _ in range(30):
        m = int(rng.integers(1, 6))
        tab = Table(rng.integers(0, 6, size=(m, m)))
        paths_ok &= best_path_score(tab)[0] == brute_force_path_score(tab)
        segs = []
        for _ in range(int(rng.integers(1, 13))):
            line, a, b = (int(x) for x in rng.integers(0, m, size=3))
            lo, hi = min(a, b), max(a, b)
            segs.append(row_segment(line, lo, hi) if rng.integers(2) else col_segment(line, lo, hi))
        f = family_from_segments(m, segs)
        res = best_chain(f, tab)
        chains_ok &= res.value == brute_force_chain(f, tab)
        chains_ok &= sum(f.scores(tab)[s] for s in res.chosen) == res.value
    check("path DP matches enumeration", paths_ok)
    check("chain DP matches subset enumeration", chains_ok)

    check("chain of zero scores", chain_dp(fam, [0] * len(fam)).value == 0)
    check("score count mismatch", raises(OutOfBounds, chain_dp, fam, [1]))

    report = measure_ratio(8, 0.5, trials=3, seed=1)
    check("ratio report per adversary", len(report.strategies) == 4)
    check("ratios at least 1", all(r >= 1.0 for s in report.strategies for r in s.ratios))
    check("unknown adversary", raises(BadSpec, measure_ratio, 8, 0.5, ("nope",), 1))


def test_dynamic_lis():
    print("\n=== Dynamic LIS Tests ===")

    check("kappa 0 rejected", raises(InvalidConfig, DynConfig, 0.0))
    check("kappa 1 rejected", raises(InvalidConfig, DynConfig, 1.0))
    check("depth 3 rejected", raises(InvalidConfig, DynConfig, 0.5, 3))
    check("small rebuild factor rejected", raises(InvalidConfig, DynConfig, 0.5, 1, 1.2))

    inst = DynLisInstance()
    check("empty estimate", inst.estimate_lis() == 0)
    check("empty extract", inst.extract_solution() == [])
    fresh = DynLisInstance().op_counters()
    check("fresh counters zero", all(v == 0 for v in fresh.cumulative.values()))

    k5 = inst.insert(1, 5)
    k3 = inst.insert(1, 3)
    k9 = inst.insert(3, 9)
    check("insert by position", inst.live_values() == [3, 5, 9])
    check("keys are stable and sequential", (k5, k3, k9) == (1, 2, 3))
    check("key_at", inst.key_at(1) == k3 and inst.position_of(k9) == 3)
    check("estimate on tiny sorted within exact", 1 <= inst.estimate_lis() <= 3)
    check("duplicate insert", raises(DuplicateValue, inst.insert, 1, 5))
    check("position 0", raises(PositionOutOfRange, inst.insert, 0, 11))
    check("position past end", raises(PositionOutOfRange, inst.insert, 5, 11))
    check("unknown delete", raises(UnknownKey, inst.delete, 999))
    check("unknown substitute", raises(UnknownKey, inst.substitute, 999, 1))
    check("substitute onto other value", raises(DuplicateValue, inst.substitute, k3, 9))
    before = inst.op_counters().cumulative["substitutes"]
    inst.substitute(k3, 3)
    check("self substitute counted", inst.op_counters().cumulative["substitutes"] == before + 1)
    check("self substitute no change", inst.live_values() == [3, 5, 9])
    inst.substitute(k3, 7)
    check("substitute moves value", inst.live_values() == [7, 5, 9])
    inst.delete(k5)
    check("delete", inst.live_values() == [7, 9] and inst.size() == 2)
    check("deleted key unknown", raises(UnknownKey, inst.position_of, k5))

    inst = DynLisInstance.from_values(FIG3)
    est = inst.estimate_lis()
    keys = inst.extract_solution()
    check("fig3 estimate at most exact", 1 <= est <= 4)
    check("fig3 extract length", len(keys) == est)
    check("fig3 extract increasing", increasing_keys(inst, keys))

    # Gap exhaustion forces a relabel
    inst = DynLisInstance()
    inst.extend([0, 10 ** 6])
    for v in range(1, 41):
        inst.insert(2, v)
    check("relabel happened", inst.op_counters().cumulative["relabels"] >= 1)
    check("order survives relabel", inst.live_values() == [0] + list(range(40, 0, -1)) + [10 ** 6])
    keys = inst.extract_solution()
    check("extract after relabel", increasing_keys(inst, keys) and len(keys) == inst.estimate_lis())

    # Counter views
    rng = np.random.default_rng(3)
    values = [int(v) for v in rng.permutation(400)]
    inst = DynLisInstance.from_values(values)
    inst.estimate_lis()
    key = inst.insert(200, 10 ** 6)
    last = inst.op_counters().last_op
    m = inst.side
    cover = len(inst.family.covering(*inst.cell_of_key(key)))
    check("last op is the insert", last["inserts"] == 1 and last["deletes"] == 0)
    check("segments touched is the cover", last["segments_touched"] == cover)
    check("cover within bound", cover <= cover_bound(m, 0.5, C_COVER))
    est = inst.estimate_lis()
    keys = inst.extract_solution()
    check("extract work bounded",
          inst.op_counters().last_op["extract_work"] <= C_EXTRACT * (est + m))
    check("estimate at most exact", est <= lis_patience(inst.live_values()).length)
    before = inst.estimate_lis()
    inst.rebuild()
    check("forced rebuild never lowers", inst.estimate_lis() >= before)

    # Random stream, depth 1 and depth 2
    for depth in (1, 2):
        rng = np.random.default_rng(40 + depth)
        inst = DynLisInstance(DynConfig(0.5, depth))
        used = set()
        sound = True
        for step in range(150):
            r = rng.random()
            n = inst.size()
            if n == 0 or r < 0.55:
                v = int(rng.integers(0, 10 ** 6))
                while v in used:
                    v += 1
                used.add(v)
                inst.insert(int(rng.integers(1, n + 2)), v)
            elif r < 0.8:
                inst.delete(inst.key_at(int(rng.integers(1, n + 1))))
            else:
                v = int(rng.integers(0, 10 ** 6))
                while v in used:
                    v += 1
                used.add(v)
                inst.substitute(inst.key_at(int(rng.integers(1, n + 1))), v)
            if step % 10 == 0:
                est = inst.estimate_lis()
                keys = inst.extract_solution()
                exact = lis_patience(inst.live_values()).length
                sound &= len(keys) == est and est <= exact and increasing_keys(inst, keys)
                sound &= exact == 0 or est >= 1
        check(f"depth {depth} stream sound", sound)

    # Sorted points sit on diagonal single cells, so the chain is exact
    inst = DynLisInstance.from_values(range(1, 2049))
    check("sorted 2048 estimate exact", inst.estimate_lis() == 2048)
    check("sorted 2048 extract all", len(inst.extract_solution()) == 2048)

    # Same-rank substitutes never move a point across a row
    changed = []
    for seed in range(200):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(20, 300))
        inst = DynLisInstance.from_values(int(v) * 10 for v in rng.permutation(n) + 1)
        before = inst.estimate_lis()
        key = inst.key_at(int(rng.integers(1, n + 1)))
        shift = -5 if seed % 2 == 0 else 5
        inst.substitute(key, inst.value_of(key) + shift)
        keys = inst.extract_solution()
        if inst.estimate_lis() != before or not increasing_keys(inst, keys):
            changed.append(seed)
    check("same-rank substitute keeps the estimate over 200 seeds", not changed)

    # Moving a point across many ranks and back restores order isomorphism
    values = [int(v) * 10 for v in np.random.default_rng(6).permutation(500) + 1]
    inst = DynLisInstance.from_values(values)
    before = inst.estimate_lis()
    moved = [inst.key_at(p) for p in (1, 100, 250, 400, 500)]
    for key in moved:
        v = inst.value_of(key)
        inst.substitute(key, 10 ** 7 + v)
    sound = increasing_keys(inst, inst.extract_solution())
    for key in moved:
        inst.substitute(key, inst.value_of(key) - 10 ** 7)
    check("rank-changing substitutes stay sound", sound and inst.live_values() == values)
    check("estimate after round trip is sane",
          1 <= inst.estimate_lis() <= lis_patience(values).length)

    # Identical streams give identical estimates and witnesses
    def run_stream(seed):
        rng = np.random.default_rng(seed)
        inst = DynLisInstance()
        trace = []
        for step in range(200):
            n = inst.size()
            if n == 0 or rng.random() < 0.6:
                inst.insert(int(rng.integers(1, n + 2)), 1000 * step + int(rng.integers(0, 1000)))
            else:
                inst.delete(inst.key_at(int(rng.integers(1, n + 1))))
            if step % 20 == 0:
                trace.append((inst.estimate_lis(), tuple(inst.extract_solution())))
        return trace
    check("dynamic determinism", run_stream(8) == run_stream(8))

    # Forced rebuilds mid-stream never lower the estimate
    rng = np.random.default_rng(21)
    inst = DynLisInstance.from_values(int(v) for v in rng.permutation(300))
    never_lower = True
    for step in range(120):
        n = inst.size()
        if rng.random() < 0.5:
            inst.insert(int(rng.integers(1, n + 2)), 1000 + step)
        else:
            inst.delete(inst.key_at(int(rng.integers(1, n + 1))))
        if step % 15 == 0:
            before = inst.estimate_lis()
            inst.rebuild()
            after = inst.estimate_lis()
            never_lower &= after >= before and increasing_keys(inst, inst.extract_solution())
    check("forced rebuilds mid-stream never lower the estimate", never_lower)

    # Module-level operation forms
    inst = dynamic_lis.new(DynConfig(0.5, 1))
    a = dynamic_lis.insert(inst, 1, 5)
    b = dynamic_lis.insert(inst, 2, 9)
    dynamic_lis.substitute(inst, a, 1)
    check("module forms estimate", dynamic_lis.estimate_lis(inst) == 2)
    check("module forms extract", dynamic_lis.extract_solution(inst) == [a, b])
    dynamic_lis.delete(inst, b)
    check("module forms counters",
          dynamic_lis.op_counters(inst).cumulative["deletes"] == 1 and inst.size() == 1)


def test_partitioner():
    print("\n=== Partitioner Tests ===")

    p, stats = decompose_greedy_exact(FIG3)
    check("fig3 greedy 3 parts", len(p) == 3)
    check("fig3 round sizes", stats.per_round_sizes == [4, 3, 2])
    check("fig3 rounds take the smallest witnesses",
          [part.indices for part in p.parts] == [(2, 3, 6, 9), (4, 7, 8), (1, 5)])
    check("fig3 greedy valid", validate_partition(FIG3, p).ok)
    check("first part increasing", p.parts[0].direction is Direction.INC)

    p, stats = decompose_byf(FIG3)
    check("fig3 byf valid", validate_partition(FIG3, p).ok and len(p) == 3)

    n = 30
    for name, fn in (("greedy", decompose_greedy_exact), ("byf", decompose_byf),
                     ("dynamic", decompose_dynamic)):
        p, _ = fn(range(1, n + 1))
        check(f"{name} sorted valid", validate_partition(range(1, n + 1), p).ok)
        p, _ = fn(())
        check(f"{name} empty -> 0 parts", len(p) == 0 and p.n == 0)
        p, _ = fn((5,))
        check(f"{name} singleton -> 1 part", len(p) == 1)
    p, _ = decompose_greedy_exact(range(1, n + 1))
    check("sorted -> 1 part", len(p) == 1)
    p, _ = decompose_byf(range(n, 0, -1))
    check("reversed -> 1 decreasing part", len(p) == 1 and p.parts[0].direction is Direction.DEC)

    seq = generate("uniform_random:400:seed=9")
    bound = ceil_sqrt(400)
    for algo in ("greedy", "byf"):
        p, stats = decompose(seq, algo)
        check(f"{algo} random valid", validate_partition(seq, p).ok)
        check(f"{algo} random within C_greedy", len(p) <= C_GREEDY * bound)
        check(f"{algo} sizes sum to n", sum(stats.per_round_sizes) == 400)
    p, stats = decompose(seq, "dynamic", DynConfig())
    check("dynamic random valid", validate_partition(seq, p).ok)
    check("dynamic random within C_dyn", partition_count_bound_check(p, C_DYN_CEILING))
    check("dynamic stats", stats.rounds == len(p) and stats.ops["defects"] == 0)
    check("dynamic ops each element once per instance",
          stats.ops["inserts"] == 800 and stats.ops["deletes"] == 800)
    block = stats.to_json()
    check("stats block keys", {"parts", "rounds", "ops", "algo", "config"} <= set(block))

    check("unknown algorithm", raises(BadSpec, decompose, FIG3, "magic"))
    ten = Partition(100, tuple(MonotonePart(Direction.INC, (i,)) for i in range(1, 11)))
    check("10 parts within 1*sqrt(100)", partition_count_bound_check(ten, 1))
    many = Partition(100, tuple(MonotonePart(Direction.INC, (i,)) for i in range(1, 22)))
    check("21 parts exceed 2*sqrt(100)", not partition_count_bound_check(many, 2))


def test_generators():
    print("\n=== Generator Tests ===")

    check("sorted", generate("sorted:5").values == (1, 2, 3, 4, 5))
    check("reversed", generate("reversed:3").values == (3, 2, 1))
    planted = generate("planted_lis:64:k=8")
    check("planted LIS", lis_patience(planted).length == 8)
    check("planted permutation", sorted(planted.values) == list(range(1, 65)))
    saw = generate("sawtooth:12:p=4")
    check("sawtooth", saw.values == (9, 10, 11, 12, 5, 6, 7, 8, 1, 2, 3, 4))
    blocks = generate("block_decreasing:40:b=5:seed=2")
    check("block decreasing LDS", lds(blocks).length >= 8)
    check("block decreasing permutation", sorted(blocks.values) == list(range(1, 41)))
    a = generate("uniform_random:100:seed=7")
    b = generate("uniform_random:100:seed=7")
    check("uniform deterministic", a == b)
    check("uniform permutation", sorted(a.values) == list(range(1, 101)))
    check("seed changes output", a != generate("uniform_random:100:seed=8"))
    check("empty generator", generate("uniform_random:0").values == ())
    check("spec parses", parse_spec("planted_lis:64:k=8:seed=3").params == {"k": 8})
    check("k must divide n", raises(BadSpec, generate, "planted_lis:10:k=3"))
    check("unknown kind", raises(BadSpec, generate, "zigzag:5"))
    check("missing length", raises(BadSpec, generate, "sorted"))
    check("bad length", raises(BadSpec, generate, "sorted:x"))
    check("missing parameter", raises(BadSpec, generate, "sawtooth:5"))


def test_bench():
    print("\n=== Bench Tests ===")

    rows = run_matrix(["greedy"], ["sorted"], [], [0])
    check("empty ns gives header only", format_csv(rows).strip() ==
          "algo,generator,n,seed,parts_count,parts_over_sqrt_n,ops,wall_ms,valid")
    rows = run_matrix(["greedy", "byf", "dynamic"], ["uniform_random"], [4, 9, 16, 25],
                      [0, 1, 2, 3, 4])
    check("matrix cardinality", len(rows) == 60)
    check("all rows valid", all(r.valid for r in rows))
    check("rows sorted", rows == sorted(rows, key=lambda r: r.sort_key()))
    again = run_matrix(["greedy", "byf", "dynamic"], ["uniform_random"], [4, 9, 16, 25],
                       [0, 1, 2, 3, 4])
    strip = lambda rs: [r.cells()[:7] + r.cells()[8:] for r in rs]
    check("deterministic apart from wall_ms", strip(rows) == strip(again))
    bad = run_matrix(["greedy"], ["planted_lis:k=3"], [10], [0])
    check("bad row recorded invalid", len(bad) == 1 and not bad[0].valid)
    check("zero n ratio", run_matrix(["greedy"], ["sorted"], [0], [0])[0].cells()[5] == "0.0000")
    check("slope of a square law", abs(fit_slope([1, 2, 4, 8], [1, 4, 16, 64]) - 2.0) < 1e-9)
    check("slope needs two sizes", math.isnan(fit_slope([4, 4], [1, 2])))


def test_replay_protocol():
    print("\n=== Replay Protocol Tests ===")

    proto = ReplayProtocol()
    check("insert ack", proto.handle_line("I 1 5") == "ACK:I:1")
    check("second insert ack", proto.handle_line("I 2 7") == "ACK:I:2")
    check("query", proto.handle_line("Q") == "RSP:Q:2")
    rsp = proto.handle_line("X")
    check("extract", rsp.startswith("RSP:X:") and json.loads(rsp[6:])["values"] == [5, 7])
    check("duplicate insert error", proto.handle_line("I 1 5").startswith("ERR:I:"))
    check("unknown key error", proto.handle_line("D 9").startswith("ERR:D:"))
    check("bad arity error", proto.handle_line("S 1").startswith("ERR:S:"))
    check("unknown op", proto.handle_line("Z") == "ERR:Z:unknown operation")
    check("blank ignored", proto.handle_line("   ") is None)
    check("comment ignored", proto.handle_line("# note") is None)
    check("substitute ack", proto.handle_line("S 1 9") == "ACK:S:1")
    check("delete ack", proto.handle_line("D 2") == "ACK:D:2")
    rsp = proto.handle_line("C")
    check("counters", rsp.startswith("RSP:C:") and json.loads(rsp[6:])["cumulative"]["inserts"] == 2)
    check("stats count errors", proto.stats()["errors"] == 4)
    out = list(replay(["I 1 3", "", "I 1 1", "Q"]))
    check("replay skips blanks", out == ["ACK:I:1", "ACK:I:2", "RSP:Q:2"])


def test_cli():
    print("\n=== CLI Tests ===")

    tmp_dir = tempfile.mkdtemp(prefix="espart_test_")
    try:
        out = os.path.join(tmp_dir, "p.json")
        code = cli.run(["--no-log", "decompose", "--gen", "sorted:8", "--algo", "greedy",
                        "--out", out])
        with open(out) as f:
            doc = json.load(f)
        check("decompose exit 0", code == 0)
        check("decompose one part", len(doc["parts"]) == 1 and doc["stats"]["parts"] == 1)
        check("decompose compares against the ceiling",
              doc["stats"]["ceiling"] == C_GREEDY and doc["stats"]["within_ceiling"] is True)

        code = cli.run(["--no-log", "decompose", "--input", os.path.join(tmp_dir, "missing.txt")])
        check("missing input exit 1", code == 1)
        try:
            cli.run(["--no-log", "decompose", "--gen", "sorted:8", "--algo", "nope"])
            code = None
        except SystemExit as e:
            code = e.code
        check("bad option exit 1", code == 1)

        seq_path = os.path.join(tmp_dir, "seq.txt")
        with open(seq_path, "w") as f:
            f.write(format_sequence((1, 3, 2)))
        part_path = os.path.join(tmp_dir, "part.json")
        with open(part_path, "w") as f:
            f.write('{"n":3,"parts":[{"direction":"inc","indices":[1,2]}]}')
        check("verify uncovered exit 2",
              cli.run(["--no-log", "verify", "--input", seq_path, "--partition", part_path]) == 2)
        with open(part_path, "w") as f:
            f.write('{"n":3,"parts":[{"direction":"inc","indices":[1,2]},'
                    '{"direction":"dec","indices":[3]}]}')
        check("verify ok exit 0",
              cli.run(["--no-log", "verify", "--input", seq_path, "--partition", part_path]) == 0)
        with open(part_path, "w") as f:
            f.write("{broken")
        check("verify malformed exit 1",
              cli.run(["--no-log", "verify", "--input", seq_path, "--partition", part_path]) == 1)

        csv_path = os.path.join(tmp_dir, "bench.csv")
        code = cli.run(["--no-log", "bench", "--algos", "greedy,byf", "--gens", "sorted",
                        "--ns", "4,16", "--seeds", "0", "--csv", csv_path])
        with open(csv_path) as f:
            lines = f.read().splitlines()
        check("bench exit 0", code == 0)
        check("bench rows", len(lines) == 5)

        ops_path = os.path.join(tmp_dir, "ops.txt")
        with open(ops_path, "w") as f:
            f.write("I 1 4\nI 2 8\n\nQ\nD 1\nQ\n")
        rsp_path = os.path.join(tmp_dir, "rsp.txt")
        code = cli.run(["--no-log", "dynlis", "replay", "--ops", ops_path, "--out", rsp_path])
        with open(rsp_path) as f:
            rsp = f.read().splitlines()
        check("replay exit 0", code == 0)
        check("replay responses", rsp == ["ACK:I:1", "ACK:I:2", "RSP:Q:2", "ACK:D:1", "RSP:Q:1"])

        fam_path = os.path.join(tmp_dir, "family.csv")
        cli.run(["--no-log", "gridlab", "build", "--m", "4", "--out", fam_path])
        with open(fam_path) as f:
            fam_lines = f.read().splitlines()
        check("gridlab build header", fam_lines[0] == "id,orientation,line,lo,hi")
        check("gridlab build max cover", fam_lines[-1].startswith("# max_cover="))

        table_path = os.path.join(tmp_dir, "fig2.txt")
        with open(table_path, "w") as f:
            f.write(format_table(Table(FIG2_ROWS)))
        png_path = os.path.join(tmp_dir, "fig2.png")
        code = cli.run(["--no-log", "gridlab", "render", "--table", table_path, "--out", png_path])
        check("gridlab render writes png", code == 0 and os.path.getsize(png_path) > 0)

        log_dir = os.path.join(tmp_dir, "logs")
        cli.run(["--log-dir", log_dir, "decompose", "--gen", "reversed:5", "--out", out])
        logs = os.listdir(log_dir)
        with open(os.path.join(log_dir, logs[0])) as f:
            entries = [json.loads(line) for line in f]
        events = [e["event"] for e in entries]
        check("run log written", events[:3] == ["log_started", "run_started", "decompose_done"])
        check("decompose_done logs the ceiling check",
              entries[2]["data"]["within_ceiling"] is True and entries[2]["data"]["ceiling"] == 3)
    finally:
        shutil.rmtree(tmp_dir, ignore_errors=True)


def test_logger():
    print("\n=== Logger Tests ===")

    tmp_dir = tempfile.mkdtemp(prefix="espart_log_")
    try:
        logger = RunLogger(tmp_dir)
        logger.log("bench_done", {"rows": 3})
        logger.close()
        with open(logger.file_path) as f:
            entries = [json.loads(line) for line in f]
        check("header first", entries[0]["event"] == "log_started")
        check("entry fields", set(entries[1]) == {"ts", "mono", "event", "run", "data"})
        check("entry data", entries[1]["data"] == {"rows": 3})
        check("run id stamped", entries[1]["run"] == logger.run_id)
    finally:
        shutil.rmtree(tmp_dir, ignore_errors=True)


def main():
    global PASSED, FAILED
    print("espart — Test Suite")
    print("=" * 40)

    test_core()
    test_lis_exact()
    test_grid_packing()
    test_dynamic_lis()
    test_partitioner()
    test_generators()
    test_bench()
    test_replay_protocol()
    test_cli()
    test_logger()

    print("\n" + "=" * 40)
    print(f"Results: {PASSED} passed, {FAILED} failed")
    if FAILED > 0:
        sys.exit(1)
    else:
        print("All tests passed!")


if __name__ == "__main__":
    main()
