"""Grid packing on an m x m table.

Cells are addressed (row, col) with row 0 at the bottom and col 0 at the
left. A segment covers consecutive cells of one row or one column. Segment
A precedes B when every cell of A is strictly higher and strictly to the
right of every cell of B; segments with no precedence either way conflict.

The table score is the best up/right corner-to-corner path. A segment
family approximates it with the best chain of pairwise non-conflicting
segments, scored by the sum of their cells.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache

import numpy as np

from config import BRUTE_FORCE_MAX_SEGMENTS, BRUTE_FORCE_MAX_SIDE
from core import BadSpec, InputError, InvalidKappa, OutOfBounds, TooLarge

log = logging.getLogger("grid_packing")

ADVERSARIES = ("uniform", "single_path", "anti_segment", "sparse_spikes")


# --- Tables ---

class Table:
    """m x m non-negative integer weights, w[row, col], row 0 at the bottom."""

    def __init__(self, w):
        arr = np.array(w, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise OutOfBounds(f"table must be m x m with m >= 1, got shape {arr.shape}")
        if (arr < 0).any():
            raise InputError("table weights must be non-negative")
        arr.setflags(write=False)
        self._w = arr

    @property
    def w(self):
        return self._w

    @property
    def m(self):
        return self._w.shape[0]

    @classmethod
    def zeros(cls, m):
        return cls(np.zeros((m, m), dtype=np.int64))

    def cell(self, row, col):
        return int(self._w[row, col])

    def __eq__(self, other):
        return isinstance(other, Table) and np.array_equal(self._w, other._w)

    def __repr__(self):
        return f"Table(m={self.m})"


def parse_table(text):
    """First line m, then m lines of m integers, top row first."""
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    try:
        m = int(lines[0][0])
        rows = [[int(x) for x in ln] for ln in lines[1:]]
    except (IndexError, ValueError) as e:
        raise InputError(f"malformed table: {e}") from e
    if len(lines[0]) != 1 or m < 1 or len(rows) != m or any(len(r) != m for r in rows):
        raise InputError(f"table needs a side m >= 1 followed by {m} rows of {m} integers")
    return Table(rows[::-1])


def format_table(t):
    out = [str(t.m)]
    for row in t.w[::-1].tolist():
        out.append(" ".join(str(x) for x in row))
    return "\n".join(out) + "\n"


# --- Segments ---

class Orientation(str, Enum):
    ROW = "row"
    COL = "col"


@dataclass(frozen=True)
class Segment:
    orientation: Orientation
    line: int
    lo: int
    hi: int

    def __post_init__(self):
        object.__setattr__(self, "orientation", Orientation(self.orientation))

    @property
    def min_row(self):
        return self.line if self.orientation is Orientation.ROW else self.lo

    @property
    def max_row(self):
        return self.line if self.orientation is Orientation.ROW else self.hi

    @property
    def min_col(self):
        return self.lo if self.orientation is Orientation.ROW else self.line

    @property
    def max_col(self):
        return self.hi if self.orientation is Orientation.ROW else self.line

    def __len__(self):
        return self.hi - self.lo + 1

    def cells(self):
        if self.orientation is Orientation.ROW:
            return [(self.line, c) for c in range(self.lo, self.hi + 1)]
        return [(r, self.line) for r in range(self.lo, self.hi + 1)]

    def check(self, m):
        if not (0 <= self.line < m and 0 <= self.lo <= self.hi < m):
            raise OutOfBounds(f"{self} does not fit a {m}x{m} table")

    def sort_key(self):
        return (self.max_row, self.max_col,
                0 if self.orientation is Orientation.ROW else 1, self.lo)


def row_segment(row, lo, hi):
    return Segment(Orientation.ROW, row, lo, hi)


def col_segment(col, lo, hi):
    return Segment(Orientation.COL, col, lo, hi)


def precedes(a, b):
    """a lies strictly up-right of b."""
    return a.min_row > b.max_row and a.min_col > b.max_col


def conflicting(a, b):
    return not precedes(a, b) and not precedes(b, a)


def segment_score(t, s):
    s.check(t.m)
    if s.orientation is Orientation.ROW:
        return int(t.w[s.line, s.lo:s.hi + 1].sum())
    return int(t.w[s.lo:s.hi + 1, s.line].sum())


# --- Paths ---

def best_path_score(t):
    """Exact best up/right path from (0, 0) to (m-1, m-1).

    Returns (score, path) with path the 2m-1 visited cells in order.
    Ties step back downward first.
    """
    m = t.m
    w = t.w.tolist()
    dp = [[0] * m for _ in range(m)]
    for r in range(m):
        for c in range(m):
            below = dp[r - 1][c] if r else -1
            left = dp[r][c - 1] if c else -1
            dp[r][c] = w[r][c] + max(below, left, 0)
    path = [(m - 1, m - 1)]
    r = c = m - 1
    while r or c:
        if c == 0 or (r and dp[r - 1][c] >= dp[r][c - 1]):
            r -= 1
        else:
            c -= 1
        path.append((r, c))
    path.reverse()
    return dp[m - 1][m - 1], path


def brute_force_path_score(t):
    """Enumerate every monotone path. Oracle for small tables only."""
    m = t.m
    if m > BRUTE_FORCE_MAX_SIDE:
        raise TooLarge(f"path enumeration capped at m={BRUTE_FORCE_MAX_SIDE}, got {m}")
    w = t.w.tolist()
    steps = 2 * (m - 1)
    best = 0
    for ups in itertools.combinations(range(steps), m - 1):
        up = set(ups)
        r = c = 0
        total = w[0][0]
        for k in range(steps):
            if k in up:
                r += 1
            else:
                c += 1
            total += w[r][c]
        best = max(best, total)
    return best


def is_monotone_path(path, m):
    if not path or path[0] != (0, 0) or path[-1] != (m - 1, m - 1):
        return False
    for (r0, c0), (r1, c1) in zip(path, path[1:]):
        if (r1 - r0, c1 - c0) not in ((1, 0), (0, 1)):
            return False
    return True


# --- Segment families ---

def hierarchy_spans(m, b, leaf_span=1):
    """Intervals of a b-ary hierarchy over [0, m).

    Every node contributes its full block; a node longer than leaf_span
    also contributes each prefix and each suffix that ends or starts on a
    child boundary, and recurses into its children.
    """
    spans = set()
    stack = [(0, m)]
    while stack:
        lo, hi = stack.pop()
        spans.add((lo, hi - 1))
        length = hi - lo
        if length <= max(1, leaf_span):
            continue
        width = math.ceil(length / b)
        bounds = list(range(lo + width, hi, width))
        for x in bounds:
            spans.add((lo, x - 1))
            spans.add((x, hi - 1))
        edges = [lo] + bounds + [hi]
        stack.extend(zip(edges, edges[1:]))
    return sorted(spans)


def branching_factor(m, kappa):
    return max(2, math.ceil(m ** kappa - 1e-9))


class SegmentFamily:
    """A collection of segments over an m x m table with cover statistics.

    Families built by build_family store one shared list of spans and place
    it on every row and every column; segment ids run over all row segments
    (row-major) and then all column segments. Segment objects and the full
    cover index are materialized only on demand.
    """

    def __init__(self, m, segments=None, spans=None, branching=0):
        self.m = m
        self.branching = branching
        if spans is not None:
            self._spans = tuple(spans)
            k = len(self._spans)
            lo = np.array([s[0] for s in self._spans], dtype=np.int64)
            hi = np.array([s[1] for s in self._spans], dtype=np.int64)
            lines = np.repeat(np.arange(m, dtype=np.int64), k)
            self._orient = np.repeat(np.array([0, 1], dtype=np.int8), m * k)
            self._line = np.concatenate([lines, lines])
            self._lo = np.tile(lo, 2 * m)
            self._hi = np.tile(hi, 2 * m)
        else:
            self._spans = None
            segs = tuple(segments or ())
            for s in segs:
                s.check(m)
            self.__dict__["segments"] = segs
            self._orient = np.array(
                [0 if s.orientation is Orientation.ROW else 1 for s in segs], dtype=np.int8)
            self._line = np.array([s.line for s in segs], dtype=np.int64)
            self._lo = np.array([s.lo for s in segs], dtype=np.int64)
            self._hi = np.array([s.hi for s in segs], dtype=np.int64)
        self.max_cover = self._compute_max_cover()

    def __len__(self):
        return len(self._orient)

    @cached_property
    def segments(self):
        return tuple(self.segment(sid) for sid in range(len(self)))

    def segment(self, sid):
        orient = Orientation.ROW if self._orient[sid] == 0 else Orientation.COL
        return Segment(orient, int(self._line[sid]), int(self._lo[sid]), int(self._hi[sid]))

    @cached_property
    def _spans_at(self):
        at = [[] for _ in range(self.m)]
        for k, (lo, hi) in enumerate(self._spans):
            for x in range(lo, hi + 1):
                at[x].append(k)
        return at

    def covering(self, row, col):
        """Ids of the segments covering cell (row, col)."""
        if self._spans is None:
            return self.cover_index.get((row, col), ())
        k = len(self._spans)
        rows = [row * k + s for s in self._spans_at[col]]
        cols = [(self.m + col) * k + s for s in self._spans_at[row]]
        return tuple(rows + cols)

    @cached_property
    def cover_index(self):
        index = {}
        if self._spans is not None:
            for r in range(self.m):
                for c in range(self.m):
                    index[(r, c)] = self.covering(r, c)
            return index
        for sid, s in enumerate(self.segments):
            for cell in s.cells():
                index.setdefault(cell, []).append(sid)
        return {cell: tuple(ids) for cell, ids in index.items()}

    def _compute_max_cover(self):
        if not len(self):
            return 0
        if self._spans is not None:
            diff = np.zeros(self.m + 1, dtype=np.int64)
            for lo, hi in self._spans:
                diff[lo] += 1
                diff[hi + 1] -= 1
            return 2 * int(np.cumsum(diff[:-1]).max())
        counts = np.zeros((self.m, self.m + 1), dtype=np.int64)
        rows = self._orient == 0
        np.add.at(counts, (self._line[rows], self._lo[rows]), 1)
        np.add.at(counts, (self._line[rows], self._hi[rows] + 1), -1)
        row_cover = np.cumsum(counts[:, :-1], axis=1)
        counts[:] = 0
        cols = ~rows
        np.add.at(counts, (self._line[cols], self._lo[cols]), 1)
        np.add.at(counts, (self._line[cols], self._hi[cols] + 1), -1)
        col_cover = np.cumsum(counts[:, :-1], axis=1).T  # back to [row, col]
        return int((row_cover + col_cover).max())

    @cached_property
    def bounds(self):
        """(min_row, max_row, min_col, max_col) arrays over segment ids."""
        is_row = self._orient == 0
        min_row = np.where(is_row, self._line, self._lo)
        max_row = np.where(is_row, self._line, self._hi)
        min_col = np.where(is_row, self._lo, self._line)
        max_col = np.where(is_row, self._hi, self._line)
        return min_row, max_row, min_col, max_col

    @cached_property
    def boxes(self):
        """(min_row, max_row, min_col, max_col) per segment id, as tuples."""
        return list(zip(*(a.tolist() for a in self.bounds)))

    @cached_property
    def sweep(self):
        """Row-sweep order for the chain DP.

        Returns (starts, ends, min_col, max_col): starts[r] lists the ids
        whose lowest row is r, ends[r] those whose highest row is r.
        """
        min_row, max_row, min_col, max_col = self.bounds
        starts = [[] for _ in range(self.m)]
        ends = [[] for _ in range(self.m)]
        for sid, r in enumerate(min_row.tolist()):
            starts[r].append(sid)
        for sid, r in enumerate(max_row.tolist()):
            ends[r].append(sid)
        return starts, ends, min_col.tolist(), max_col.tolist()

    def scores(self, t):
        """Segment scores on table t, via row and column prefix sums."""
        if t.m != self.m:
            raise OutOfBounds(f"family side {self.m} does not match table side {t.m}")
        w = t.w
        row_cum = np.zeros((self.m, self.m + 1), dtype=np.int64)
        row_cum[:, 1:] = np.cumsum(w, axis=1)
        col_cum = np.zeros((self.m + 1, self.m), dtype=np.int64)
        col_cum[1:, :] = np.cumsum(w, axis=0)
        is_row = self._orient == 0
        by_row = row_cum[self._line, self._hi + 1] - row_cum[self._line, self._lo]
        by_col = col_cum[self._hi + 1, self._line] - col_cum[self._lo, self._line]
        return np.where(is_row, by_row, by_col).tolist()


def family_from_segments(m, segs):
    return SegmentFamily(m, segments=list(segs))


@lru_cache(maxsize=64)
def _hierarchical_family(m, kappa, leaf_span):
    b = branching_factor(m, kappa)
    family = SegmentFamily(m, spans=hierarchy_spans(m, b, leaf_span), branching=b)
    log.debug("family m=%d kappa=%.3f b=%d leaf_span=%d: %d segments, max_cover %d",
              m, kappa, b, leaf_span, len(family), family.max_cover)
    return family


def build_family(m, kappa, leaf_span=1):
    """Deterministic b-ary hierarchy family, b = max(2, ceil(m^kappa))."""
    if not (0 < kappa < 1):
        raise InvalidKappa(f"kappa must lie in (0, 1), got {kappa}")
    if m < 1:
        raise OutOfBounds(f"grid side must be >= 1, got {m}")
    return _hierarchical_family(int(m), float(kappa), int(leaf_span))


def cover_bound(m, kappa, c_cover):
    return c_cover * m ** kappa * (math.log2(m) + 1)


# --- Chains ---

@dataclass(frozen=True)
class ChainResult:
    value: int
    chosen: tuple      # segment ids, lowest-left first
    backptrs: dict     # chosen id -> previous chosen id, or None
    ops: int = 0

    def rederive(self):
        """Walk the back-pointers from the last chosen segment."""
        if not self.chosen:
            return ()
        out = []
        sid = self.chosen[-1]
        while sid is not None:
            out.append(sid)
            sid = self.backptrs[sid]
        return tuple(reversed(out))


def chain_dp(family, scores):
    """Best chain under precedence for arbitrary non-negative scores.

    Rows are swept bottom-up. A segment is evaluated at its lowest row
    against a prefix-maximum Fenwick tree over columns holding every
    segment whose highest row is already passed, then inserted at its
    highest row. Tree keys pack (value, -id) so equal values resolve to
    the lowest id.
    """
    n_seg = len(family)
    scores = list(scores)
    if len(scores) != n_seg:
        raise OutOfBounds(f"{len(scores)} scores for {n_seg} segments")
    m = family.m
    starts, ends, min_col, max_col = family.sweep
    base = n_seg + 1
    tree = [-1] * (m + 1)
    best = [0] * n_seg
    back = [-1] * n_seg
    ops = m
    for r in range(m):
        for sid in starts[r]:
            key = -1
            i = min_col[sid]
            while i > 0:
                if tree[i] > key:
                    key = tree[i]
                i -= i & -i
                ops += 1
            if key >= 0:
                best[sid] = scores[sid] + key // base
                back[sid] = n_seg - key % base
            else:
                best[sid] = scores[sid]
            ops += 1
        for sid in ends[r]:
            if best[sid] <= 0:
                continue
            key = best[sid] * base + (n_seg - sid)
            i = max_col[sid] + 1
            while i <= m:
                if tree[i] < key:
                    tree[i] = key
                i += i & -i
                ops += 1

    end, value = -1, 0
    for sid in range(n_seg):
        if best[sid] > value:
            end, value = sid, best[sid]
    walk = []
    while end >= 0:
        if scores[end] > 0:
            walk.append(end)
        end = back[end]
        ops += 1
    walk.reverse()
    backptrs = {sid: (walk[k - 1] if k else None) for k, sid in enumerate(walk)}
    return ChainResult(value, tuple(walk), backptrs, ops)


def best_chain(f, t):
    return chain_dp(f, f.scores(t))


def brute_force_chain(f, t):
    """Best chain by enumerating every pairwise non-conflicting subset."""
    n_seg = len(f)
    if n_seg > BRUTE_FORCE_MAX_SEGMENTS:
        raise TooLarge(f"subset enumeration capped at {BRUTE_FORCE_MAX_SEGMENTS} segments, got {n_seg}")
    segs = f.segments
    scores = f.scores(t)
    best = 0

    def extend(start, chosen, total):
        nonlocal best
        best = max(best, total)
        for i in range(start, n_seg):
            if all(not conflicting(segs[i], segs[j]) for j in chosen):
                chosen.append(i)
                extend(i + 1, chosen, total + scores[i])
                chosen.pop()

    extend(0, [], 0)
    return best


def embed_chain(f, chosen):
    """Monotone corner-to-corner path through every cell of a chain.

    chosen must be pairwise non-conflicting; segments are visited in
    precedence order and joined by right-then-up routes.
    """
    m = f.m
    segs = sorted((f.segment(sid) for sid in chosen), key=Segment.sort_key)
    for a, b in zip(segs, segs[1:]):
        if not precedes(b, a):
            raise OutOfBounds(f"{a} and {b} conflict")
    path = [(0, 0)]

    def route(row, col):
        r, c = path[-1]
        while c < col:
            c += 1
            path.append((r, c))
        while r < row:
            r += 1
            path.append((r, c))

    for s in segs:
        route(s.min_row, s.min_col)
        route(s.max_row, s.max_col)
    route(m - 1, m - 1)
    return path


# --- Adversaries ---

@dataclass(frozen=True)
class StrategyStats:
    strategy: str
    trials: int
    max_ratio: float
    mean_ratio: float
    ratios: tuple


@dataclass(frozen=True)
class RatioReport:
    m: int
    kappa: float
    alpha: int  # the family's max_cover
    strategies: tuple

    def by_strategy(self, name):
        for s in self.strategies:
            if s.strategy == name:
                return s
        raise KeyError(name)

    @property
    def max_ratio(self):
        return max((s.max_ratio for s in self.strategies), default=1.0)


def table_ratio(family, t):
    """Table score over best chain; a zero table counts as ratio 1."""
    score, _ = best_path_score(t)
    if score == 0:
        return 1.0
    return score / max(best_chain(family, t).value, 1)


def _random_path(m, rng):
    moves = np.array([0] * (m - 1) + [1] * (m - 1), dtype=np.int8)
    rng.shuffle(moves)
    cells = [(0, 0)]
    r = c = 0
    for up in moves.tolist():
        if up:
            r += 1
        else:
            c += 1
        cells.append((r, c))
    return cells


def adversary_table(strategy, m, family, rng):
    """One seeded weight assignment for the named adversary."""
    w = np.zeros((m, m), dtype=np.int64)
    if strategy == "uniform":
        w = rng.integers(0, 10, size=(m, m))
    elif strategy == "single_path":
        for r, c in _random_path(m, rng):
            w[r, c] = rng.integers(1, 10)
    elif strategy == "anti_segment":
        width = math.ceil(m / max(2, family.branching or 2))
        edge = {0, width - 1}
        path = _random_path(m, rng)
        marked = [(r, c) for r, c in path if c % width in edge or r % width in edge]
        for r, c in marked or path:
            w[r, c] = rng.integers(1, 10)
    elif strategy == "sparse_spikes":
        spikes = max(1, m // 4)
        flat = rng.choice(m * m, size=spikes, replace=False)
        w.flat[flat] = rng.integers(50, 100, size=spikes)
    else:
        raise BadSpec(f"unknown adversary {strategy!r}; expected one of {', '.join(ADVERSARIES)}")
    return Table(w)


def measure_ratio(m, kappa, adversaries=ADVERSARIES, trials=100, seed=0, family=None):
    """Per-adversary max and mean of table score / best chain."""
    family = family or build_family(m, kappa)
    stats = []
    for k, strategy in enumerate(adversaries):
        if strategy not in ADVERSARIES:
            raise BadSpec(f"unknown adversary {strategy!r}")
        ratios = []
        for trial in range(trials):
            rng = np.random.default_rng([seed & 0xFFFFFFFF, k, trial])
            ratios.append(table_ratio(family, adversary_table(strategy, m, family, rng)))
        stats.append(StrategyStats(
            strategy, trials,
            max(ratios, default=1.0),
            float(np.mean(ratios)) if ratios else 1.0,
            tuple(ratios)))
        log.info("ratio m=%d kappa=%.2f %s: max %.3f over %d trials",
                 m, kappa, strategy, stats[-1].max_ratio, trials)
    return RatioReport(m, kappa, family.max_cover, tuple(stats))
