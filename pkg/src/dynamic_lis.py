"""Dynamic approximate LIS over a quantile grid.

The live sequence is laid on an m x m grid, m = ceil(size ** (1 / (3 - kappa))),
whose column boundaries split positions and whose row boundaries split
values so that every row and column holds at most ceil(size/m) points.
Column boundaries are frozen position labels between rebuilds. Row
boundaries are live boundary points: a threshold is the current value of
its point, handed to the next live value up when that point leaves or
changes rank, so an update never moves any other point across a row. Each
segment of the hierarchical family over the grid, down to single cells,
keeps a partial solution: an increasing subsequence of the points in
its cells (exact patience LIS at depth 1, a nested depth-1 instance at
depth 2). The estimate is the best chain of pairwise non-conflicting
segments scored by partial length; chained partials concatenate into one
increasing subsequence, so the estimate never exceeds the exact LIS.

With single-cell leaves the family holds O(m^2) = O(size^(2/(3-kappa)))
segments, so the chain DP stays sublinear in the live size while a run of
sorted points is never split across conflicting leaves.

An update touches only the segments covering the modified point's cell.
Work is deferred: updates mark those segments dirty, and the next read
recomputes them and re-runs the chain DP. At depth 1 a delete dirties only
the covering segments whose stored partial holds the removed point; an
exact LIS that misses the point is still exact without it.
"""

import logging
import math
import operator
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from heapq import merge
from typing import NewType

from sortedcontainers import SortedList

from config import (
    DEFAULT_KAPPA, DEFAULT_DEPTH, DEFAULT_REBUILD_FACTOR, MIN_REBUILD_FACTOR,
    LABEL_GAP,
)
from core import DuplicateValue, InvalidConfig, PositionOutOfRange, UnknownKey
from grid_packing import build_family, chain_dp
from lis_exact import patience_indices

log = logging.getLogger("dynamic_lis")

PointKey = NewType("PointKey", int)

COUNTER_FIELDS = (
    "inserts", "deletes", "substitutes", "queries", "extracts",
    "rebuilds", "relabels",
    "segments_touched", "points_resorted", "lis_ops", "nested_work",
    "dp_cells", "extract_work",
)
WORK_FIELDS = (
    "segments_touched", "points_resorted", "lis_ops", "nested_work",
    "dp_cells", "extract_work",
)


@dataclass(frozen=True)
class DynConfig:
    kappa: float = DEFAULT_KAPPA
    depth: int = DEFAULT_DEPTH
    rebuild_factor: float = DEFAULT_REBUILD_FACTOR

    def __post_init__(self):
        if not (0 < self.kappa < 1):
            raise InvalidConfig(f"kappa must lie in (0, 1), got {self.kappa}")
        if self.depth not in (1, 2) or isinstance(self.depth, bool):
            raise InvalidConfig(f"depth must be 1 or 2, got {self.depth}")
        if not (self.rebuild_factor >= MIN_REBUILD_FACTOR):
            raise InvalidConfig(
                f"rebuild_factor must be >= {MIN_REBUILD_FACTOR}, got {self.rebuild_factor}")

    def to_dict(self):
        return {"kappa": self.kappa, "depth": self.depth,
                "rebuild_factor": self.rebuild_factor}


@dataclass(frozen=True)
class CounterReport:
    cumulative: dict
    last_op: dict

    @property
    def work(self):
        return sum(self.cumulative[f] for f in WORK_FIELDS)

    @property
    def last_work(self):
        return sum(self.last_op[f] for f in WORK_FIELDS)

    def to_dict(self):
        return {"cumulative": dict(self.cumulative), "last_op": dict(self.last_op),
                "work": self.work}


class _NestedPartial:
    """Depth-2 partial: a depth-1 instance over one segment's points."""

    def __init__(self, config, labels, keys, values):
        self.labels = SortedList(labels)
        self.inst = DynLisInstance(config)
        inner = self.inst.extend(values)
        self.inner_of = dict(zip(keys, inner))
        self.outer_of = dict(zip(inner, keys))

    def work(self):
        return self.inst.op_counters().work

    def add(self, label, key, value):
        pos = self.labels.bisect_left(label) + 1
        self.labels.add(label)
        inner = self.inst.insert(pos, value)
        self.inner_of[key] = inner
        self.outer_of[inner] = key

    def remove(self, label, key):
        self.labels.remove(label)
        inner = self.inner_of.pop(key)
        del self.outer_of[inner]
        self.inst.delete(inner)

    def partial(self):
        return tuple(self.outer_of[k] for k in self.inst.extract_solution())

    def relabel(self, mapping):
        self.labels = SortedList(mapping[label] for label in self.labels)


def grid_side(n, kappa):
    """Smallest m >= 1 with m ** (3 - kappa) >= n."""
    if n <= 1:
        return 1
    e = 3 - kappa
    m = max(1, math.ceil(n ** (1 / e)))
    while m > 1 and (m - 1) ** e >= n:
        m -= 1
    while m ** e < n:
        m += 1
    return m


class _Grid:
    """Row and column boundaries, the family over them, per-segment state."""

    def __init__(self, side, row_keys, row_bounds, col_bounds, family):
        self.side = side
        self.row_bounds = row_bounds  # current values of the boundary points
        self.col_bounds = col_bounds  # position-label thresholds
        self.boundary_rows = {}       # boundary point key -> row indices
        for r, key in enumerate(row_keys):
            self.boundary_rows.setdefault(key, []).append(r)
        self.family = family
        self.cells = {}               # (row, col) -> SortedList of labels
        n_seg = len(family)
        self.scores = [0] * n_seg
        self.partials = [()] * n_seg
        self.members = [frozenset()] * n_seg
        self.nested = {}
        self.dirty = set(range(n_seg))
        self.chain = None

    def cell_of(self, label, value):
        return bisect_right(self.row_bounds, value), bisect_right(self.col_bounds, label)


class DynLisInstance:
    """A sequence under insert / delete / substitute with an LIS estimate.

    Single writer: callers serialize mutations and do not overlap reads
    with writes. Elements are addressed by 1-based position on insert and
    by stable PointKey afterwards.
    """

    def __init__(self, config=None):
        self.config = config or DynConfig()
        self._order = SortedList()   # live position labels
        self._key_of_label = {}
        self._label_of = {}
        self._value_of = {}
        self._key_of_value = {}
        self._values = SortedList()  # live values
        self._next_key = 1
        self._rebuild_size = 0
        self._totals = dict.fromkeys(COUNTER_FIELDS, 0)
        self._last = dict.fromkeys(COUNTER_FIELDS, 0)
        self._grid = self._build_grid()

    @classmethod
    def from_values(cls, values, config=None):
        inst = cls(config)
        inst.extend(values)
        return inst

    # --- Updates ---

    def insert(self, pos, value):
        value = operator.index(value)
        n = len(self._order)
        if not (1 <= pos <= n + 1):
            raise PositionOutOfRange(f"position {pos} outside 1..{n + 1}")
        if value in self._key_of_value:
            raise DuplicateValue(self.position_of(self._key_of_value[value]), pos, value)
        self._begin_op("inserts")
        label = self._new_label(pos)
        key = self._admit(label, value)
        if self._needs_rebuild():
            self._rebuild_fresh()
        else:
            self._place(key)
        return key

    def extend(self, values):
        """Append values in order; same result as inserting each at the end."""
        values = [operator.index(v) for v in values]
        seen = {}
        for i, v in enumerate(values, len(self._order) + 1):
            if v in self._key_of_value:
                raise DuplicateValue(self.position_of(self._key_of_value[v]), i, v)
            if v in seen:
                raise DuplicateValue(seen[v], i, v)
            seen[v] = i
        if not values:
            return []
        self._begin_op("inserts", len(values))
        label = self._order[-1] if self._order else -LABEL_GAP
        keys = []
        for v in values:
            label += LABEL_GAP
            keys.append(self._admit(label, v))
        if self._needs_rebuild():
            self._rebuild_fresh()
        else:
            for key in keys:
                self._place(key)
        return keys

    def delete(self, key):
        if key not in self._label_of:
            raise UnknownKey(f"unknown key {key}")
        self._begin_op("deletes")
        self._unplace(key)
        self._release_row_boundary(key)
        label = self._label_of.pop(key)
        value = self._value_of.pop(key)
        del self._key_of_label[label]
        del self._key_of_value[value]
        self._values.remove(value)
        self._order.remove(label)
        if self._needs_rebuild():
            self._rebuild_fresh()

    def substitute(self, key, value):
        value = operator.index(value)
        if key not in self._label_of:
            raise UnknownKey(f"unknown key {key}")
        other = self._key_of_value.get(value)
        if other is not None and other != key:
            raise DuplicateValue(self.position_of(other), self.position_of(key), value)
        self._begin_op("substitutes")
        self._unplace(key)
        old = self._value_of[key]
        lo, hi = min(old, value), max(old, value)
        if value == old or self._values.bisect_left(hi) == self._values.bisect_right(lo):
            # same rank: thresholds held by this point follow it
            for r in self._grid.boundary_rows.get(key, ()):
                self._grid.row_bounds[r] = value
        else:
            self._release_row_boundary(key)
        del self._key_of_value[old]
        self._values.remove(old)
        self._values.add(value)
        self._value_of[key] = value
        self._key_of_value[value] = key
        self._place(key)

    def rebuild(self):
        """Forced rebuild; keeps whichever grid gives the larger estimate."""
        self._begin_op("rebuilds")
        before = self._refresh(self._grid).value
        fresh = self._build_grid()
        after = self._refresh(fresh).value
        self._rebuild_size = len(self._order)
        if after >= before:
            self._grid = fresh
        else:
            log.debug("forced rebuild kept the current grid (%d > %d)", before, after)

    # --- Reads ---

    def estimate_lis(self):
        self._count("queries")
        return self._refresh(self._grid).value

    def extract_solution(self):
        """Keys of an increasing subsequence of exactly estimate_lis() elements."""
        self._count("extracts")
        grid = self._grid
        chain = self._refresh(grid)
        out = []
        for sid in chain.chosen:
            if self.config.depth == 2:
                out.extend(grid.nested[sid].partial())
            else:
                out.extend(grid.partials[sid])
        self._count("extract_work", len(chain.chosen) + len(out))
        return out

    def op_counters(self):
        """Cumulative counters and those of the latest update.

        Reads add their deferred work to the latest update's view.
        """
        return CounterReport(dict(self._totals), dict(self._last))

    def size(self):
        return len(self._order)

    def __len__(self):
        return len(self._order)

    def key_at(self, pos):
        if not (1 <= pos <= len(self._order)):
            raise PositionOutOfRange(f"position {pos} outside 1..{len(self._order)}")
        return self._key_of_label[self._order[pos - 1]]

    def position_of(self, key):
        if key not in self._label_of:
            raise UnknownKey(f"unknown key {key}")
        return self._order.index(self._label_of[key]) + 1

    def value_of(self, key):
        if key not in self._value_of:
            raise UnknownKey(f"unknown key {key}")
        return self._value_of[key]

    def live_values(self):
        return [self._value_of[self._key_of_label[label]] for label in self._order]

    @property
    def side(self):
        return self._grid.side

    @property
    def family(self):
        return self._grid.family

    def cell_of_key(self, key):
        return self._grid.cell_of(self._label_of[key], self._value_of[key])

    # ---- Internal ----

    def _count(self, name, amount=1):
        self._totals[name] += amount
        self._last[name] += amount

    def _begin_op(self, name, amount=1):
        self._last = dict.fromkeys(COUNTER_FIELDS, 0)
        self._count(name, amount)

    def _admit(self, label, value):
        key = PointKey(self._next_key)
        self._next_key += 1
        self._order.add(label)
        self._key_of_label[label] = key
        self._label_of[key] = label
        self._value_of[key] = value
        self._key_of_value[value] = key
        self._values.add(value)
        return key

    def _new_label(self, pos):
        n = len(self._order)
        if n == 0:
            return 0
        if pos == n + 1:
            return self._order[-1] + LABEL_GAP
        if pos == 1:
            return self._order[0] - LABEL_GAP
        left, right = self._order[pos - 2], self._order[pos - 1]
        if right - left < 2:
            self._relabel()
            left, right = self._order[pos - 2], self._order[pos - 1]
        return (left + right) // 2

    def _relabel(self):
        """Respace all labels evenly; frozen column boundaries follow."""
        old = list(self._order)
        new = [(i + 1) * LABEL_GAP for i in range(len(old))]
        mapping = dict(zip(old, new))
        grid = self._grid
        remapped = []
        for bound in grid.col_bounds:
            i = bisect_left(old, bound)
            remapped.append(new[i] if i < len(new) else new[-1] + LABEL_GAP)
        grid.col_bounds = remapped
        grid.cells = {cell: SortedList(mapping[label] for label in labels)
                      for cell, labels in grid.cells.items()}
        for nested in grid.nested.values():
            nested.relabel(mapping)
        self._key_of_label = {mapping[label]: key for label, key in self._key_of_label.items()}
        self._label_of = {key: mapping[label] for key, label in self._label_of.items()}
        self._order = SortedList(new)
        self._count("relabels")
        log.debug("relabelled %d positions", len(new))

    def _needs_rebuild(self):
        n = len(self._order)
        rf = self.config.rebuild_factor
        last = self._rebuild_size
        return n > last * rf or n < last / rf

    def _rebuild_fresh(self):
        self._grid = self._build_grid()
        self._rebuild_size = len(self._order)
        self._count("rebuilds")
        log.debug("rebuilt grid side %d for %d points", self._grid.side, self._rebuild_size)

    def _release_row_boundary(self, key):
        """Pass the thresholds held by `key` to the next live value up.

        Nothing live lies between the two values, so no other point changes
        row. With no live value above, the threshold becomes infinite.
        """
        grid = self._grid
        rows = grid.boundary_rows.pop(key, None)
        if not rows:
            return
        i = self._values.bisect_right(self._value_of[key])
        if i < len(self._values):
            bound = self._values[i]
            grid.boundary_rows.setdefault(self._key_of_value[bound], []).extend(rows)
        else:
            bound = math.inf
        for r in rows:
            grid.row_bounds[r] = bound

    def _build_grid(self):
        labels = list(self._order)
        n = len(labels)
        kappa = self.config.kappa
        side = grid_side(n, kappa)
        q = math.ceil(n / side) if n else 1
        cuts = [i * q for i in range(1, side) if i * q < n]
        row_bounds = [self._values[i] for i in cuts]
        row_keys = [self._key_of_value[v] for v in row_bounds]
        col_bounds = [labels[i] for i in cuts]
        family = build_family(side, kappa)
        grid = _Grid(side, row_keys, row_bounds, col_bounds, family)
        cells = {}
        for label in labels:
            key = self._key_of_label[label]
            cells.setdefault(grid.cell_of(label, self._value_of[key]), []).append(label)
        grid.cells = {cell: SortedList(ls) for cell, ls in cells.items()}
        if self.config.depth == 2:
            nested_cfg = DynConfig(kappa, 1, self.config.rebuild_factor)
            for sid in range(len(family)):
                seg_labels = self._segment_labels(grid, sid)
                keys = [self._key_of_label[label] for label in seg_labels]
                grid.nested[sid] = _NestedPartial(
                    nested_cfg, seg_labels, keys, [self._value_of[k] for k in keys])
        return grid

    def _segment_labels(self, grid, sid):
        """Labels of the points in a segment's cells, in position order."""
        r0, r1, c0, c1 = grid.family.boxes[sid]
        cells = grid.cells
        if r0 == r1:
            out = []
            for c in range(c0, c1 + 1):
                labels = cells.get((r0, c))
                if labels:
                    out.extend(labels)
            return out
        # column segment: cells share a position band, merge by label
        runs = [cells[(r, c0)] for r in range(r0, r1 + 1) if cells.get((r, c0))]
        return list(merge(*runs))

    def _place(self, key):
        grid = self._grid
        label, value = self._label_of[key], self._value_of[key]
        cell = grid.cell_of(label, value)
        labels = grid.cells.get(cell)
        if labels is None:
            labels = grid.cells[cell] = SortedList()
        labels.add(label)
        cover = grid.family.covering(*cell)
        self._count("segments_touched", len(cover))
        if self.config.depth == 2:
            for sid in cover:
                nested = grid.nested[sid]
                before = nested.work()
                nested.add(label, key, value)
                self._count("nested_work", nested.work() - before)
        grid.dirty.update(cover)
        grid.chain = None

    def _unplace(self, key):
        grid = self._grid
        label, value = self._label_of[key], self._value_of[key]
        cell = grid.cell_of(label, value)
        grid.cells[cell].remove(label)
        cover = grid.family.covering(*cell)
        self._count("segments_touched", len(cover))
        if self.config.depth == 2:
            for sid in cover:
                nested = grid.nested[sid]
                before = nested.work()
                nested.remove(label, key)
                self._count("nested_work", nested.work() - before)
            grid.dirty.update(cover)
            grid.chain = None
            return
        # an exact partial that misses the removed point stays exact
        stale = [sid for sid in cover if key in grid.members[sid]]
        if stale:
            grid.dirty.update(stale)
            grid.chain = None

    def _recompute(self, grid, sid):
        if self.config.depth == 2:
            nested = grid.nested[sid]
            before = nested.work()
            grid.scores[sid] = nested.inst.estimate_lis()
            self._count("nested_work", nested.work() - before)
            return
        labels = self._segment_labels(grid, sid)
        keys = [self._key_of_label[label] for label in labels]
        idx, ops = patience_indices([self._value_of[k] for k in keys])
        grid.partials[sid] = tuple(keys[i] for i in idx)
        grid.members[sid] = frozenset(grid.partials[sid])
        grid.scores[sid] = len(idx)
        self._count("points_resorted", len(keys))
        self._count("lis_ops", ops)

    def _refresh(self, grid):
        if grid.dirty:
            for sid in grid.dirty:
                self._recompute(grid, sid)
            grid.dirty.clear()
            grid.chain = None
        if grid.chain is None:
            grid.chain = chain_dp(grid.family, grid.scores)
            self._count("dp_cells", grid.chain.ops)
        return grid.chain


# Module-level forms of the instance API.

def new(config=None):
    return DynLisInstance(config)


def insert(inst, pos, value):
    return inst.insert(pos, value)


def delete(inst, key):
    inst.delete(key)


def substitute(inst, key, value):
    inst.substitute(key, value)


def estimate_lis(inst):
    return inst.estimate_lis()


def extract_solution(inst):
    return inst.extract_solution()


def op_counters(inst):
    return inst.op_counters()
