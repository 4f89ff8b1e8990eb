"""Core types shared by every module.

Sequences of distinct integers, their point-space view, monotone parts and
partitions, the partition validator, the text/JSON file formats, and the
error hierarchy. Positions are 1-based throughout: position i holds a_i and
maps to the point (i, a_i).
"""

import json
import math
import operator
import re
from dataclasses import dataclass
from enum import Enum


_INT_LINE = re.compile(r"-?\d+")


# --- Errors ---

class EspartError(Exception):
    """Base class for every error raised by the toolkit."""


class DuplicateValue(EspartError):
    def __init__(self, first, second, value=None):
        self.first = first
        self.second = second
        self.value = value
        super().__init__(
            f"duplicate value {value} at positions {first} and {second}")


class PositionOutOfRange(EspartError):
    pass


class UnknownKey(EspartError):
    pass


class OutOfBounds(EspartError):
    pass


class InvalidKappa(EspartError):
    pass


class InvalidConfig(EspartError):
    pass


class TooLarge(EspartError):
    pass


class BadSpec(EspartError):
    pass


class InputError(EspartError):
    pass


# --- Types ---

@dataclass(frozen=True)
class Sequence:
    """An ordered run of pairwise distinct integers."""

    values: tuple

    def __post_init__(self):
        vals = tuple(operator.index(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        seen = {}
        for i, v in enumerate(vals, 1):
            if v in seen:
                raise DuplicateValue(seen[v], i, v)
            seen[v] = i

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def at(self, i):
        """Value at 1-based position i."""
        return self.values[i - 1]

    def reversed(self):
        return Sequence(self.values[::-1])


def as_sequence(obj):
    """Accept a Sequence or any iterable of integers."""
    if isinstance(obj, Sequence):
        return obj
    return Sequence(tuple(obj))


@dataclass(frozen=True)
class PointSet:
    points: tuple  # ((x, y), ...) sorted by x

    def __len__(self):
        return len(self.points)

    def is_permutation_graph(self):
        """True iff every row and every column 1..n holds exactly one point."""
        n = len(self.points)
        xs = sorted(x for x, _ in self.points)
        ys = sorted(y for _, y in self.points)
        want = list(range(1, n + 1))
        return xs == want and ys == want


class Direction(str, Enum):
    INC = "inc"
    DEC = "dec"


@dataclass(frozen=True)
class MonotonePart:
    """A direction-tagged run of positions.

    Construction does not check the part against any sequence; that is
    validate_partition's job, so malformed input reaches the report.
    """

    direction: Direction
    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction(self.direction))
        object.__setattr__(self, "indices", tuple(self.indices))

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class Partition:
    n: int
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self):
        return len(self.parts)

    def sizes(self):
        return [len(p) for p in self.parts]


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    index: int


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple = ()

    def lines(self):
        if self.ok:
            return ["ok"]
        return [v.message for v in self.violations]

    def __str__(self):
        return "\n".join(self.lines())


# --- Operations ---

def rank_normalize(seq):
    """Replace each value by its 1-based rank; relative order is preserved."""
    seq = as_sequence(seq)
    order = sorted(range(len(seq)), key=seq.values.__getitem__)
    ranks = [0] * len(seq)
    for rank, i in enumerate(order, 1):
        ranks[i] = rank
    return Sequence(tuple(ranks))


def to_points(seq):
    """Point (i, a_i) for every position of a rank-normalized sequence."""
    seq = as_sequence(seq)
    return PointSet(tuple((i, v) for i, v in enumerate(seq.values, 1)))


def quantile_cells(seq, m):
    """Static m x m quantile grid: position -> (row, col).

    Columns split positions and rows split value ranks into bands of
    ceil(n/m), row 0 holding the smallest values.
    """
    if m < 1:
        raise OutOfBounds(f"grid side must be >= 1, got {m}")
    ranked = rank_normalize(seq)
    n = len(ranked)
    if n == 0:
        return {}
    band = math.ceil(n / m)
    return {i: ((v - 1) // band, (i - 1) // band)
            for i, v in enumerate(ranked.values, 1)}


def validate_partition(seq, p):
    """Check a partition against its sequence; failures are report content."""
    seq = as_sequence(seq)
    n = len(seq)
    violations = []
    if p.n != n:
        violations.append(Violation(
            "length_mismatch", f"partition n={p.n} but sequence has {n} values", 0))

    covered = {}
    for k, part in enumerate(p.parts, 1):
        idx = part.indices
        if not idx:
            violations.append(Violation("empty_part", f"part {k} is empty", 0))
            continue
        bad = next((i for i in idx if not (isinstance(i, int) and 1 <= i <= n)), None)
        if bad is not None:
            violations.append(Violation(
                "out_of_range", f"part {k} position {bad} out of range 1..{n}",
                bad if isinstance(bad, int) else 0))
            continue
        for prev, cur in zip(idx, idx[1:]):
            if cur <= prev:
                violations.append(Violation(
                    "unsorted_indices",
                    f"part {k} positions {prev},{cur} not strictly increasing", cur))
                break
        else:
            word = "increasing" if part.direction is Direction.INC else "decreasing"
            for prev, cur in zip(idx, idx[1:]):
                a, b = seq.at(prev), seq.at(cur)
                rising = b > a
                if rising != (part.direction is Direction.INC):
                    violations.append(Violation(
                        "not_monotone", f"part {k} values {a},{b} not {word}", cur))
                    break
        for i in idx:
            if i in covered:
                violations.append(Violation(
                    "duplicate",
                    f"position {i} covered by parts {covered[i]} and {k}", i))
                break
            covered[i] = k

    missing = next((i for i in range(1, n + 1) if i not in covered), None)
    if missing is not None:
        violations.append(Violation("uncovered", f"position {missing} uncovered", missing))

    return ValidationReport(not violations, tuple(violations))


# --- File formats ---

def parse_sequence(text):
    """One integer per line; trailing blank lines are ignored."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    values = []
    for lineno, line in enumerate(lines, 1):
        s = line.strip()
        if not _INT_LINE.fullmatch(s):
            raise InputError(f"line {lineno}: not an integer: {s!r}")
        values.append(int(s))
    return Sequence(tuple(values))


def read_sequence(path):
    try:
        with open(path, "r", encoding="ascii") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read sequence {path}: {e}") from e
    return parse_sequence(text)


def format_sequence(seq):
    seq = as_sequence(seq)
    return "".join(f"{v}\n" for v in seq.values)


def partition_to_dict(p, stats=None):
    doc = {
        "n": p.n,
        "parts": [{"direction": part.direction.value, "indices": list(part.indices)}
                  for part in p.parts],
    }
    if stats is not None:
        doc["stats"] = stats
    return doc


def partition_to_json(p, stats=None):
    return json.dumps(partition_to_dict(p, stats), separators=(",", ":"))


def partition_from_json(text):
    try:
        doc = json.loads(text)
    except (ValueError, TypeError) as e:
        raise InputError(f"malformed partition JSON: {e}") from e
    if not isinstance(doc, dict) or not isinstance(doc.get("n"), int):
        raise InputError("partition JSON needs an integer 'n'")
    raw_parts = doc.get("parts")
    if not isinstance(raw_parts, list):
        raise InputError("partition JSON needs a 'parts' list")
    parts = []
    for k, raw in enumerate(raw_parts, 1):
        if not isinstance(raw, dict):
            raise InputError(f"part {k} is not an object")
        direction = raw.get("direction")
        indices = raw.get("indices")
        if direction not in ("inc", "dec"):
            raise InputError(f"part {k} direction must be 'inc' or 'dec'")
        if not isinstance(indices, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in indices):
            raise InputError(f"part {k} indices must be a list of integers")
        parts.append(MonotonePart(Direction(direction), tuple(indices)))
    return Partition(doc["n"], tuple(parts))


def read_partition(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read partition {path}: {e}") from e
    return partition_from_json(text)
