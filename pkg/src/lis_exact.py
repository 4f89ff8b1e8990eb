"""Exact longest increasing / decreasing subsequences with witnesses.

Three routines share one result type:
    lis_patience          patience sorting, O(n log n) comparisons
    lis_quadratic_oracle  suffix DP, O(n^2), test oracle only
    lis_bounded           bucketed finger patience, ops ~ c1*n + c2*k^2

All three return the same witness: the lexicographically smallest index
sequence among the longest increasing subsequences. Each routine computes,
for every position, the length of the longest increasing run starting
there, then a single left-to-right scan picks the earliest usable index at
every step.

Every result carries an `ops` counter so complexity is checked by counting,
not by timing.
"""

import math
from bisect import bisect_left
from dataclasses import dataclass

from core import as_sequence


@dataclass(frozen=True)
class LisWitness:
    length: int
    indices: tuple  # 1-based positions, strictly increasing
    ops: int = 0


def _patience_levels(values):
    """Pile number (1-based) of every value: the LIS length ending there."""
    tails = []
    levels = [0] * len(values)
    ops = 0
    for i, v in enumerate(values):
        ops += max(1, len(tails).bit_length())
        j = bisect_left(tails, v)
        if j == len(tails):
            tails.append(v)
        else:
            tails[j] = v
        levels[i] = j + 1
    return levels, ops


def _lex_first(values, start):
    """Earliest-index LIS given the LIS length starting at every position.

    After t picks ending at `last`, any later value above `last` starts a
    run of at most k - t, so equality with the remaining need is enough.
    """
    need = max(start, default=0)
    out = []
    last = None
    ops = 0
    for i, v in enumerate(values):
        if not need:
            break
        ops += 1
        if start[i] == need and (last is None or v > last):
            out.append(i)
            last = v
            need -= 1
    return out, ops


def _from_suffix(values, levels_fn):
    # LIS starting at i == LIS ending at i in the reversed, negated run.
    rev = [-v for v in reversed(values)]
    levels, ops = levels_fn(rev)
    idx, scan = _lex_first(values, levels[::-1])
    return idx, ops + scan


def patience_indices(values):
    """Patience sorting over distinct comparable values.

    Returns (indices, ops): 0-based indices of the lexicographically
    smallest longest strictly increasing subsequence and the comparisons
    spent.
    """
    return _from_suffix(values, _patience_levels)


def _witness(indices, ops):
    return LisWitness(len(indices), tuple(i + 1 for i in indices), ops)


def lis_patience(seq):
    seq = as_sequence(seq)
    return _witness(*patience_indices(seq.values))


def lds(seq):
    """Longest strictly decreasing subsequence: patience over negated values."""
    seq = as_sequence(seq)
    return _witness(*patience_indices([-v for v in seq.values]))


def lis_quadratic_oracle(seq):
    """Classical O(n^2) DP over suffixes. Ground truth for tests."""
    values = as_sequence(seq).values
    n = len(values)
    start = [1] * n
    ops = 0
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            ops += 1
            if values[j] > values[i] and start[j] + 1 > start[i]:
                start[i] = start[j] + 1
    idx, scan = _lex_first(values, start)
    return _witness(idx, ops + scan)


def _gallop_up(tails, v, lo, hi):
    """Leftmost j in [lo, hi] with j == hi or tails[j] >= v.

    Tests lo, lo+1, lo+3, lo+7, ... then bisects the bracketed gap.
    Returns (j, comparisons).
    """
    cmps = 0
    step = 1
    while True:
        at = lo + step - 1
        if at >= hi:
            break
        cmps += 1
        if tails[at] >= v:
            hi = at
            break
        lo = at + 1
        step *= 2
    cmps += (hi - lo).bit_length()
    return bisect_left(tails, v, lo, hi), cmps


def _gallop_down(tails, v, lo, hi):
    """Leftmost j in [lo, hi] with tails[j] >= v, given tails[hi] >= v."""
    cmps = 0
    step = 1
    while True:
        at = hi - step
        if at < lo:
            break
        cmps += 1
        if tails[at] < v:
            lo = at + 1
            break
        hi = at
        step *= 2
    cmps += (hi - lo).bit_length()
    return bisect_left(tails, v, lo, hi), cmps


def _bounded_levels(values):
    """Patience levels with the pile search confined to one value bucket.

    The value range is cut into isqrt(n) buckets and first[b] counts the
    piles whose top lies below bucket b, so a value of bucket b lands in
    piles first[b] .. first[b+1]. Inside that window the search gallops
    from the previous pile when it falls in the window, from the window's
    bottom otherwise. A pile top only moves down, so first[] absorbs at
    most k * isqrt(n) increments over the whole run.
    """
    n = len(values)
    if not n:
        return [], 0
    lo, hi = min(values), max(values)
    span = hi - lo + 1
    nb = max(1, math.isqrt(n))
    first = [0] * (nb + 1)
    tails = []
    tail_bucket = []
    levels = [0] * n
    ops = n
    finger = 0
    for i, v in enumerate(values):
        ops += 1
        b = (v - lo) * nb // span
        left, right = first[b], first[b + 1]
        if left == right:
            j = left
        elif left <= finger < right:
            ops += 1
            if tails[finger] < v:
                j, cmps = _gallop_up(tails, v, finger + 1, right)
            else:
                j, cmps = _gallop_down(tails, v, left, finger)
            ops += cmps
        else:
            j, cmps = _gallop_up(tails, v, left, right)
            ops += cmps
        if j == len(tails):
            tails.append(v)
            tail_bucket.append(b)
            old = nb
        else:
            tails[j] = v
            old = tail_bucket[j]
            tail_bucket[j] = b
        for c in range(b + 1, old + 1):
            first[c] += 1
        ops += old - b
        levels[i] = j + 1
        finger = j
    return levels, ops


def lis_bounded(seq):
    """Exact LIS whose work tracks n + k^2 rather than n log n.

    Pile searches stay inside a value bucket and start from the previous
    pile, so runs read in increasing or decreasing order cost O(1) per
    element and evenly spread tails cost O(1) per bucket. Keeping first[]
    current costs at most k * isqrt(n) <= (n + k^2) / 2. Inputs that pack
    many tails into one bucket and jump between far piles fall back to
    logarithmic searches.
    """
    values = as_sequence(seq).values
    return _witness(*_from_suffix(values, _bounded_levels))
