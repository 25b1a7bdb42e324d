"""Matching-based surplus test on the column/row bipartite graph.

Columns are left vertices, rows are right vertices, and column ``i`` is
adjacent to every row of its observation set.  A family of columns has
``m >= n + r`` on every nonempty subfamily exactly when, for every set ``R``
of ``r`` touched rows, the graph with ``R`` deleted still matches every
column.  A failed matching yields a Hall violator directly: the columns
reachable by alternating paths from an unmatched column see fewer than
``|S|`` rows outside ``R``, hence fewer than ``|S| + r`` rows overall.
"""
from __future__ import annotations

from itertools import combinations
from typing import Sequence


def _rows(bits: int) -> list[int]:
    out = []
    j = 0
    while bits:
        if bits & 1:
            out.append(j)
        bits >>= 1
        j += 1
    return out


def max_matching(adj: Sequence[Sequence[int]]) -> tuple[int, list[int], dict[int, int]]:
    """Augmenting-path maximum matching.

    ``adj[i]`` lists the right vertices of left vertex ``i``.  Returns the
    matching size, ``match_left`` (-1 if unmatched) and the right-to-left map.
    """
    match_left = [-1] * len(adj)
    match_right: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in adj[u]:
            if v in seen:
                continue
            seen.add(v)
            w = match_right.get(v)
            if w is None or augment(w, seen):
                match_left[u] = v
                match_right[v] = u
                return True
        return False

    size = 0
    for u in range(len(adj)):
        if augment(u, set()):
            size += 1
    return size, match_left, match_right


def hall_violator(adj: Sequence[Sequence[int]], match_left: list[int], match_right: dict[int, int]) -> list[int]:
    """Left vertices reachable by alternating paths from the first unmatched one."""
    start = match_left.index(-1)
    reached = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            w = match_right.get(v)
            if w is not None and w not in reached:
                reached.add(w)
                stack.append(w)
    return sorted(reached)


def find_violation(masks: Sequence[int], r: int) -> tuple[int, ...] | None:
    """Smallest violating subfamily found, as positions into ``masks``.

    Every ``r``-subset of touched rows is tried; among the violators
    produced, the one of least cardinality (then lexicographically first)
    is returned.  ``None`` means the family is independent.
    """
    n = len(masks)
    if n == 0:
        return None
    touched = 0
    for b in masks:
        touched |= b
    rows_of = [_rows(b) for b in masks]
    best: tuple[int, ...] | None = None
    for removed in combinations(_rows(touched), r):
        gone = set(removed)
        adj = [[j for j in rows if j not in gone] for rows in rows_of]
        size, match_left, match_right = max_matching(adj)
        if size == n:
            continue
        cand = tuple(hall_violator(adj, match_left, match_right))
        if best is None or (len(cand), cand) < (len(best), best):
            best = cand
            if len(best) == 1:
                break
    return best
