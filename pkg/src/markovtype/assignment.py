"""Minimum-cost perfect assignment by the Hungarian method with potentials.

Works over any ordered field the costs live in (ints, Fractions, mpmath
reals), so rational cost matrices give exact optima. Exact costs are
scaled to integers first, which keeps the inner loop on Python ints.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from . import arith

_INF = float("inf")


def _hungarian(cost: Sequence[Sequence]) -> list:
    """Row-to-column assignment minimizing the total cost (O(n^3))."""
    n = len(cost)
    zero = cost[0][0] * 0
    u = [zero] * (n + 1)
    v = [zero] * (n + 1)
    match = [0] * (n + 1)  # match[j] = row assigned to column j (1-based, 0 = free)
    way = [0] * (n + 1)
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = [_INF] * (n + 1)
        used = [False] * (n + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            row = cost[i0 - 1]
            ui0 = u[i0]
            delta, j1 = _INF, 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = row[j - 1] - ui0 - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta, j1 = minv[j], j
            for j in range(n + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    perm = [0] * n
    for j in range(1, n + 1):
        perm[match[j] - 1] = j - 1
    return perm


def min_assignment(cost: Sequence[Sequence]):
    """``(total, perm)`` with perm[i] the column assigned to row i."""
    n = len(cost)
    if n == 0:
        return Fraction(0), []
    if any(len(row) != n for row in cost):
        raise ValueError("cost matrix must be square")
    if all(arith.is_exact(c) for row in cost for c in row):
        L = arith.common_denominator(c for row in cost for c in row)
        scaled = [[int(Fraction(c) * L) for c in row] for row in cost]
        perm = _hungarian(scaled)
        return Fraction(sum(scaled[i][perm[i]] for i in range(n)), L), perm
    real = [[arith.real(c) for c in row] for row in cost]
    perm = _hungarian(real)
    return arith.REAL.fsum(real[i][perm[i]] for i in range(n)), perm
