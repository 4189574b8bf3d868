"""Wasserstein distances between finitely supported measures.

Measures carry exact rational weights. For uniform measures on n atoms the
optimal coupling can be taken to be a permutation, so the distance is an
assignment problem. General rational measures are brought to a common
denominator N, where an atom of weight k/N stands for k unit atoms; the
resulting integer transport problem is solved by successive shortest
paths, which gives the same optimum as assigning the split atoms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import arith
from .assignment import min_assignment
from .errors import LengthMismatch, ResolutionTooLarge, SpaceMismatch, TooLarge
from .metric_space import FiniteMetricSpace

BRUTEFORCE_MAX = 8
DEFAULT_MAX_RESOLUTION = 10_000


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    space: FiniteMetricSpace
    support: tuple
    weights: tuple

    def __eq__(self, other):
        return (isinstance(other, EmpiricalMeasure) and self.space.same_as(other.space)
                and self.support == other.support and self.weights == other.weights)

    __hash__ = None

    def weight(self, x: int) -> Fraction:
        return dict(zip(self.support, self.weights)).get(x, Fraction(0))

    def resolution(self) -> int:
        return arith.common_denominator(self.weights)


def measure(space: FiniteMetricSpace, atoms) -> EmpiricalMeasure:
    """Measure from ``{point: weight}`` or ``[(point, weight), ...]``.

    Repeated points are merged and zero weights dropped.
    """
    items = atoms.items() if isinstance(atoms, dict) else atoms
    acc = {}
    for x, w in items:
        x = int(x)
        if not 0 <= x < space.n:
            raise IndexError(f"point {x} outside 0..{space.n - 1}")
        w = arith.exact(w)
        if w < 0:
            raise ValueError(f"negative weight at point {x}")
        acc[x] = acc.get(x, Fraction(0)) + w
    if sum(acc.values(), Fraction(0)) != 1:
        raise ValueError("weights must sum to 1")
    support = tuple(sorted(x for x, w in acc.items() if w > 0))
    return EmpiricalMeasure(space, support, tuple(acc[x] for x in support))


def dirac(space: FiniteMetricSpace, x: int) -> EmpiricalMeasure:
    return measure(space, {x: 1})


def phi_n(space: FiniteMetricSpace, w: Sequence[int]) -> EmpiricalMeasure:
    """(x_1, ..., x_n) -> (1/n) sum_i delta(x_i)."""
    if len(w) == 0:
        raise ValueError("need at least one point")
    unit = Fraction(1, len(w))
    return measure(space, [(x, unit) for x in w])


@dataclass(frozen=True)
class Coupling:
    """Transport plan: ``matrix[i][j]`` is the mass moved from mu.support[i] to nu.support[j]."""

    mu: EmpiricalMeasure
    nu: EmpiricalMeasure
    matrix: tuple

    def __post_init__(self):
        m = self.matrix
        if len(m) != len(self.mu.support) or any(len(r) != len(self.nu.support) for r in m):
            raise ValueError("coupling shape does not match the supports")
        if any(v < 0 for r in m for v in r):
            raise ValueError("coupling has a negative entry")
        if any(sum(r, Fraction(0)) != w for r, w in zip(m, self.mu.weights)):
            raise ValueError("row sums differ from the first marginal")
        cols = [sum((r[j] for r in m), Fraction(0)) for j in range(len(self.nu.support))]
        if cols != list(self.nu.weights):
            raise ValueError("column sums differ from the second marginal")

    def cost(self, p):
        """sum_ij q_ij d(x_i, y_j)^p."""
        X = self.mu.space
        terms = [q * arith.power(X.dist[x][y], p)
                 for x, r in zip(self.mu.support, self.matrix)
                 for y, q in zip(self.nu.support, r) if q]
        return _total(terms)


def _total(terms):
    if all(arith.is_exact(t) for t in terms):
        return sum(terms, Fraction(0))
    return arith.REAL.fsum(arith.real(t) for t in terms)


def _check_p(p):
    p = arith.as_exponent(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    return p


def _tuples(u, v):
    if len(u) != len(v):
        raise LengthMismatch(f"tuples of lengths {len(u)} and {len(v)}")
    if len(u) == 0:
        raise ValueError("tuples must be nonempty")


def _costs(X, u, v, p):
    return [[arith.power(X.dist[a][b], p) for b in v] for a in u]


def wp_uniform(X: FiniteMetricSpace, u: Sequence[int], v: Sequence[int], p):
    """W_p between the uniform measures on the n-tuples u and v (by assignment)."""
    _tuples(u, v)
    p = _check_p(p)
    total, _ = min_assignment(_costs(X, u, v, p))
    return arith.root(total / len(u), p)


def wp_bruteforce(X: FiniteMetricSpace, u: Sequence[int], v: Sequence[int], p):
    """Same quantity as wp_uniform by trying every permutation; n <= 8."""
    _tuples(u, v)
    p = _check_p(p)
    n = len(u)
    if n > BRUTEFORCE_MAX:
        raise TooLarge(f"n = {n} exceeds the brute-force limit {BRUTEFORCE_MAX}")
    C = _costs(X, u, v, p)
    best = min((_total([C[i][s[i]] for i in range(n)]) for s in itertools.permutations(range(n))),
               key=arith.real)
    return arith.root(best / n, p)


def symmetrized_power_distance(X: FiniteMetricSpace, w: Sequence[int], q: Sequence[int], p):
    """Distance between the classes of w and q in n^(-1/p) (X^n_p / S_n).

    That is (1/n min_s sum_i d(w_i, q_s(i))^p)^(1/p); the minimum over S_n is
    taken by enumeration for n <= 8 and by assignment beyond.
    """
    _tuples(w, q)
    p = _check_p(p)
    if len(w) <= BRUTEFORCE_MAX:
        return wp_bruteforce(X, w, q, p)
    return wp_uniform(X, w, q, p)


def split_atoms(mu: EmpiricalMeasure, N: int) -> list:
    """The N-tuple of points in which each atom of weight k/N appears k times."""
    out = []
    for x, w in zip(mu.support, mu.weights):
        k = w * N
        if k.denominator != 1:
            raise ValueError(f"weight {w} is not a multiple of 1/{N}")
        out.extend([x] * int(k))
    return out


def _transport(supply, demand, cost):
    """Min-cost integer transport by successive shortest paths.

    Returns the flow matrix. ``cost`` entries are ints or reals; residual
    shortest paths use Bellman-Ford, so negative reduced costs are fine.
    """
    m, n = len(supply), len(demand)
    flow = [[0] * n for _ in range(m)]
    left_s, left_d = list(supply), list(demand)
    real = not all(isinstance(c, int) for r in cost for c in r)
    eps = arith.REAL.mpf(10) ** (-(arith.REAL.dps - 5)) if real else 0
    while any(left_s):
        # nodes: rows 0..m-1, columns m..m+n-1; sources are rows with supply left
        INF = None
        dist = [INF] * (m + n)
        prev = [None] * (m + n)
        for i in range(m):
            if left_s[i]:
                dist[i] = 0 * cost[0][0]
        for _ in range(m + n):
            changed = False
            for i in range(m):
                if dist[i] is None:
                    continue
                for j in range(n):
                    nd = dist[i] + cost[i][j]
                    if dist[m + j] is None or nd < dist[m + j] - eps:
                        dist[m + j], prev[m + j] = nd, i
                        changed = True
            for j in range(n):
                if dist[m + j] is None:
                    continue
                for i in range(m):
                    if flow[i][j]:
                        nd = dist[m + j] - cost[i][j]
                        if dist[i] is None or nd < dist[i] - eps:
                            dist[i], prev[i] = nd, m + j
                            changed = True
            if not changed:
                break
        sink = min((j for j in range(n) if left_d[j] and dist[m + j] is not None),
                   key=lambda j: dist[m + j])
        path, node = [], m + sink
        while node is not None:
            path.append(node)
            node = prev[node]
        path.reverse()
        src = path[0]
        amount = min(left_s[src], left_d[sink])
        for a, b in zip(path, path[1:]):
            if a >= m:
                amount = min(amount, flow[b][a - m])
        for a, b in zip(path, path[1:]):
            if a < m:
                flow[a][b - m] += amount
            else:
                flow[b][a - m] -= amount
        left_s[src] -= amount
        left_d[sink] -= amount
    return flow


def optimal_coupling(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p,
                     max_resolution: int = DEFAULT_MAX_RESOLUTION):
    """``(W_p(mu, nu), coupling)`` over exact rational measures."""
    if not mu.space.same_as(nu.space):
        raise SpaceMismatch("measures live on different spaces")
    p = _check_p(p)
    N = arith.common_denominator(mu.weights + nu.weights)
    if N > max_resolution:
        raise ResolutionTooLarge(f"common denominator {N} exceeds the cap {max_resolution}")
    X = mu.space
    C = _costs(X, mu.support, nu.support, p)
    supply = [int(w * N) for w in mu.weights]
    demand = [int(w * N) for w in nu.weights]
    if all(arith.is_exact(c) for r in C for c in r):
        L = arith.common_denominator(c for r in C for c in r)
        flow = _transport(supply, demand, [[int(c * L) for c in r] for r in C])
    else:
        flow = _transport(supply, demand, [[arith.real(c) for c in r] for r in C])
    plan = Coupling(mu, nu, tuple(tuple(Fraction(k, N) for k in r) for r in flow))
    return arith.root(plan.cost(p), p), plan


def wp_rational(mu: EmpiricalMeasure, nu: EmpiricalMeasure, p,
                max_resolution: int = DEFAULT_MAX_RESOLUTION):
    """W_p(mu, nu) = (min over couplings of sum q_ij d_ij^p)^(1/p)."""
    return optimal_coupling(mu, nu, p, max_resolution)[0]


def refine(w: Sequence[int], k: int = 2) -> list:
    """Repeat every entry k times: Phi_n(w) = Phi_{kn}(refine(w, k))."""
    return [x for x in w for _ in range(k)]


def wp_matrix(measures: Iterable[EmpiricalMeasure], p) -> list:
    ms = list(measures)
    return [[wp_rational(a, b, p) for b in ms] for a in ms]
