"""Stationary reversible chains, Markov walks and their energies.

All chain data is exact. Matrix powers are taken on the integer matrix
``N = L * a`` (``L`` the common denominator of ``a``), so ``a**T = N**T / L**T``
and the powers run through numpy in int64 while ``L**T`` fits, falling back
to Python integers otherwise. Rows of ``N`` sum to ``L``, which bounds every
intermediate entry by ``L**T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import arith
from .errors import (
    AsymmetricE,
    DegenerateWalk,
    IndexOutOfRange,
    NotReversible,
    NotStochastic,
    ZeroMassState,
)
from .metric_space import FiniteMetricSpace

DEFAULT_MAX_T = 64
_INT64_LIMIT = 2 ** 62


@dataclass(frozen=True, eq=False)
class ReversibleChain:
    pi: tuple
    a: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return len(self.pi)

    def __eq__(self, other):
        return isinstance(other, ReversibleChain) and self.pi == other.pi and self.a == other.a

    def __hash__(self):
        return hash((self.pi, self.a))

    def flow(self, i: int, j: int) -> Fraction:
        """pi_i * a_ij, the stationary probability of the step i -> j."""
        return self.pi[i] * self.a[i][j]

    def scaled(self):
        """``(N, L)`` with ``a = N / L`` and N an integer array."""
        if "scaled" not in self._cache:
            L = arith.common_denominator(v for row in self.a for v in row)
            N = [[int(v * L) for v in row] for row in self.a]
            dtype = np.int64 if L < _INT64_LIMIT else object
            self._cache["scaled"] = (np.array(N, dtype=dtype), L)
        return self._cache["scaled"]

    def power(self, T: int):
        """``(M, D)`` with ``a**T = M / D``; results are memoised per T."""
        key = ("pow", T)
        if key in self._cache:
            return self._cache[key]
        N, L = self.scaled()
        n = self.n
        if T == 0:
            out = (np.eye(n, dtype=np.int64), 1)
        elif T == 1:
            out = (N, L)
        else:
            half, odd = divmod(T, 2)
            M, D = self.power(half)
            obj = D * D * (L if odd else 1) >= _INT64_LIMIT
            if obj:
                M = M.astype(object)
            out_M = M @ M
            out_D = D * D
            if odd:
                out_M = out_M @ (N.astype(object) if obj else N)
                out_D *= L
            out = (out_M, out_D)
        self._cache[key] = out
        return out


def new_chain(pi, a) -> ReversibleChain:
    """Validated chain from a distribution and a transition matrix.

    Raises NotStochastic or NotReversible; entries may be ints, Fractions,
    ``"num/den"`` strings or floats (read as decimals).
    """
    pi = tuple(arith.exact(v) for v in pi)
    a = tuple(tuple(arith.exact(v) for v in row) for row in a)
    n = len(pi)
    if len(a) != n or any(len(row) != n for row in a):
        raise ValueError(f"transition matrix must be {n}x{n}")
    if any(v < 0 for v in pi) or sum(pi) != 1:
        raise NotStochastic("vector")
    for i, row in enumerate(a):
        if any(v < 0 for v in row) or sum(row) != 1:
            raise NotStochastic("matrix", i)
    for i in range(n):
        for j in range(i + 1, n):
            if pi[i] * a[i][j] != pi[j] * a[j][i]:
                raise NotReversible(i, j)
    chain = ReversibleChain(pi, a)
    assert all(sum(pi[i] * a[i][j] for i in range(n)) == pi[j] for j in range(n)), \
        "detailed balance without stationarity"
    return chain


def _check_states(chain: ReversibleChain, states) -> set:
    states = set(states)
    for s in states:
        if not (isinstance(s, (int, np.integer)) and 0 <= s < chain.n):
            raise IndexOutOfRange(f"state {s!r} outside 0..{chain.n - 1}")
    return states


def cylinder_prob(chain: ReversibleChain, *sets: Iterable[int]) -> Fraction:
    """Pr[Z_0 in S_0, ..., Z_T in S_T] by forward recursion."""
    if not sets:
        raise ValueError("need at least one state set")
    sets = [_check_states(chain, s) for s in sets]
    v = [chain.pi[i] if i in sets[0] else Fraction(0) for i in range(chain.n)]
    for S in sets[1:]:
        v = [sum((v[i] * chain.a[i][j] for i in range(chain.n) if v[i]), Fraction(0))
             if j in S else Fraction(0) for j in range(chain.n)]
    return sum(v, Fraction(0))


def cond_prob(chain: ReversibleChain, s: int, S1: Iterable[int]) -> Fraction:
    """Pr[Z_1 in S_1 | Z_0 = s]."""
    _check_states(chain, [s])
    S1 = _check_states(chain, S1)
    if chain.pi[s] == 0:
        raise ZeroMassState(f"state {s} has zero stationary mass")
    return sum((chain.a[s][j] for j in S1), Fraction(0))


def is_restricted_by(chain: ReversibleChain, E) -> bool:
    """True iff pi_x a_xy = 0 for every pair outside the symmetric relation E."""
    E = {(int(x), int(y)) for x, y in E}
    for x, y in E:
        if (y, x) not in E:
            raise AsymmetricE(f"({x}, {y}) in E but ({y}, {x}) is not")
    return all(chain.flow(x, y) == 0
               for x in range(chain.n) for y in range(chain.n) if (x, y) not in E)


@dataclass(frozen=True, eq=False)
class MarkovWalk:
    """W_t = f(Z_t): a chain pushed into a metric space by a state map."""

    chain: ReversibleChain
    space: FiniteMetricSpace
    f: tuple
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(self.f) != self.chain.n:
            raise ValueError(f"f has {len(self.f)} entries for {self.chain.n} states")
        if any(not 0 <= x < self.space.n for x in self.f):
            raise IndexOutOfRange("f maps a state outside the space")

    @property
    def exact(self) -> bool:
        return self.space.exact

    def step_distance(self, i: int, j: int):
        return self.space.dist[self.f[i]][self.f[j]]

    def cost_matrix(self, p):
        """``d(f(i), f(j))**p`` over states; memoised per p."""
        p = arith.as_exponent(p)
        key = ("cost", p)
        if key not in self._cache:
            n = self.chain.n
            self._cache[key] = [[arith.power(self.step_distance(i, j), p) for j in range(n)]
                                for i in range(n)]
        return self._cache[key]


def markov_walk(chain: ReversibleChain, space: FiniteMetricSpace, f=None) -> MarkovWalk:
    if f is None:
        f = range(chain.n)
    return MarkovWalk(chain, space, tuple(int(x) for x in f))


def energy(walk: MarkovWalk, p, T: int, max_T: int = DEFAULT_MAX_T):
    """E d(W_T, W_0)^p = sum_ij pi_i (a^T)_ij d(f i, f j)^p.

    Exact (a Fraction) when every d^p is rational, else an mpmath real.
    """
    p = arith.as_exponent(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    if T < 0:
        raise ValueError("T must be >= 0")
    if T > max_T:
        raise ValueError(f"T = {T} exceeds the cap max_T = {max_T}")
    if T == 0:
        return Fraction(0)
    chain = walk.chain
    cost = walk.cost_matrix(p)
    M, D = chain.power(T)
    Lpi = arith.common_denominator(chain.pi)
    P = np.array([int(v * Lpi) for v in chain.pi], dtype=object)
    weights = P[:, None] * M.astype(object)
    if all(arith.is_exact(v) for row in cost for v in row):
        Lc = arith.common_denominator(v for row in cost for v in row)
        C = np.array([[int(v * Lc) for v in row] for row in cost], dtype=object)
        return Fraction(int((weights * C).sum()), Lpi * Lc * D)
    n = chain.n
    total = arith.REAL.fsum(arith.real(cost[i][j]) * int(weights[i, j])
                            for i in range(n) for j in range(n) if weights[i, j])
    return total / (Lpi * D)


def ratio(walk: MarkovWalk, p, T: int, max_T: int = DEFAULT_MAX_T):
    """E_p(W, T) / (T * E_p(W, 1)); raises DegenerateWalk when the walk never moves."""
    if T < 1:
        raise ValueError("T must be >= 1")
    e1 = energy(walk, p, 1, max_T)
    if e1 == 0:
        raise DegenerateWalk("E_p(W, 1) = 0: the walk is almost surely constant")
    return energy(walk, p, T, max_T) / (T * e1)


@dataclass(frozen=True)
class StepDistanceDistribution:
    """Law of d(W_1, W_0): ascending ``(value, mass)`` pairs.

    Values realized by some state pair are listed even when their mass is 0.
    """

    items: tuple
    tol: float = arith.DEFAULT_TOL

    @property
    def masses(self) -> dict:
        return dict(self.items)

    def support(self) -> tuple:
        return tuple((v, m) for v, m in self.items if m > 0)

    def mass_at(self, value) -> Fraction:
        for v, m in self.items:
            if arith.close(v, value, self.tol):
                return m
        return Fraction(0)

    def moment(self, p):
        return sum((arith.power(v, p) * m for v, m in self.items if m), Fraction(0))

    def max_step(self):
        return max((v for v, _ in self.support()), key=float, default=Fraction(0))

    def same_law(self, other: "StepDistanceDistribution") -> bool:
        a, b = self.support(), other.support()
        tol = max(self.tol, other.tol)
        return len(a) == len(b) and all(
            arith.close(va, vb, tol) and ma == mb for (va, ma), (vb, mb) in zip(a, b))


def step_distance_distribution(walk: MarkovWalk) -> StepDistanceDistribution:
    chain = walk.chain
    tol = walk.space.tol
    pairs = sorted(((walk.step_distance(i, j), chain.flow(i, j))
                    for i in range(chain.n) for j in range(chain.n)), key=lambda t: arith.real(t[0]))
    items = []
    for v, m in pairs:
        if items and arith.close(items[-1][0], v, tol):
            items[-1][1] += m
        else:
            items.append([v, m])
    return StepDistanceDistribution(tuple((v, m) for v, m in items), tol)
