"""Random instances for property tests and experiments.

All generators take a ``numpy.random.Generator`` and return exact data.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

from .lifting import LiftSpec, lift_spec
from .markov import ReversibleChain, new_chain
from .metric_space import (
    FiniteMetricSpace,
    IsometryGroup,
    MetricGraph,
    graph_metric,
)


def random_weights(rng: np.random.Generator, n: int, max_weight: int = 6,
                   p_zero: float = 0.3) -> list:
    """Symmetric integer weights with no zero row."""
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            if rng.random() >= p_zero:
                w[i][j] = w[j][i] = int(rng.integers(1, max_weight + 1))
    for i in range(n):
        if not any(w[i]):
            j = int(rng.integers(n))
            w[i][j] = w[j][i] = 1
    return w


def random_chain(rng: np.random.Generator, n: int, max_weight: int = 6,
                 p_zero: float = 0.3) -> ReversibleChain:
    """Random walk on random symmetric weights: a generic reversible chain."""
    w = random_weights(rng, n, max_weight, p_zero)
    r = [sum(row) for row in w]
    total = sum(r)
    return new_chain([Fraction(ri, total) for ri in r],
                     [[Fraction(v, ri) for v in row] for row, ri in zip(w, r)])


def random_permutation_group(rng: np.random.Generator, n: int) -> IsometryGroup:
    """Cyclic group generated by a random permutation (trivial with some probability)."""
    if n < 2 or rng.random() < 0.15:
        return IsometryGroup.trivial(n)
    return IsometryGroup.generated_by(n, [tuple(int(v) for v in rng.permutation(n))])


def invariant_metric(rng: np.random.Generator, G: IsometryGroup, n: int,
                     max_length: int = 6, labels=None) -> FiniteMetricSpace:
    """Graph metric of a complete graph whose edge lengths are constant on G-orbits of pairs.

    G acts by graph automorphisms, hence by isometries of the resulting metric.
    """
    length = {}
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in length:
                value = Fraction(int(rng.integers(1, max_length + 1)))
                for g in G.perms:
                    a, b = sorted((g[i], g[j]))
                    length[(a, b)] = value
            edges.append((i, j, length[(i, j)]))
    labels = tuple(range(n)) if labels is None else tuple(labels)
    return graph_metric(MetricGraph(labels, tuple(edges)))


def random_metric(rng: np.random.Generator, n: int, max_length: int = 6) -> FiniteMetricSpace:
    return invariant_metric(rng, IsometryGroup.trivial(n), n, max_length)


def random_lift_spec(rng: np.random.Generator, n_base: int, max_fibre: int = 4) -> LiftSpec:
    """Random regular (sigma, E).

    Fibres get sizes in 1..max_fibre. Between fibres of sizes a and b with
    g = gcd(a, b), x ~ y iff (x - y) mod g lies in a random nonempty offset
    set; inside a fibre the offset set is closed under negation. Each x then
    has |offsets| * b / g partners in the other fibre, independent of x.
    Fibre members are relabelled at random afterwards.
    """
    sizes = [int(rng.integers(1, max_fibre + 1)) for _ in range(n_base)]
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    relabel = [int(starts[s]) + int(k) for s in range(n_base) for k in rng.permutation(sizes[s])]
    sigma = [s for s in range(n_base) for _ in range(sizes[s])]
    E = set()
    for s in range(n_base):
        for t in range(s, n_base):
            g = gcd(sizes[s], sizes[t])
            if s == t:
                offsets = set()
                while not offsets:
                    for c in range(g):
                        if rng.random() < 0.5:
                            offsets |= {c, (-c) % g}
            else:
                offsets = {c for c in range(g) if rng.random() < 0.5} or {int(rng.integers(g))}
            for x in range(sizes[s]):
                for y in range(sizes[t]):
                    if (x - y) % g in offsets:
                        u, v = relabel[starts[s] + x], relabel[starts[t] + y]
                        E.add((u, v))
                        E.add((v, u))
    return lift_spec(sigma, E, n_base)


def random_tuple(rng: np.random.Generator, n_points: int, length: int) -> tuple:
    return tuple(int(v) for v in rng.integers(0, n_points, size=length))
