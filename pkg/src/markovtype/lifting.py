"""Lifts of reversible chains and metric lifts of Markov walks.

A lift is described by a surjection ``sigma`` from the new state set onto
the old one and a symmetric relation ``E`` of allowed transitions. When
sigma is regular with respect to E, the weights

    pi~_x = pi_{sigma x} / |M_x|,   a~_xy = a_{sigma x, sigma y} / deg_E(x, M_y)  for (x, y) in E

(``M_x`` the fibre through x) define a reversible chain lifting the base
one. Quotient maps and graph coverings both produce regular (sigma, E).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import arith, linsys
from .errors import (
    AsymmetricE,
    HypothesisViolated,
    NotCovering,
    NotRegular,
    NotSurjective,
    SpaceMismatch,
)
from .markov import (
    MarkovWalk,
    ReversibleChain,
    cylinder_prob,
    markov_walk,
    new_chain,
    step_distance_distribution,
)
from .metric_space import (
    FiniteMetricSpace,
    IsometryGroup,
    MetricGraph,
    cycle_graph,
    graph_metric,
    quotient_by_group,
)


@dataclass(frozen=True)
class LiftSpec:
    sigma: tuple
    E: frozenset
    n_base: int

    @property
    def n(self) -> int:
        return len(self.sigma)

    def fibres(self) -> list:
        out = [[] for _ in range(self.n_base)]
        for x, s in enumerate(self.sigma):
            out[s].append(x)
        return out

    def neighbours(self) -> list:
        nbrs = [[] for _ in range(self.n)]
        for x, y in sorted(self.E):
            nbrs[x].append(y)
        return nbrs


def lift_spec(sigma: Sequence[int], E: Iterable, n_base: Optional[int] = None) -> LiftSpec:
    sigma = tuple(int(s) for s in sigma)
    if n_base is None:
        n_base = max(sigma) + 1 if sigma else 0
    if set(sigma) != set(range(n_base)):
        raise NotSurjective(f"sigma does not cover all {n_base} base states")
    E = frozenset((int(x), int(y)) for x, y in E)
    for x, y in E:
        if not (0 <= x < len(sigma) and 0 <= y < len(sigma)):
            raise ValueError(f"pair ({x}, {y}) references a missing state")
        if (y, x) not in E:
            raise AsymmetricE(f"({x}, {y}) in E but ({y}, {x}) is not")
    return LiftSpec(sigma, E, n_base)


def deg(x: int, V: Iterable[int], E) -> int:
    """Number of y in V with (x, y) in E."""
    return sum(1 for y in set(V) if (x, y) in E)


def _degree_table(spec: LiftSpec) -> list:
    table = [[0] * spec.n_base for _ in range(spec.n)]
    for x, y in spec.E:
        table[x][spec.sigma[y]] += 1
    return table


def is_regular(spec: LiftSpec, Z: Optional[ReversibleChain] = None) -> bool:
    """Within each fibre, every state has the same E-degree into each fibre.

    A fibre may see another fibre with degree zero (the C_8 -> C_4 cover has
    no edges between opposite fibres). Given a base chain Z, the degree must
    be nonzero wherever Z moves between the two base states.
    """
    table = _degree_table(spec)
    for s, fibre in enumerate(spec.fibres()):
        first = table[fibre[0]]
        if any(table[x] != first for x in fibre[1:]):
            return False
        if Z is not None and any(Z.a[s][t] and first[t] == 0 for t in range(spec.n_base)):
            return False
    return True


def lift_chain(Z: ReversibleChain, spec: LiftSpec) -> ReversibleChain:
    if Z.n != spec.n_base:
        raise ValueError(f"base chain has {Z.n} states, lift spec expects {spec.n_base}")
    if not is_regular(spec, Z):
        raise NotRegular("sigma is not regular with respect to E")
    fibres = spec.fibres()
    table = _degree_table(spec)
    sigma = spec.sigma
    pi = [Z.pi[sigma[x]] / len(fibres[sigma[x]]) for x in range(spec.n)]
    a = [[Fraction(0)] * spec.n for _ in range(spec.n)]
    for x, y in spec.E:
        a[x][y] = Z.a[sigma[x]][sigma[y]] / table[x][sigma[y]]
    return new_chain(pi, a)


def _fibres_of(sigma, n_base):
    out = [[] for _ in range(n_base)]
    for x, s in enumerate(sigma):
        out[s].append(x)
    return out


def verify_lift(Zt: ReversibleChain, Z: ReversibleChain, sigma: Sequence[int]) -> bool:
    """Check the two local conditions that make Zt a lift of Z along sigma.

    Fibre masses must match pi, and from every state of positive mass the
    probability of stepping into the fibre over s2 must equal the base
    transition probability. Zero-mass states are never visited and are
    skipped.
    """
    sigma = tuple(sigma)
    if len(sigma) != Zt.n or any(not 0 <= s < Z.n for s in sigma):
        return False
    fibres = _fibres_of(sigma, Z.n)
    if any(sum((Zt.pi[x] for x in fib), Fraction(0)) != Z.pi[s] for s, fib in enumerate(fibres)):
        return False
    return simplechain_condition(Zt, Z, sigma)


def simplechain_condition(Zt: ReversibleChain, Z: ReversibleChain, sigma: Sequence[int]) -> bool:
    """P~(x, sigma^-1(s2)) == P(sigma(x), {s2}) for every x of positive mass."""
    fibres = _fibres_of(tuple(sigma), Z.n)
    for x in range(Zt.n):
        if Zt.pi[x] == 0:
            continue
        row = Zt.a[x]
        base = Z.a[sigma[x]]
        for s2, fib in enumerate(fibres):
            if sum((row[y] for y in fib), Fraction(0)) != base[s2]:
                return False
    return True


def masslemma_check(Zt: ReversibleChain, Z: ReversibleChain, sigma: Sequence[int],
                    S1: Iterable[int], S2: Iterable[int], s1: int, s2: int) -> bool:
    """Compare A~(S1) / A({s1}) with A~(S2) / A({s2}).

    The comparison is only meaningful under the blocking hypotheses: no flow
    from S1 into the rest of the fibre over s2, none from S2 into the rest of
    the fibre over s1, and a positive base flow s1 -> s2. Any failed
    precondition raises HypothesisViolated naming it.
    """
    sigma = tuple(sigma)
    S1, S2 = set(S1), set(S2)
    fib1 = {x for x, s in enumerate(sigma) if s == s1}
    fib2 = {x for x, s in enumerate(sigma) if s == s2}
    if not S1 <= fib1:
        raise HypothesisViolated("S1-in-fibre", "S1 is not contained in the fibre over s1")
    if not S2 <= fib2:
        raise HypothesisViolated("S2-in-fibre", "S2 is not contained in the fibre over s2")
    if cylinder_prob(Z, {s1}, {s2}) == 0:
        raise HypothesisViolated("base-flow", "base chain has no flow from s1 to s2")
    if S1 and fib2 - S2 and cylinder_prob(Zt, S1, fib2 - S2) != 0:
        raise HypothesisViolated("block-1", "S1 leaks into the fibre over s2 outside S2")
    if S2 and fib1 - S1 and cylinder_prob(Zt, S2, fib1 - S1) != 0:
        raise HypothesisViolated("block-2", "S2 leaks into the fibre over s1 outside S1")
    m1 = cylinder_prob(Zt, S1) if S1 else Fraction(0)
    m2 = cylinder_prob(Zt, S2) if S2 else Fraction(0)
    return m1 / Z.pi[s1] == m2 / Z.pi[s2]


@dataclass(frozen=True)
class LiftedWalk:
    """A walk produced by a lift construction, with the data that built it."""

    walk: MarkovWalk
    sigma: tuple
    chi: tuple
    spec: LiftSpec


def _induced_sigma(Wt: MarkovWalk, W: MarkovWalk, chi):
    where = defaultdict(list)
    for s, x in enumerate(W.f):
        where[x].append(s)
    sigma = []
    for x in Wt.f:
        candidates = where.get(chi[x], [])
        if len(candidates) != 1:
            return None
        sigma.append(candidates[0])
    return tuple(sigma)


def verify_metric_lift(Wt: MarkovWalk, W: MarkovWalk, chi: Sequence[int],
                       sigma: Optional[Sequence[int]] = None) -> bool:
    """Lift conditions, chi o f~ = f o sigma, and equal one-step distance laws.

    Without ``sigma`` the state map is induced through chi, which requires
    the base map f to be injective on the points Wt visits.
    """
    chi = tuple(chi)
    if sigma is None:
        sigma = _induced_sigma(Wt, W, chi)
        if sigma is None:
            return False
    sigma = tuple(sigma)
    if not verify_lift(Wt.chain, W.chain, sigma):
        return False
    if any(chi[Wt.f[x]] != W.f[sigma[x]] for x in range(Wt.chain.n)):
        return False
    return step_distance_distribution(Wt).same_law(step_distance_distribution(W))


def _lift_states(W: MarkovWalk, chi: Sequence[int], n_points: int):
    """States (s, x) with chi(x) = f(s), in s-major order."""
    over = defaultdict(list)
    for x in range(n_points):
        over[chi[x]].append(x)
    states = [(s, x) for s, fs in enumerate(W.f) for x in over[fs]]
    return states


def quotient_lift_walk(W: MarkovWalk, X: FiniteMetricSpace, G,
                       chi: Optional[Sequence[int]] = None) -> LiftedWalk:
    """Metric lift of a walk on X/G to X.

    Lifted states are pairs (s, x) over the orbit f(s); E keeps the pairs
    whose points realize the quotient distance of their images.
    """
    Q, chi0 = quotient_by_group(X, G)
    if chi is not None and tuple(chi) != chi0:
        raise SpaceMismatch("chi is not the orbit projection of G")
    if not W.space.same_as(Q):
        raise SpaceMismatch("walk does not live on the quotient X/G")
    states = _lift_states(W, chi0, X.n)
    sigma = tuple(s for s, _ in states)
    ft = tuple(x for _, x in states)
    tol = max(X.tol, Q.tol)
    E = [(i, j) for i, (si, xi) in enumerate(states) for j, (sj, xj) in enumerate(states)
         if arith.close(X.dist[xi][xj], Q.dist[W.f[si]][W.f[sj]], tol)]
    spec = lift_spec(sigma, E, W.chain.n)
    chain = lift_chain(W.chain, spec)
    return LiftedWalk(markov_walk(chain, X, ft), sigma, chi0, spec)


def check_covering(cover: MetricGraph, base: MetricGraph, vertex_map: Sequence[int]) -> None:
    """Raise NotCovering unless vertex_map is locally bijective on edge stars."""
    c = tuple(vertex_map)
    if len(c) != cover.n or any(not 0 <= v < base.n for v in c):
        raise NotCovering("vertex map must send every cover vertex to a base vertex")
    if set(c) != set(range(base.n)):
        raise NotCovering("vertex map is not onto")
    for v in range(cover.n):
        star = sorted((c[w], length) for w, length in cover.adjacency[v].items())
        target = sorted(base.adjacency[c[v]].items())
        if star != target:
            raise NotCovering(f"edge star at cover vertex {v} does not map bijectively "
                              f"onto the star at base vertex {c[v]}")


def _lex_geodesic(base: MetricGraph, D, u: int, v: int) -> list:
    """Lexicographically smallest shortest vertex path from u to v."""
    path = [u]
    while path[-1] != v:
        w = path[-1]
        path.append(min(y for y, length in base.adjacency[w].items() if length + D[y][v] == D[w][v]))
    return path


def _lift_path(cover: MetricGraph, c, start: int, path: Sequence[int]) -> int:
    x = start
    for y in path[1:]:
        x = next(z for z in cover.adjacency[x] if c[z] == y)
    return x


def covering_lift_walk(W: MarkovWalk, cover: MetricGraph, base: MetricGraph,
                       vertex_map: Sequence[int]) -> LiftedWalk:
    """Metric lift of a vertex-valued walk along a covering of metric graphs.

    For each unordered pair of base vertices the lexicographically smallest
    shortest path is fixed (oriented from the smaller vertex); E holds the
    lifted state pairs joined by the lift of that path.
    """
    c = tuple(vertex_map)
    check_covering(cover, base, c)
    Y = graph_metric(base)
    if not W.space.same_as(Y):
        raise SpaceMismatch("walk does not live on the metric of the base graph")
    X = graph_metric(cover)
    states = _lift_states(W, c, cover.n)
    sigma = tuple(s for s, _ in states)
    ft = tuple(x for _, x in states)
    D = Y.dist
    paths = {}
    by_point = defaultdict(list)
    for i, (_, x) in enumerate(states):
        by_point[x].append(i)
    E = set()
    for i, (si, xi) in enumerate(states):
        for sj in range(W.chain.n):
            u, v = W.f[si], W.f[sj]
            key = (min(u, v), max(u, v))
            if key not in paths:
                paths[key] = _lex_geodesic(base, D, *key)
            path = paths[key] if u <= v else paths[key][::-1]
            end = _lift_path(cover, c, xi, path)
            for j in by_point[end]:
                if sigma[j] == sj:
                    E.add((i, j))
    spec = lift_spec(sigma, E, W.chain.n)
    chain = lift_chain(W.chain, spec)
    return LiftedWalk(markov_walk(chain, X, ft), sigma, c, spec)


def cyclic_cover(n: int, k: int):
    """The k-fold covering C_{kn} -> C_n, i -> i mod n, as graphs plus vertex map."""
    return cycle_graph(k * n), cycle_graph(n), tuple(i % n for i in range(k * n))


DIAMOND_PI = (Fraction(3, 10), Fraction(2, 10), Fraction(3, 10), Fraction(2, 10))
DIAMOND_A = (
    (Fraction(0), Fraction(1, 3), Fraction(1, 3), Fraction(1, 3)),
    (Fraction(1, 2), Fraction(0), Fraction(1, 2), Fraction(0)),
    (Fraction(1, 3), Fraction(1, 3), Fraction(0), Fraction(1, 3)),
    (Fraction(1, 2), Fraction(0), Fraction(1, 2), Fraction(0)),
)


def diamond_chain() -> ReversibleChain:
    """The reversible chain on the diamond graph whose walk has no metric lift."""
    return new_chain(DIAMOND_PI, DIAMOND_A)


def cantlift_system(p: Sequence = DIAMOND_PI, split_constraint: bool = True) -> linsys.LinearSystem:
    """Mass constraints any metric lift to the 12-vertex cover would satisfy.

    Variables q_1..q_12 are the stationary masses sitting over the cover
    vertices y_1..y_12, and p_i the base masses. Consecutive loop vertices
    have proportional masses, q_i / p_{r(i)} = q_{i+1} / p_{r(i+1)}; each
    fibre carries its base mass; and the chord vertex y_3, whose only
    neighbours over x_1 are y_1 and y_5, forces q_3 = q_1 + q_5.
    """
    p = [arith.exact(v) for v in p]
    r = [i % 4 for i in range(12)]
    names = [f"q{i}" for i in range(1, 13)]
    system = linsys.LinearSystem(12, names=names)
    for i in range(11):
        system.add_eq({i: p[r[i + 1]], i + 1: -p[r[i]]}, 0)
    for s in range(4):
        system.add_eq({j: 1 for j in range(12) if r[j] == s}, p[s])
    if split_constraint:
        system.add_eq({2: 1, 0: -1, 4: -1}, 0)
    system.add_nonnegativity()
    return system


def cantlift_analysis(p: Sequence = DIAMOND_PI, split_constraint: bool = True) -> linsys.FeasibilityResult:
    return linsys.solve(cantlift_system(p, split_constraint))


def cantlift_certificate() -> linsys.InfeasibilityCertificate:
    """Verified proof that the diamond-graph walk admits no metric lift along the 12-cover."""
    result = cantlift_analysis()
    if result.feasible or not result.certificate.verify():
        raise AssertionError("expected a verified infeasibility certificate")
    return result.certificate
