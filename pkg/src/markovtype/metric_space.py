"""Finite metric spaces: construction, validation and transformations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Sequence

import numpy as np

from . import arith
from .arith import DEFAULT_TOL
from .errors import (
    Disconnected,
    InvalidExponent,
    InvalidScale,
    MetricViolation,
    NotAGroup,
    NotIsometries,
    NotSurjective,
)


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """Labelled points with a validated distance matrix.

    Entries are Fractions in exact mode; a space containing any mpmath real
    is in real mode and compares distances with ``tol``. Build instances with
    :func:`from_matrix` (or any constructor below), which validates.
    """

    labels: tuple
    dist: tuple
    tol: float = DEFAULT_TOL

    def __len__(self):
        return len(self.labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def exact(self) -> bool:
        return all(arith.is_exact(v) for row in self.dist for v in row)

    @cached_property
    def _index(self) -> dict:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: Hashable) -> int:
        return self._index[label]

    def d(self, i: int, j: int):
        return self.dist[i][j]

    @cached_property
    def diam(self):
        return max((v for row in self.dist for v in row), key=float, default=Fraction(0))

    @cached_property
    def float_matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.dist], dtype=float)

    def realized_distances(self) -> list:
        """Distinct distance values, ascending (merged within tolerance)."""
        return _distinct(v for row in self.dist for v in row)

    def same_as(self, other: "FiniteMetricSpace") -> bool:
        if self.labels != other.labels:
            return False
        tol = max(self.tol, other.tol)
        return all(arith.close(a, b, tol)
                   for ra, rb in zip(self.dist, other.dist) for a, b in zip(ra, rb))

    def is_isometry(self, perm: Sequence[int]) -> bool:
        return all(arith.close(self.dist[i][j], self.dist[perm[i]][perm[j]], self.tol)
                   for i in range(self.n) for j in range(i + 1, self.n))

    def restrict(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        return _make([self.labels[i] for i in indices],
                     [[self.dist[i][j] for j in indices] for i in indices], self.tol)

    def __repr__(self):
        mode = "exact" if self.exact else "real"
        return f"FiniteMetricSpace(n={self.n}, {mode})"


def _distinct(values, tol=DEFAULT_TOL) -> list:
    vals = sorted(set(values), key=float)
    out = []
    for v in vals:
        if not out or not arith.close(out[-1], v, tol):
            out.append(v)
    return out


def _validate(dist, tol: float) -> None:
    n = len(dist)
    if any(len(row) != n for row in dist):
        raise MetricViolation("shape", (), "distance matrix is not square")
    exact = all(arith.is_exact(v) for row in dist for v in row)
    for i in range(n):
        if not arith.close(dist[i][i], 0, tol):
            raise MetricViolation("diagonal", (i, i))
    for i in range(n):
        for j in range(i + 1, n):
            a, b = dist[i][j], dist[j][i]
            if not arith.close(a, b, tol):
                raise MetricViolation("symmetry", (i, j))
            if a < 0:
                raise MetricViolation("negative", (i, j))
            if (a == 0) if exact else float(a) <= tol:
                raise MetricViolation("coincident-points", (i, j))
    if n < 3:
        return
    if exact:
        den = arith.common_denominator(v for row in dist for v in row)
        ints = [[int(v * den) for v in row] for row in dist]
        big = max(max(r) for r in ints)
        D = np.array(ints, dtype=np.int64 if big < 2 ** 61 else object)
        slack = 0
    else:
        D = np.array([[float(v) for v in row] for row in dist])
        slack = tol * max(1.0, float(D.max()))
    for j in range(n):
        bad = D > D[:, j][:, None] + D[j, :][None, :] + slack
        if bad.any():
            i, k = map(int, np.argwhere(bad)[0])
            raise MetricViolation("triangle", (i, j, k),
                                  f"d[{i}][{k}] > d[{i}][{j}] + d[{j}][{k}]")


def _make(labels, dist, tol=DEFAULT_TOL, validate=True) -> FiniteMetricSpace:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct")
    dist = tuple(tuple(arith.number(v) for v in row) for row in dist)
    if len(dist) != len(labels):
        raise MetricViolation("shape", (), "label count does not match matrix size")
    if validate:
        _validate(dist, tol)
    return FiniteMetricSpace(labels, dist, tol)


def from_matrix(labels, dist, tol: float = DEFAULT_TOL) -> FiniteMetricSpace:
    """Validated space from labels and a square distance matrix."""
    if labels is None:
        labels = range(len(dist))
    return _make(labels, dist, tol)


def _combine(parts, p):
    """(sum d_c^p)^(1/p), exact whenever the result is rational."""
    nonzero = [v for v in parts if v != 0]
    if not nonzero:
        return Fraction(0)
    if len(nonzero) == 1:
        return nonzero[0]
    if p == 1:
        return sum(nonzero[1:], nonzero[0])
    return arith.root(sum(arith.power(v, p) for v in nonzero), p)


def _check_p(p):
    p = arith.as_exponent(p)
    if p < 1:
        raise InvalidExponent(f"p must be >= 1, got {p}")
    return p


def p_product(X: FiniteMetricSpace, Y: FiniteMetricSpace, p) -> FiniteMetricSpace:
    """Cartesian product with d^p = d_X^p + d_Y^p."""
    p = _check_p(p)
    pts = list(itertools.product(range(X.n), range(Y.n)))
    labels = [(X.labels[i], Y.labels[j]) for i, j in pts]
    dist = [[_combine((X.dist[i][k], Y.dist[j][l]), p) for k, l in pts] for i, j in pts]
    return _make(labels, dist, max(X.tol, Y.tol))


def p_power(X: FiniteMetricSpace, n: int, p) -> FiniteMetricSpace:
    """n-th p-power; labels are n-tuples in lexicographic order."""
    p = _check_p(p)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return X
    pts = list(itertools.product(range(X.n), repeat=n))
    labels = [tuple(X.labels[i] for i in pt) for pt in pts]
    dist = [[_combine([X.dist[a][b] for a, b in zip(u, v)], p) for v in pts] for u in pts]
    return _make(labels, dist, X.tol)


def scale(X: FiniteMetricSpace, c) -> FiniteMetricSpace:
    c = arith.number(c)
    if c <= 0:
        raise InvalidScale(f"scale factor must be positive, got {c}")
    return _make(X.labels, [[c * v for v in row] for row in X.dist], X.tol)


def snowflake(X: FiniteMetricSpace, alpha) -> FiniteMetricSpace:
    """Replace every distance d by d**alpha, alpha in (0, 1]."""
    alpha = arith.as_exponent(alpha)
    if not 0 < alpha <= 1:
        raise InvalidExponent(f"alpha must lie in (0, 1], got {alpha}")
    if alpha == 1:
        return X
    return _make(X.labels, [[arith.power(v, alpha) for v in row] for row in X.dist], X.tol)


@dataclass(frozen=True)
class IsometryGroup:
    """A finite group of point permutations, stored as image tuples."""

    perms: tuple

    @property
    def order(self) -> int:
        return len(self.perms)

    @classmethod
    def generated_by(cls, n: int, generators) -> "IsometryGroup":
        ident = tuple(range(n))
        gens = [tuple(g) for g in generators]
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    c = compose(g, h)
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            frontier = nxt
        return cls(tuple(sorted(seen)))

    @classmethod
    def trivial(cls, n: int) -> "IsometryGroup":
        return cls((tuple(range(n)),))

    def validate(self, X: FiniteMetricSpace) -> None:
        n = X.n
        elems = set(self.perms)
        for g in self.perms:
            if sorted(g) != list(range(n)):
                raise NotAGroup(f"{g} is not a permutation of {n} points")
        if tuple(range(n)) not in elems:
            raise NotAGroup("identity missing")
        for g in self.perms:
            if inverse(g) not in elems:
                raise NotAGroup(f"inverse of {g} missing")
            for h in self.perms:
                if compose(g, h) not in elems:
                    raise NotAGroup(f"not closed under composition: {g} * {h}")
        for g in self.perms:
            if not X.is_isometry(g):
                raise NotIsometries(f"{g} does not preserve distances")

    def orbits(self, n: int) -> list:
        seen, out = set(), []
        for x in range(n):
            if x in seen:
                continue
            orb = sorted({g[x] for g in self.perms})
            seen.update(orb)
            out.append(orb)
        return out


def compose(g, h) -> tuple:
    """(g o h)(x) = g[h[x]]."""
    return tuple(g[i] for i in h)


def inverse(g) -> tuple:
    inv = [0] * len(g)
    for i, gi in enumerate(g):
        inv[gi] = i
    return tuple(inv)


def quotient_by_group(X: FiniteMetricSpace, G) -> tuple:
    """Orbit space X/G with d(a, b) = min over representatives.

    Returns ``(space, chi)`` where ``chi[i]`` is the orbit index of point i.
    Orbits are ordered by their smallest member; an orbit's label is the
    tuple of its members' labels.
    """
    if not isinstance(G, IsometryGroup):
        G = IsometryGroup(tuple(tuple(g) for g in G))
    G.validate(X)
    orbits = G.orbits(X.n)
    chi = [0] * X.n
    for k, orb in enumerate(orbits):
        for x in orb:
            chi[x] = k
    labels = [tuple(X.labels[x] for x in orb) for orb in orbits]
    dist = [[Fraction(0) if a == b else min(X.dist[x][y] for x in oa for y in ob)
             for b, ob in enumerate(orbits)] for a, oa in enumerate(orbits)]
    return _make(labels, dist, X.tol), tuple(chi)


@dataclass(frozen=True)
class MetricGraph:
    """Undirected graph with positive rational edge lengths."""

    labels: tuple
    edges: tuple  # (u, v, length) with u, v vertex indices

    def __post_init__(self):
        n = len(self.labels)
        for u, v, w in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not w > 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive length {w}")
        comp = {0} if n else set()
        stack = list(comp)
        adj = self.adjacency
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in comp:
                    comp.add(v)
                    stack.append(v)
        if len(comp) != n:
            raise Disconnected(f"graph has {n - len(comp)} vertices unreachable from {self.labels[0]!r}")

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def adjacency(self) -> list:
        """``adjacency[u]`` maps each neighbour to the shortest edge length."""
        adj = [dict() for _ in self.labels]
        for u, v, w in self.edges:
            if v not in adj[u] or w < adj[u][v]:
                adj[u][v] = adj[v][u] = w
        return adj


def metric_graph(labels, edges) -> MetricGraph:
    """Build a graph from ``(u, v)`` or ``(u, v, length)`` label tuples; unit length by default."""
    labels = tuple(labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    out = []
    for e in edges:
        u, v = e[0], e[1]
        w = arith.exact(e[2]) if len(e) > 2 else Fraction(1)
        out.append((idx[u], idx[v], w))
    return MetricGraph(labels, tuple(out))


def graph_metric(G: MetricGraph) -> FiniteMetricSpace:
    """Exact shortest-path metric (Floyd-Warshall on rationals)."""
    n = G.n
    inf = None
    D = [[Fraction(0) if i == j else inf for j in range(n)] for i in range(n)]
    for u, nbrs in enumerate(G.adjacency):
        for v, w in nbrs.items():
            D[u][v] = w
    for k in range(n):
        Dk = D[k]
        for i in range(n):
            dik = D[i][k]
            if dik is None:
                continue
            Di = D[i]
            for j in range(n):
                dkj = Dk[j]
                if dkj is not None and (Di[j] is None or dik + dkj < Di[j]):
                    Di[j] = dik + dkj
    return _make(G.labels, D)


def cycle_graph(n: int) -> MetricGraph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return MetricGraph(tuple(range(n)), tuple((i, (i + 1) % n, Fraction(1)) for i in range(n)))


def hamming_cube(d: int) -> FiniteMetricSpace:
    """{0,1}^d with the coordinate-count metric; labels are bit tuples."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    pts = list(itertools.product((0, 1), repeat=d))
    codes = np.array([int("".join(map(str, p)), 2) for p in pts])
    x = codes[:, None] ^ codes[None, :]
    counts = np.zeros_like(x)
    for b in range(d):
        counts += (x >> b) & 1
    ints = {k: Fraction(k) for k in range(d + 1)}
    dist = [[ints[int(v)] for v in row] for row in counts]
    return _make(pts, dist)


def cycle(n: int) -> FiniteMetricSpace:
    """n equally spaced points on a circle of length n, intrinsic metric."""
    if n < 3:
        raise ValueError("cycle needs n >= 3")
    return _make(range(n), [[Fraction(min(abs(i - j), n - abs(i - j))) for j in range(n)]
                            for i in range(n)])


def discrete_torus(k: int, d: int) -> FiniteMetricSpace:
    """Lattice points of (Z/k)^d with the flat-torus (l2 of cycle) distance."""
    if k < 3 or d < 1:
        raise ValueError("need k >= 3 and d >= 1")
    pts = list(itertools.product(range(k), repeat=d))

    def cyc(a, b):
        return Fraction(min(abs(a - b), k - abs(a - b)))

    dist = [[_combine([cyc(a, b) for a, b in zip(u, v)], 2) for v in pts] for u in pts]
    return _make(pts, dist)


def is_submetry(chi: Sequence[int], X: FiniteMetricSpace, Y: FiniteMetricSpace) -> bool:
    """True iff chi maps every closed ball B(x, r) onto B(chi(x), r).

    Radii range over the realized distances of X and Y, which is enough:
    both balls only change at those values.
    """
    chi = tuple(chi)
    if len(chi) != X.n or any(not 0 <= c < Y.n for c in chi):
        raise ValueError("chi must map every point of X to a point of Y")
    if set(chi) != set(range(Y.n)):
        raise NotSurjective("chi is not onto Y")
    tol = max(X.tol, Y.tol)
    radii = _distinct(X.realized_distances() + Y.realized_distances(), tol)
    for x in range(X.n):
        y0 = chi[x]
        for r in radii:
            image = {chi[z] for z in range(X.n) if arith.leq(X.dist[x][z], r, tol)}
            ball = {y for y in range(Y.n) if arith.leq(Y.dist[y0][y], r, tol)}
            if image != ball:
                return False
    return True


def diamond_graph() -> MetricGraph:
    """Four vertices x1..x4 joined pairwise except x2 - x4."""
    labels = ("x1", "x2", "x3", "x4")
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)]
    return MetricGraph(labels, tuple((u, v, Fraction(1)) for u, v in edges))


def diamond_cover_graph() -> MetricGraph:
    """A 12-cycle with chords {3,1}, {3,5}, {9,7}, {9,11} (1-based labels)."""
    labels = tuple(f"y{i}" for i in range(1, 13))
    loop = [(i, (i + 1) % 12) for i in range(12)]
    chords = [(2, 0), (2, 4), (8, 6), (8, 10)]
    return MetricGraph(labels, tuple((u, v, Fraction(1)) for u, v in loop + chords))


def diamond_cover_map() -> tuple:
    """y_i -> x_{i mod 4}, taking residues in 1..4."""
    return tuple(i % 4 for i in range(12))
