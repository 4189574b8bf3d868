"""Lower bounds for Markov type constants by searching over reversible chains.

Every stationary reversible chain with full-support pi is the random walk
on a symmetric nonnegative weight matrix w: r_i = sum_j w_ij,
pi_i = r_i / sum(r), a_ij = w_ij / r_i. The walk ratio is invariant under
scaling w, so the search runs over the simplex of upper-triangular
(diagonal included) weight vectors theta.

The search itself is in floating point. Each final candidate is rounded to
rationals with bounded denominator and re-scored exactly, and only exact
values are reported, so every reported ratio is a sound lower bound for
M_p(X, T)^p.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import arith
from .errors import DegenerateWalk, IsolatedState, TooManyParameters
from .markov import MarkovWalk, ReversibleChain, markov_walk, new_chain, ratio
from .metric_space import FiniteMetricSpace

log = logging.getLogger(__name__)

MAX_GRID_PARAMETERS = 6


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    copies: int = 1
    seed: int = 1
    max_T: int = 8
    max_iter: int = 400
    patience: int = 50
    tol: float = 1e-10
    fd_step: float = 1e-6
    max_denominator: int = 10 ** 6
    workers: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizerConfig":
        keys = {"maxT": "max_T", "maxIter": "max_iter", "maxDenominator": "max_denominator"}
        return cls(**{keys.get(k, k): v for k, v in d.items()})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["maxT"] = d.pop("max_T")
        return d


# ---------------------------------------------------------------- weights

def upper_indices(n: int):
    """Row and column indices of the upper triangle including the diagonal."""
    return np.triu_indices(n)


def weights_from_theta(theta: Sequence, n: int) -> list:
    """Symmetric n x n matrix (nested lists) from an upper-triangle vector."""
    w = [[0] * n for _ in range(n)]
    for v, i, j in zip(theta, *upper_indices(n)):
        w[i][j] = w[j][i] = v
    return w


def chain_from_weights(w) -> ReversibleChain:
    """Random walk on the symmetric weight matrix w (exact)."""
    w = [[arith.exact(v) for v in row] for row in w]
    n = len(w)
    if any(len(row) != n for row in w):
        raise ValueError("weight matrix must be square")
    for i in range(n):
        for j in range(n):
            if w[i][j] < 0:
                raise ValueError(f"negative weight at ({i}, {j})")
            if w[i][j] != w[j][i]:
                raise ValueError(f"weights not symmetric at ({i}, {j})")
    r = [sum(row, Fraction(0)) for row in w]
    for i, ri in enumerate(r):
        if ri == 0:
            raise IsolatedState(f"state {i} has no weight")
    total = sum(r)
    return new_chain([ri / total for ri in r], [[v / ri for v in row] for row, ri in zip(w, r)])


def objective(w, f: Sequence[int], X: FiniteMetricSpace, p, T: int, max_T: int = 64):
    """Exact walk ratio E_p(W, T) / (T E_p(W, 1)) for the walk on weights w."""
    return ratio(markov_walk(chain_from_weights(w), X, f), p, T, max_T)


# ---------------------------------------------------------------- float search

class _FloatObjective:
    """Batched floating-point ratio over theta vectors."""

    def __init__(self, X: FiniteMetricSpace, f: Sequence[int], p, T: int):
        self.n = len(f)
        self.T = T
        D = X.float_matrix[np.ix_(f, f)]
        self.C = D ** float(p)
        self.iu = upper_indices(self.n)

    def weights(self, thetas: np.ndarray) -> np.ndarray:
        W = np.zeros((thetas.shape[0], self.n, self.n))
        W[:, self.iu[0], self.iu[1]] = thetas
        W[:, self.iu[1], self.iu[0]] = thetas
        return W

    def __call__(self, thetas: np.ndarray) -> np.ndarray:
        W = self.weights(np.atleast_2d(thetas))
        r = W.sum(axis=2)
        total = r.sum(axis=1)
        isolated = r <= 0
        A = W / np.where(isolated, 1.0, r)[:, :, None]
        A[:, np.arange(self.n), np.arange(self.n)] += isolated
        pi = r / total[:, None]
        e1 = np.einsum("bij,ij->b", W, self.C) / total
        P = np.linalg.matrix_power(A, self.T)
        eT = np.einsum("bi,bij,ij->b", pi, P, self.C)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = eT / (self.T * e1)
        return np.where((e1 > 1e-300) & np.isfinite(out), out, -np.inf)

    def gradient(self, theta: np.ndarray, h: float) -> np.ndarray:
        m = theta.size
        lo = np.minimum(theta, h)
        batch = np.repeat(theta[None, :], 2 * m, axis=0)
        batch[np.arange(m), np.arange(m)] += h
        batch[m + np.arange(m), np.arange(m)] -= lo
        vals = self(batch)
        with np.errstate(invalid="ignore"):
            g = (vals[:m] - vals[m:]) / (h + lo)
        return np.where(np.isfinite(g), g, 0.0)


def _project(theta: np.ndarray, floor: float) -> np.ndarray:
    theta = np.clip(theta, 0.0, None)
    s = theta.sum()
    if s <= 0:
        return np.full_like(theta, 1.0 / theta.size)
    theta = theta / s
    theta[theta < floor] = 0.0
    s = theta.sum()
    return theta / s if s > 0 else np.full_like(theta, 1.0 / theta.size)


def _ascend(obj: _FloatObjective, theta0: np.ndarray, cfg: OptimizerConfig):
    floor = 1.0 / cfg.max_denominator
    theta = _project(theta0, floor)
    val = obj(theta)[0]
    history = [val]
    eta = 0.1
    it = 0
    for it in range(1, cfg.max_iter + 1):
        g = obj.gradient(theta, cfg.fd_step)
        gmax = np.abs(g).max()
        if not np.isfinite(val) or gmax == 0:
            break
        cand = _project(theta + eta * g / gmax, floor)
        cval = obj(cand)[0]
        if cval > val:
            theta, val = cand, cval
            eta = min(2 * eta, 1.0)
        else:
            eta /= 2
            if eta < 1e-14:
                break
        history.append(val)
        if it >= cfg.patience and val - history[-1 - cfg.patience] < cfg.tol:
            break
    return theta, val, it


# ---------------------------------------------------------------- seeds

def nearest_neighbour_theta(X: FiniteMetricSpace, f: Sequence[int]) -> np.ndarray:
    """Unit weight on pairs of states whose points are nearest distinct neighbours."""
    n = len(f)
    D = X.float_matrix[np.ix_(f, f)]
    w = np.zeros((n, n))
    for i in range(n):
        positive = D[i][D[i] > 0]
        if positive.size:
            w[i, np.isclose(D[i], positive.min(), rtol=1e-12, atol=0)] = 1.0
    w = np.maximum(w, w.T)
    theta = w[upper_indices(n)]
    return theta / theta.sum()


def seed_theta(r: int, X: FiniteMetricSpace, f: Sequence[int], seed: int) -> np.ndarray:
    m = len(f) * (len(f) + 1) // 2
    if r == 0:
        return np.full(m, 1.0 / m)
    if r == 1:
        return nearest_neighbour_theta(X, f)
    return np.random.default_rng([seed, r]).dirichlet(np.ones(m))


# ---------------------------------------------------------------- exact scoring

def rationalize(theta: np.ndarray, max_denominator: int) -> tuple:
    q = [Fraction(float(v)).limit_denominator(max_denominator) for v in theta]
    total = sum(q)
    return tuple(v / total for v in q)


def _exact_walk(theta, f, X):
    """Walk for an exact theta, with weightless states removed."""
    n = len(f)
    w = weights_from_theta(theta, n)
    keep = [i for i in range(n) if any(w[i])]
    w = [[w[i][j] for j in keep] for i in keep]
    return markov_walk(chain_from_weights(w), X, [f[i] for i in keep]), keep


def _support_key(theta) -> tuple:
    return (sum(1 for v in theta if v), tuple(theta))


@dataclass
class RestartRecord:
    index: int
    kind: str
    iterations: int
    float_ratio: float
    exact_ratio: Optional[object] = None


@dataclass
class Candidate:
    theta: tuple
    walk: MarkovWalk
    states: list
    ratio: object


@dataclass
class OptimizerReport:
    p: object
    T: int
    f: tuple
    weights: list
    walk: MarkovWalk
    ratio: object
    bound: object
    restarts: list = field(default_factory=list)
    seed_ratio: Optional[object] = None

    def verify(self) -> bool:
        """Re-evaluate the reported ratio exactly on the stored walk."""
        return arith.close(ratio(self.walk, self.p, self.T, max(self.T, 64)), self.ratio, 1e-9)


def _run_restart(args):
    X, f, p, T, cfg, r, theta0, kind = args
    obj = _FloatObjective(X, f, p, T)
    theta, val, it = _ascend(obj, np.asarray(theta0, dtype=float), cfg)
    return r, kind, theta, float(val), it


def _score(theta, f, X, p, T, max_T) -> Optional[Candidate]:
    try:
        walk, keep = _exact_walk(theta, f, X)
        value = ratio(walk, p, T, max_T)
    except (DegenerateWalk, IsolatedState):
        return None
    return Candidate(tuple(theta), walk, keep, value)


def _better(a: Candidate, b: Optional[Candidate]) -> bool:
    if b is None:
        return True
    if not arith.close(a.ratio, b.ratio, 0):
        return arith.real(a.ratio) > arith.real(b.ratio)
    return _support_key(a.theta) < _support_key(b.theta)


def maximize(X: FiniteMetricSpace, f: Optional[Sequence[int]] = None, p=2, T: int = 2,
             config: Optional[OptimizerConfig] = None, seeds: Sequence = ()) -> OptimizerReport:
    """Multi-start projected gradient ascent of the walk ratio.

    ``seeds`` adds exact starting weight matrices (over the expanded state
    set); they are scored exactly and always compete in the final choice.
    """
    cfg = config or OptimizerConfig()
    if X.n < 2:
        raise ValueError("need at least two points")
    if T > cfg.max_T:
        raise ValueError(f"T = {T} exceeds maxT = {cfg.max_T}")
    p = arith.as_exponent(p)
    base = tuple(range(X.n)) if f is None else tuple(int(x) for x in f)
    f = tuple(x for x in base for _ in range(cfg.copies))
    n = len(f)

    starts = []
    for r in range(cfg.restarts):
        kind = "uniform" if r == 0 else "nearest" if r == 1 else "dirichlet"
        starts.append((X, f, p, T, cfg, r, seed_theta(r, X, f, cfg.seed), kind))
    iu = upper_indices(n)
    for k, w in enumerate(seeds):
        theta = [arith.exact(w[i][j]) for i, j in zip(*iu)]
        starts.append((X, f, p, T, cfg, cfg.restarts + k, [float(v) for v in theta], "given"))

    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            runs = list(pool.map(_run_restart, starts))
    else:
        runs = [_run_restart(s) for s in starts]
    runs.sort(key=lambda t: t[0])

    # exact seeds always compete, so the result never falls below them
    exact_seeds = []
    for s in starts:
        r, kind, theta0 = s[5], s[7], s[6]
        if kind == "given":
            th = tuple(arith.exact(w) for w in (seeds[r - cfg.restarts][i][j] for i, j in zip(*iu)))
            total = sum(th)
            exact_seeds.append(tuple(v / total for v in th))
        elif kind in ("uniform", "nearest"):
            exact_seeds.append(rationalize(np.asarray(theta0), cfg.max_denominator))

    records = [RestartRecord(r, kind, it, val) for r, kind, _, val, it in runs]
    rounded = [rationalize(theta, cfg.max_denominator) for _, _, theta, _, _ in runs]
    obj = _FloatObjective(X, f, p, T)
    float_vals = obj(np.array([[float(v) for v in th] for th in rounded]))
    top = float_vals.max()
    best: Optional[Candidate] = None
    seed_best = None
    scored = {}
    to_score = [(th, None) for th in exact_seeds]
    to_score += [(th, k) for k, th in enumerate(rounded)
                 if np.isfinite(float_vals[k]) and float_vals[k] >= top - 1e-9 * max(1.0, abs(top))]
    for th, k in to_score:
        if th not in scored:
            scored[th] = _score(th, f, X, p, T, cfg.max_T)
        cand = scored[th]
        if cand is None:
            continue
        if k is None:
            if seed_best is None or arith.real(cand.ratio) > arith.real(seed_best):
                seed_best = cand.ratio
        else:
            records[k].exact_ratio = cand.ratio
        if _better(cand, best):
            best = cand
    if best is None:
        raise DegenerateWalk("every candidate walk is degenerate")
    w = weights_from_theta(best.theta, n)
    return OptimizerReport(p=p, T=T, f=f, weights=w, walk=best.walk, ratio=best.ratio,
                           bound=arith.root(best.ratio, p), restarts=records, seed_ratio=seed_best)


# ---------------------------------------------------------------- grid oracle

@dataclass
class GridResult:
    ratio: object
    weights: list
    points: int


GRID_BASE = Fraction(6, 5)


def _symmetric_states(X: FiniteMetricSpace, f: Sequence[int]) -> bool:
    """True when every permutation of the states preserves the distance matrix."""
    D = X.float_matrix[np.ix_(f, f)]
    off = D[~np.eye(len(f), dtype=bool)]
    return off.size == 0 or bool(np.all(off == off[0]))


def exhaustive_small(X: FiniteMetricSpace, f: Optional[Sequence[int]] = None, p=2, T: int = 2,
                     grid_resolution: int = 200) -> GridResult:
    """Brute-force maximum of the ratio over a geometric lattice in the weight simplex.

    Lattice points are theta_k proportional to rho**c_k with nonnegative
    integers c summing to ``grid_resolution - 1`` and rho = 6/5, so weights
    range over ratios up to rho**(R - 1); resolution 1 is the uniform matrix
    alone. The best lattice point is re-scored exactly.
    """
    from ._grid import grid_search

    f = tuple(range(X.n)) if f is None else tuple(int(x) for x in f)
    n = len(f)
    m = n * (n + 1) // 2
    if m > MAX_GRID_PARAMETERS:
        raise TooManyParameters(f"{m} free weights, the grid handles at most {MAX_GRID_PARAMETERS}")
    if grid_resolution < 1:
        raise ValueError("grid_resolution must be >= 1")
    C = X.float_matrix[np.ix_(f, f)] ** float(p)
    iu = upper_indices(n)
    diag = np.array([k for k, (i, j) in enumerate(zip(*iu)) if i == j], dtype=np.int64)
    sym = _symmetric_states(X, f)
    best_c, points = grid_search(C, int(T), m, grid_resolution - 1, float(GRID_BASE),
                                 iu[0].astype(np.int64), iu[1].astype(np.int64), diag, sym)
    best_c = [int(c) for c in best_c]
    top = max(best_c)
    theta = [GRID_BASE ** (c - top) for c in best_c]
    total = sum(theta)
    theta = [v / total for v in theta]
    w = weights_from_theta(theta, n)
    return GridResult(objective(w, f, X, p, T, max(T, 64)), w, int(points))
