"""Experiment suites behind ``markovtype exp``.

Each function returns an ``ExperimentReport``: a list of row dicts (ready
for CSV), a list of asserted inequalities with their outcome, and notes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import arith, lifting, markov, sampling, wasserstein
from .errors import DegenerateWalk
from .metric_space import cycle, cycle_graph, graph_metric, hamming_cube
from .optimizer import OptimizerConfig, maximize

log = logging.getLogger(__name__)


@dataclass
class ExperimentReport:
    name: str
    rows: list = field(default_factory=list)
    checks: list = field(default_factory=list)  # (description, passed)
    notes: list = field(default_factory=list)

    def check(self, description: str, passed: bool) -> bool:
        self.checks.append((description, bool(passed)))
        return passed

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.checks)


def simple_walk_weights(X, f=None) -> list:
    """Unit weights between states whose points are at the smallest positive distance."""
    f = tuple(range(X.n)) if f is None else tuple(f)
    n = len(f)
    w = [[0] * n for _ in range(n)]
    for i in range(n):
        row = [X.dist[f[i]][f[j]] for j in range(n)]
        step = min((v for v in row if v > 0), key=arith.real)
        for j in range(n):
            if arith.close(row[j], step, X.tol):
                w[i][j] = w[j][i] = 1
    return w


def _walk_from_weights(w, X, f=None):
    from .optimizer import chain_from_weights
    return markov.markov_walk(chain_from_weights(w), X, f)


def experiment_torus(ns: Sequence[int] = (4, 6, 8), ks: Sequence[int] = (2, 3),
                     Ts: Sequence[int] = (2, 3, 4), config: Optional[OptimizerConfig] = None,
                     tol: float = 1e-6) -> ExperimentReport:
    """Optimized and simple walks on cycle(n), lifted along the k-fold covers cycle(kn) -> cycle(n).

    The cover, rescaled by 1/k, is a finer sampling of the same circle; the
    ratio is scale invariant, so the lift's ratio is reported as is.
    """
    cfg = config or OptimizerConfig(restarts=8)
    rep = ExperimentReport("torus")
    rep.notes.append("observed maxima only; no convergence rate in n is asserted")
    for n in ns:
        base_graph = cycle_graph(n)
        Y = graph_metric(base_graph)
        identity = markov.markov_walk(markov.new_chain([Fraction(1, n)] * n,
                                                       [[int(i == j) for j in range(n)] for i in range(n)]), Y)
        for T in Ts:
            walks = {"simple": _walk_from_weights(simple_walk_weights(Y), Y),
                     "optimized": maximize(Y, None, 2, T, cfg).walk,
                     "identity": identity}
            for kind, W in walks.items():
                try:
                    base = markov.ratio(W, 2, T)
                except DegenerateWalk as exc:
                    log.info("skipping %s walk on cycle(%d): %s", kind, n, exc)
                    rep.notes.append(f"cycle({n}) T={T} {kind}: skipped, DegenerateWalk")
                    continue
                for k in ks:
                    cover, _, vmap = lifting.cyclic_cover(n, k)
                    lifted = lifting.covering_lift_walk(W, cover, base_graph, vmap).walk
                    up = markov.ratio(lifted, 2, T)
                    rep.rows.append({"n": n, "k": k, "T": T, "walk": kind,
                                     "base_ratio": base, "lifted_ratio": up})
                    rep.check(f"cycle({n}) T={T} {kind} k={k}: lifted >= base", up >= base)
                    rep.check(f"cycle({n}) T={T} {kind} k={k}: ratios <= 1 + {tol}",
                              arith.leq(up, 1 + Fraction(tol)) and arith.leq(base, 1 + Fraction(tol)))
    return rep


def hamming_simple_ratio(d: int, T: Optional[int] = None) -> Fraction:
    """Exact ratio of the nearest-neighbour walk on the Hamming cube at time T (default d)."""
    X = hamming_cube(d)
    return markov.ratio(_walk_from_weights(simple_walk_weights(X), X), 2, d if T is None else T)


def experiment_hamming(dmax: int = 6, optimize_up_to: int = 3,
                       config: Optional[OptimizerConfig] = None) -> ExperimentReport:
    """Simple-walk and optimized ratios at T = d on the Hamming cubes."""
    if dmax > 10:
        raise ValueError("dmax must be <= 10")
    cfg = config or OptimizerConfig(restarts=4, max_iter=100)
    rep = ExperimentReport("hamming")
    simple_at = {}
    for d in range(1, dmax + 1):
        simple = hamming_simple_ratio(d)
        best = simple
        if d <= optimize_up_to:
            X = hamming_cube(d)
            best = maximize(X, None, 2, d, cfg, seeds=[simple_walk_weights(X)]).ratio
        # the cube is bipartite, so T = d has the parity of d; compare within even d
        prev = simple_at.get(d - 2) if d % 2 == 0 else None
        rep.rows.append({"d": d, "T": d, "simple_ratio": simple, "optimized_ratio": best,
                         "increasing_vs_d_minus_2": None if prev is None else simple > prev})
        if prev is not None:
            rep.check(f"d={d}: simple ratio exceeds d={d - 2}", simple > prev)
        if d >= 4 and d % 2 == 0:
            rep.check(f"d={d}: simple ratio > 1", simple > 1)
        rep.check(f"d={d}: optimized >= simple", best >= simple)
        simple_at[d] = simple
    if dmax >= 2:
        c4 = cycle(4)
        rep.check("d=2 equals the cycle(4) simple-walk ratio at T=2",
                  rep.rows[1]["simple_ratio"] == markov.ratio(
                      _walk_from_weights(simple_walk_weights(c4), c4), 2, 2))
    return rep


def experiment_cantlift() -> ExperimentReport:
    rep = ExperimentReport("cantlift")
    result = lifting.cantlift_analysis()
    cert = result.certificate
    verified = (not result.feasible) and cert.verify()
    rep.check("INFEASIBLE, certificate verified", verified)
    system = lifting.cantlift_system()
    for k, y in enumerate(cert.eq_multipliers if cert else []):
        if y:
            rep.rows.append({"kind": "eq", "row": system.describe_row(*system.eqs[k], "="),
                             "multiplier": y})
    for k, y in enumerate(cert.ge_multipliers if cert else []):
        if y:
            rep.rows.append({"kind": "ge", "row": system.describe_row(*system.ineqs[k], ">="),
                             "multiplier": y})
    if cert:
        rep.notes.append(f"combination reduces to 0 = {arith.fmt(cert.constant)}"
                         if not any(cert.ge_multipliers)
                         else f"combination reduces to 0 >= {arith.fmt(cert.constant)}")
    modified = (Fraction(2, 10), Fraction(3, 20), Fraction(4, 10), Fraction(1, 4))
    alt = lifting.cantlift_analysis(modified)
    rep.check("modified masses with p3 = 2 p1: FEASIBLE", alt.feasible)
    if alt.feasible:
        rep.notes.append("modified solution q = " + ", ".join(arith.fmt(v) for v in alt.solution))
    loose = lifting.cantlift_analysis(split_constraint=False)
    rep.check("without the split constraint: FEASIBLE", loose.feasible)
    return rep


def experiment_wasserstein(trials: int = 100, seed: int = 1, max_points: int = 6,
                           max_n: int = 7, tol: float = 1e-9) -> ExperimentReport:
    """Isometry of the symmetrized power and assignment-vs-enumeration on random instances."""
    rng = np.random.default_rng(seed)
    rep = ExperimentReport("wasserstein")
    iso_dev = oracle_dev = refine_dev = 0.0
    for t in range(trials):
        X = sampling.random_metric(rng, int(rng.integers(1, max_points + 1)))
        n = int(rng.integers(1, max_n + 1))
        p = int(rng.integers(1, 4))
        u = sampling.random_tuple(rng, X.n, n)
        v = sampling.random_tuple(rng, X.n, n)
        sym = wasserstein.symmetrized_power_distance(X, u, v, p)
        wr = wasserstein.wp_rational(wasserstein.phi_n(X, u), wasserstein.phi_n(X, v), p)
        wu = wasserstein.wp_uniform(X, u, v, p)
        wb = wasserstein.wp_bruteforce(X, u, v, p)
        wd = wasserstein.wp_uniform(X, wasserstein.refine(u), wasserstein.refine(v), p)
        d_iso = float(abs(arith.real(sym) - arith.real(wr)))
        d_orc = float(abs(arith.real(wu) - arith.real(wb)))
        d_ref = float(abs(arith.real(wd) - arith.real(sym)))
        iso_dev, oracle_dev, refine_dev = max(iso_dev, d_iso), max(oracle_dev, d_orc), max(refine_dev, d_ref)
        rep.rows.append({"trial": t, "points": X.n, "n": n, "p": p,
                         "symmetrized": sym, "wp_rational": wr, "wp_uniform": wu,
                         "wp_bruteforce": wb, "iso_dev": d_iso, "oracle_dev": d_orc})
    rep.check(f"isometry: max deviation {iso_dev:.3g} <= {tol}", iso_dev <= tol)
    rep.check(f"assignment vs enumeration: max deviation {oracle_dev:.3g} <= {tol}", oracle_dev <= tol)
    rep.check(f"atom doubling: max deviation {refine_dev:.3g} <= {tol}", refine_dev <= tol)
    return rep
