"""Command-line interface: ``markovtype <group> <command> [options]``.

Tables go to stdout; ``--json``/``--csv`` write machine-readable copies.
The exit status is 0 only when every inequality a command asserts holds.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import arith, bounds, experiments, jsonio, lifting, markov, wasserstein
from .errors import MarkovTypeError
from .metric_space import graph_metric, quotient_by_group
from .optimizer import OptimizerConfig, exhaustive_small, maximize

log = logging.getLogger("markovtype")


def _num(x):
    """JSON-friendly rendering of exact and real numbers."""
    if isinstance(x, Fraction) or arith.is_real(x):
        return arith.fmt(x)
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _num(obj)


def _write_outputs(args, payload=None, rows=None):
    if getattr(args, "json", None) and payload is not None:
        Path(args.json).write_text(json.dumps(_clean(payload), indent=2) + "\n")
    if getattr(args, "csv", None) and rows:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _num(v) for k, v in row.items()})


def _table(rows):
    if not rows:
        return
    cols = list(rows[0])
    cells = [[str(_num(r.get(c, ""))) for c in cols] for r in rows]
    widths = [max(len(c), *(len(r[k]) for r in cells)) for k, c in enumerate(cols)]
    print("  ".join(c.ljust(w) for c, w in zip(cols, widths)))
    for r in cells:
        print("  ".join(v.ljust(w) for v, w in zip(r, widths)))


def _checks(checks) -> int:
    for desc, passed in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {desc}")
    return 0 if all(p for _, p in checks) else 1


def _points(text: str) -> tuple:
    return tuple(int(v) for v in text.split(",") if v.strip())


def _space(args):
    return jsonio.space_from_json(jsonio.load(args.space))


def _walk(args, space):
    chain, f = jsonio.chain_from_json(jsonio.load(args.chain))
    return markov.markov_walk(chain, space, f)


# space

def cmd_space_gen(args):
    params = {"gen": args.generator, "n": args.n, "d": args.d, "k": args.k}
    X = jsonio.space_from_json(params)
    print(f"{args.generator}: {X.n} points, diameter {arith.fmt(X.diam)}")
    if args.json:
        jsonio.dump(jsonio.space_to_json(X), args.json)
    return 0


def cmd_space_check(args):
    X = _space(args)
    print(f"valid metric space: {X.n} points, diameter {arith.fmt(X.diam)}, "
          f"{'exact' if X.exact else 'real'} distances")
    return 0


# walks

def cmd_walk_ratio(args):
    X = _space(args)
    W = _walk(args, X)
    e1 = markov.energy(W, args.p, 1)
    rows = []
    for T in range(1, args.T + 1):
        eT = markov.energy(W, args.p, T)
        rows.append({"T": T, "E_T": eT, "ratio": eT / (T * e1) if e1 else None})
    if e1 == 0:
        print("degenerate walk: E_p(W, 1) = 0")
    _table(rows)
    _write_outputs(args, {"p": args.p, "rows": rows}, rows)
    return 0


def cmd_walk_stepdist(args):
    X = _space(args)
    law = markov.step_distance_distribution(_walk(args, X))
    rows = [{"distance": v, "mass": m} for v, m in law.items]
    _table(rows)
    _write_outputs(args, {"law": rows}, rows)
    return 0


# lifts

def _lift_checks(lifted, W, tol_T=6):
    checks = [("metric lift verified", lifting.verify_metric_lift(lifted.walk, W, lifted.chi, lifted.sigma))]
    for p in (1, 2, 3):
        checks.append((f"p={p}: E_p at T=1 preserved",
                       arith.close(markov.energy(lifted.walk, p, 1), markov.energy(W, p, 1))))
        checks.append((f"p={p}: E_p(lift, T) >= E_p(base, T) for T=2..{tol_T}",
                       all(arith.leq(markov.energy(W, p, T), markov.energy(lifted.walk, p, T))
                           for T in range(2, tol_T + 1))))
    return checks


def cmd_lift_quotient(args):
    X = _space(args)
    G = jsonio.group_from_json(jsonio.load(args.group), X.n)
    Q, _ = quotient_by_group(X, G)
    W = _walk(args, Q)
    lifted = lifting.quotient_lift_walk(W, X, G)
    print(f"lifted walk: {lifted.walk.chain.n} states on {X.n} points")
    _write_outputs(args, {"walk": jsonio.walk_to_json(lifted.walk),
                          "liftspec": jsonio.liftspec_to_json(lifted.spec)})
    return _checks(_lift_checks(lifted, W))


def cmd_lift_cover(args):
    cover = jsonio.graph_from_json(jsonio.load(args.cover))
    base = jsonio.graph_from_json(jsonio.load(args.base))
    vmap = jsonio.load(args.map)["vertex_map"]
    W = _walk(args, graph_metric(base))
    lifted = lifting.covering_lift_walk(W, cover, base, vmap)
    print(f"lifted walk: {lifted.walk.chain.n} states on {cover.n} vertices")
    _write_outputs(args, {"walk": jsonio.walk_to_json(lifted.walk),
                          "liftspec": jsonio.liftspec_to_json(lifted.spec)})
    return _checks(_lift_checks(lifted, W))


def cmd_lift_verify(args):
    base, _ = jsonio.chain_from_json(jsonio.load(args.base_chain))
    spec_obj = jsonio.load(args.spec)
    if args.chain:
        lifted, _ = jsonio.chain_from_json(jsonio.load(args.chain))
        sigma = spec_obj["sigma"]
        checks = []
    else:
        spec = jsonio.liftspec_from_json(spec_obj)
        checks = [("sigma regular with respect to E", lifting.is_regular(spec))]
        if not checks[0][1]:
            return _checks(checks)
        lifted = lifting.lift_chain(base, spec)
        sigma = spec.sigma
        _write_outputs(args, jsonio.chain_to_json(lifted))
    checks.append(("lift conditions hold", lifting.verify_lift(lifted, base, sigma)))
    return _checks(checks)


# transport

def cmd_wp_dist(args):
    if args.mu:
        mu = jsonio.measure_from_json(jsonio.load(args.mu))
        nu = jsonio.measure_from_json(jsonio.load(args.nu), mu.space)
        value, plan = wasserstein.optimal_coupling(mu, nu, arith.exact(args.p))
        print(f"W_{args.p} = {arith.fmt(value)}")
        _write_outputs(args, {"distance": value, "coupling": plan.matrix})
        return 0
    X = _space(args)
    u, v = _points(args.u), _points(args.v)
    value = wasserstein.wp_uniform(X, u, v, arith.exact(args.p))
    print(f"W_{args.p} = {arith.fmt(value)}")
    _write_outputs(args, {"distance": value})
    return 0


def cmd_wp_isometry(args):
    X = _space(args)
    u, v = _points(args.u), _points(args.v)
    p = arith.exact(args.p)
    sym = wasserstein.symmetrized_power_distance(X, u, v, p)
    wr = wasserstein.wp_rational(wasserstein.phi_n(X, u), wasserstein.phi_n(X, v), p)
    print(f"symmetrized power distance = {arith.fmt(sym)}")
    print(f"W_p of the empirical measures = {arith.fmt(wr)}")
    _write_outputs(args, {"symmetrized": sym, "wasserstein": wr})
    return _checks([("distances agree", arith.close(sym, wr, args.tol))])


# optimizer

def _config(args) -> OptimizerConfig:
    cfg = OptimizerConfig.from_dict(jsonio.load(args.config)) if args.config else OptimizerConfig()
    overrides = {k: getattr(args, k) for k in ("restarts", "copies", "seed", "workers")
                 if getattr(args, k, None) is not None}
    return OptimizerConfig(**{**cfg.__dict__, **overrides})


def cmd_opt_maximize(args):
    X = _space(args)
    cfg = _config(args)
    rep = maximize(X, None, arith.exact(args.p), args.T, cfg)
    exact_text = arith.fmt(rep.ratio)
    if len(exact_text) > 60:
        exact_text = "rational with a long expansion, see --json"
    print(f"best ratio ~{float(rep.ratio):.12f} ({exact_text})")
    print(f"certified lower bound M_p(X, T) >= {arith.fmt(rep.bound)}")
    rows = [{"restart": r.index, "init": r.kind, "iterations": r.iterations,
             "float_ratio": r.float_ratio, "exact_ratio": r.exact_ratio} for r in rep.restarts]
    payload = {"config": cfg.to_dict(), "p": rep.p, "T": rep.T, "f": list(rep.f),
               "ratio": rep.ratio, "bound": rep.bound, "weights": rep.weights,
               "walk": jsonio.walk_to_json(rep.walk)}
    _write_outputs(args, payload, rows)
    return _checks([("reported ratio re-verifies exactly", rep.verify())])


def cmd_opt_grid(args):
    X = _space(args)
    res = exhaustive_small(X, None, arith.exact(args.p), args.T, args.resolution)
    print(f"grid maximum {arith.fmt(res.ratio)} (~{float(res.ratio):.12f}) over {res.points} points")
    _write_outputs(args, {"ratio": res.ratio, "weights": res.weights, "points": res.points})
    return 0


# experiments

def _run_report(args, rep):
    _table(rep.rows if len(rep.rows) <= 200 else rep.rows[:200])
    for note in rep.notes:
        print(f"note: {note}")
    _write_outputs(args, {"name": rep.name, "rows": rep.rows, "checks": rep.checks,
                          "notes": rep.notes}, rep.rows)
    return _checks(rep.checks)


def cmd_exp_torus(args):
    cfg = OptimizerConfig(restarts=args.restarts or 8, seed=args.seed)
    return _run_report(args, experiments.experiment_torus(
        range(4, args.nmax + 1, 2), range(2, args.kmax + 1), range(2, args.T + 1), cfg, args.tol))


def cmd_exp_hamming(args):
    return _run_report(args, experiments.experiment_hamming(args.dmax, args.optimize_up_to))


def cmd_exp_cantlift(args):
    rep = experiments.experiment_cantlift()
    print("INFEASIBLE, certificate verified" if rep.checks[0][1] else "certificate NOT verified")
    return _run_report(args, rep)


def cmd_exp_wasserstein(args):
    return _run_report(args, experiments.experiment_wasserstein(args.trials, args.seed, tol=args.tol))


# bounds

def cmd_bound_wp(args):
    print(f"{bounds.bound_wp(args.p, args.d, args.T):.15g}")
    return 0


def cmd_bound_w2(args):
    print(f"{bounds.bound_w2(args.p, args.d):.15g}")
    return 0


def cmd_bound_distortion(args):
    value = bounds.bound_distortion(args.n, args.alpha, args.p, args.d, args.C)
    print(f"{value:.15g}  (C = {args.C}: the absolute constant is left unspecified by the theory)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="OUT", help="write a JSON copy of the result")
    common.add_argument("--csv", metavar="OUT", help="write table rows as CSV")
    common.add_argument("--tol", type=float, default=1e-9, help="tolerance for real comparisons")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="markovtype", description=__doc__.splitlines()[0])
    groups = parser.add_subparsers(dest="group", required=True)

    def add(group, name, func, help_text):
        sp = group.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(func=func)
        return sp

    space = groups.add_parser("space", help="finite metric spaces").add_subparsers(dest="cmd", required=True)
    sp = add(space, "gen", cmd_space_gen, "generate a named space")
    sp.add_argument("generator", choices=sorted(jsonio.GENERATORS))
    sp.add_argument("--n", type=int, default=8)
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--k", type=int, default=4)
    sp = add(space, "check", cmd_space_check, "validate a space file")
    sp.add_argument("--space", required=True)

    walk = groups.add_parser("walk", help="Markov walks").add_subparsers(dest="cmd", required=True)
    sp = add(walk, "ratio", cmd_walk_ratio, "energies and ratios up to time T")
    sp.add_argument("--space", required=True)
    sp.add_argument("--chain", required=True)
    sp.add_argument("--p", default="2")
    sp.add_argument("--T", type=int, default=4)
    sp = add(walk, "stepdist", cmd_walk_stepdist, "law of the one-step distance")
    sp.add_argument("--space", required=True)
    sp.add_argument("--chain", required=True)

    lift = groups.add_parser("lift", help="lifts of chains and walks").add_subparsers(dest="cmd", required=True)
    sp = add(lift, "quotient", cmd_lift_quotient, "lift a walk on X/G to X")
    sp.add_argument("--space", required=True)
    sp.add_argument("--group", required=True, help='{"generators": [[...], ...]} or {"perms": ...}')
    sp.add_argument("--chain", required=True, help="walk on the quotient")
    sp = add(lift, "cover", cmd_lift_cover, "lift a walk along a graph covering")
    sp.add_argument("--cover", required=True)
    sp.add_argument("--base", required=True)
    sp.add_argument("--map", required=True, help='{"vertex_map": [...]}')
    sp.add_argument("--chain", required=True)
    sp = add(lift, "verify", cmd_lift_verify, "check lift conditions (or build the lift from a spec)")
    sp.add_argument("--base-chain", required=True)
    sp.add_argument("--spec", required=True)
    sp.add_argument("--chain", help="lifted chain; built from --spec when omitted")

    wp = groups.add_parser("wp", help="Wasserstein distances").add_subparsers(dest="cmd", required=True)
    sp = add(wp, "dist", cmd_wp_dist, "W_p between tuples or measure files")
    sp.add_argument("--space")
    sp.add_argument("--u")
    sp.add_argument("--v")
    sp.add_argument("--mu")
    sp.add_argument("--nu")
    sp.add_argument("--p", default="2")
    sp = add(wp, "isometry", cmd_wp_isometry, "compare the symmetrized power with W_p")
    sp.add_argument("--space", required=True)
    sp.add_argument("--u", required=True)
    sp.add_argument("--v", required=True)
    sp.add_argument("--p", default="2")

    opt = groups.add_parser("opt", help="lower bounds by search").add_subparsers(dest="cmd", required=True)
    for name, func in (("maximize", cmd_opt_maximize), ("grid", cmd_opt_grid)):
        sp = add(opt, name, func, f"{name} the walk ratio")
        sp.add_argument("--space", required=True)
        sp.add_argument("--p", default="2")
        sp.add_argument("--T", type=int, default=2)
        if name == "maximize":
            sp.add_argument("--config")
            sp.add_argument("--restarts", type=int)
            sp.add_argument("--copies", type=int)
            sp.add_argument("--workers", type=int)
        else:
            sp.add_argument("--resolution", type=int, default=50)

    exp = groups.add_parser("exp", help="experiment suites").add_subparsers(dest="cmd", required=True)
    sp = add(exp, "torus", cmd_exp_torus, "cycles and their cyclic covers")
    sp.add_argument("--nmax", type=int, default=8)
    sp.add_argument("--kmax", type=int, default=3)
    sp.add_argument("--T", type=int, default=4)
    sp.add_argument("--restarts", type=int)
    sp.set_defaults(tol=1e-6)
    sp = add(exp, "hamming", cmd_exp_hamming, "Hamming cube growth")
    sp.add_argument("--dmax", type=int, default=8)
    sp.add_argument("--optimize-up-to", type=int, default=3)
    add(exp, "cantlift", cmd_exp_cantlift, "no-lift certificate")
    sp = add(exp, "wasserstein", cmd_exp_wasserstein, "isometry and oracle checks")
    sp.add_argument("--trials", type=int, default=100)

    bound = groups.add_parser("bound", help="closed-form bounds").add_subparsers(dest="cmd", required=True)
    sp = add(bound, "wp", cmd_bound_wp, "Markov type bound for W_p over R^d at time T")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--T", type=float, default=1)
    sp = add(bound, "w2", cmd_bound_w2, "Markov type 2 bound for W_p over R^d")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp = add(bound, "distortion", cmd_bound_distortion, "distortion lower bound")
    sp.add_argument("--n", type=float, required=True)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--d", type=int, default=1)
    sp.add_argument("--C", type=float, default=1.0, help="absolute constant, unspecified by the theory (default 1)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (MarkovTypeError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
