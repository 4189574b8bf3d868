"""JSON encodings for spaces, chains, lift data, measures and reports.

Rationals are written as ``"num/den"`` strings. Irrational distances are
written as ``{"real": "<decimal>"}`` and read back into high-precision reals.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import mpmath

from . import arith
from .lifting import LiftSpec, lift_spec
from .markov import MarkovWalk, ReversibleChain, new_chain
from .metric_space import (
    FiniteMetricSpace,
    IsometryGroup,
    MetricGraph,
    cycle,
    cycle_graph,
    diamond_cover_graph,
    diamond_graph,
    discrete_torus,
    from_matrix,
    graph_metric,
    hamming_cube,
)
from .wasserstein import EmpiricalMeasure, measure


def enc(x):
    if arith.is_real(x):
        return {"real": mpmath.nstr(x, arith.REAL.dps, strip_zeros=True)}
    return arith.fmt(x)


def dec(x):
    if isinstance(x, dict):
        return arith.REAL.mpf(x["real"])
    return arith.exact(x)


def _label_out(label):
    return list(map(_label_out, label)) if isinstance(label, tuple) else label


def _label_in(label):
    return tuple(map(_label_in, label)) if isinstance(label, list) else label


def load(path) -> dict:
    return json.loads(Path(path).read_text())


def dump(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


# spaces

GENERATORS = {
    "cycle": lambda a: cycle(int(a["n"])),
    "hamming": lambda a: hamming_cube(int(a["d"])),
    "torus": lambda a: discrete_torus(int(a["k"]), int(a["d"])),
    "diamond": lambda a: graph_metric(diamond_graph()),
    "diamond_cover": lambda a: graph_metric(diamond_cover_graph()),
}


def space_to_json(X: FiniteMetricSpace) -> dict:
    return {"labels": [_label_out(l) for l in X.labels],
            "dist": [[enc(v) for v in row] for row in X.dist]}


def space_from_json(obj: dict) -> FiniteMetricSpace:
    gen = obj.get("gen", obj.get("generator"))
    if gen is not None:
        return GENERATORS[gen](obj)
    if "edges" in obj:
        return graph_metric(graph_from_json(obj))
    labels = [_label_in(l) for l in obj["labels"]] if "labels" in obj else None
    return from_matrix(labels, [[dec(v) for v in row] for row in obj["dist"]])


def graph_to_json(G: MetricGraph) -> dict:
    return {"labels": [_label_out(l) for l in G.labels],
            "edges": [[u, v, enc(length)] for u, v, length in G.edges]}


def graph_from_json(obj: dict) -> MetricGraph:
    gen = obj.get("gen", obj.get("generator"))
    if gen == "cycle":
        return cycle_graph(int(obj["n"]))
    if gen == "diamond":
        return diamond_graph()
    if gen == "diamond_cover":
        return diamond_cover_graph()
    labels = tuple(_label_in(l) for l in obj["labels"])
    return MetricGraph(labels, tuple((int(u), int(v), dec(w)) for u, v, w in obj["edges"]))


def group_to_json(G: IsometryGroup) -> dict:
    return {"perms": [list(g) for g in G.perms]}


def group_from_json(obj: dict, n: int) -> IsometryGroup:
    if "generators" in obj:
        return IsometryGroup.generated_by(n, obj["generators"])
    return IsometryGroup(tuple(tuple(g) for g in obj["perms"]))


# chains and walks

def chain_to_json(Z: ReversibleChain, f=None) -> dict:
    out = {"pi": [enc(v) for v in Z.pi], "a": [[enc(v) for v in row] for row in Z.a]}
    if f is not None:
        out["f"] = list(f)
    return out


def chain_from_json(obj: dict):
    """``(chain, f)``; f is None when absent."""
    Z = new_chain(obj["pi"], obj["a"])
    f = obj.get("f")
    return Z, (tuple(int(x) for x in f) if f is not None else None)


def walk_to_json(W: MarkovWalk) -> dict:
    return chain_to_json(W.chain, W.f)


def liftspec_to_json(spec: LiftSpec) -> dict:
    return {"sigma": list(spec.sigma), "E": [list(e) for e in sorted(spec.E)]}


def liftspec_from_json(obj: dict) -> LiftSpec:
    return lift_spec(obj["sigma"], [tuple(e) for e in obj["E"]], obj.get("n_base"))


# measures

def measure_to_json(mu: EmpiricalMeasure, space_ref=None) -> dict:
    out = {"atoms": [{"point": x, "w": enc(w)} for x, w in zip(mu.support, mu.weights)]}
    if space_ref is not None:
        out["space"] = space_ref
    return out


def measure_from_json(obj: dict, space: FiniteMetricSpace = None) -> EmpiricalMeasure:
    if space is None:
        ref = obj["space"]
        space = space_from_json(load(ref) if isinstance(ref, str) else ref)
    return measure(space, [(a["point"], Fraction(a["w"])) for a in obj["atoms"]])
