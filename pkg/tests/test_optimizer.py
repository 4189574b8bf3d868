from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from markovtype import metric_space as ms, optimizer as opt, sampling
from markovtype.errors import DegenerateWalk, IsolatedState, TooManyParameters

TWO = ms.from_matrix(None, [[0, 1], [1, 0]])
TRIANGLE = ms.from_matrix(None, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
FAST = opt.OptimizerConfig(restarts=6, max_iter=120)


def test_chain_from_weights_examples():
    Z = opt.chain_from_weights([[0, 1], [1, 0]])
    assert Z.pi == (F(1, 2), F(1, 2)) and Z.a == ((0, 1), (1, 0))
    Z = opt.chain_from_weights([[1, 1], [1, 1]])
    assert all(v == F(1, 2) for row in Z.a for v in row)
    with pytest.raises(IsolatedState):
        opt.chain_from_weights([[0, 0], [0, 1]])
    with pytest.raises(ValueError):
        opt.chain_from_weights([[0, 1], [2, 0]])


def test_objective_examples():
    assert opt.objective([[0, 1], [1, 0]], [0, 1], TWO, 2, 2) == 0
    assert opt.objective([[1, 1], [1, 1]], [0, 1], TWO, 2, 2) == F(1, 2)
    ring = [[1 if (j - i) % 4 in (1, 3) else 0 for j in range(4)] for i in range(4)]
    assert opt.objective(ring, range(4), ms.cycle(4), 2, 2) == 1
    with pytest.raises(DegenerateWalk):
        opt.objective([[1, 0], [0, 1]], [0, 1], TWO, 2, 2)


def test_weights_from_theta_round_trip():
    theta = [F(1), F(2), F(3), F(4), F(5), F(6)]
    w = opt.weights_from_theta(theta, 3)
    assert w == [[1, 2, 3], [2, 4, 5], [3, 5, 6]]
    iu = opt.upper_indices(3)
    assert [w[i][j] for i, j in zip(*iu)] == theta


def test_config_dict_round_trip():
    cfg = opt.OptimizerConfig.from_dict({"restarts": 8, "copies": 2, "seed": 3, "maxT": 5})
    assert (cfg.restarts, cfg.copies, cfg.seed, cfg.max_T) == (8, 2, 3, 5)
    assert opt.OptimizerConfig.from_dict(cfg.to_dict()) == cfg


def test_maximize_two_points():
    rep = opt.maximize(TWO, p=2, T=2, config=FAST)
    assert rep.verify()
    assert F(1, 2) <= rep.ratio <= 1 + 1e-9
    assert abs(float(rep.ratio) - oracles.two_point_ratio_sweep(2)) < 1e-4
    assert all(r.exact_ratio is None or r.exact_ratio <= 1 for r in rep.restarts)
    assert abs(float(rep.bound) ** 2 - float(rep.ratio)) < 1e-12


def test_maximize_cycle():
    X = ms.cycle(8)
    for T in (2, 3):
        rep = opt.maximize(X, p=2, T=T, config=FAST)
        assert rep.verify() and rep.ratio <= 1 + 1e-6


def test_maximize_is_deterministic():
    a = opt.maximize(TRIANGLE, p=2, T=3, config=FAST)
    b = opt.maximize(TRIANGLE, p=2, T=3, config=FAST)
    assert a.ratio == b.ratio and a.weights == b.weights


def test_maximize_never_below_seeds():
    X = ms.hamming_cube(2)
    nn = [[int(X.d(i, j) == 1) for j in range(4)] for i in range(4)]
    seed_ratio = opt.objective(nn, range(4), X, 2, 2)
    rep = opt.maximize(X, p=2, T=2, config=opt.OptimizerConfig(restarts=2, max_iter=1), seeds=[nn])
    assert rep.ratio >= seed_ratio and rep.seed_ratio >= seed_ratio


def test_maximize_copies():
    rep = opt.maximize(TWO, p=2, T=2, config=opt.OptimizerConfig(restarts=3, copies=2, max_iter=60))
    assert rep.f == (0, 0, 1, 1) and rep.verify()


def test_maximize_rejects_large_T():
    with pytest.raises(ValueError):
        opt.maximize(TWO, T=9, config=FAST)


def test_rationalize_sums_to_one():
    theta = opt.rationalize(np.array([0.1, 0.2, 0.7000001]), 10 ** 6)
    assert sum(theta) == 1 and all(isinstance(v, F) for v in theta)


def test_exhaustive_small_examples():
    g = opt.exhaustive_small(TWO, p=2, T=2, grid_resolution=200)
    assert abs(float(g.ratio) - oracles.two_point_ratio_sweep(2)) < 1e-4
    g = opt.exhaustive_small(TRIANGLE, p=2, T=2, grid_resolution=40)
    assert g.ratio <= 1 + 1e-4
    g = opt.exhaustive_small(TWO, p=2, T=2, grid_resolution=1)
    assert g.points == 1 and g.ratio == F(1, 2)
    assert g.weights == [[F(1, 3)] * 2] * 2


def test_exhaustive_small_too_many():
    with pytest.raises(TooManyParameters):
        opt.exhaustive_small(ms.cycle(4), T=2)


def test_nearest_neighbour_seed():
    theta = opt.nearest_neighbour_theta(ms.cycle(4), range(4))
    w = opt.weights_from_theta(theta, 4)
    assert all((w[i][j] > 0) == ((j - i) % 4 in (1, 3)) for i in range(4) for j in range(4))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 4), st.integers(2, 5),
       st.fractions(min_value=F(1, 5), max_value=5, max_denominator=7))
def test_objective_invariances(seed, n, T, c):
    rng = np.random.default_rng(seed)
    w = sampling.random_weights(rng, n, p_zero=0.0)
    X = sampling.random_metric(rng, n)
    f = list(range(n))
    base = opt.objective(w, f, X, 2, T)
    assert opt.objective([[c * v for v in row] for row in w], f, X, 2, T) == base
    assert opt.objective(w, f, ms.scale(X, c), 2, T) == base


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 6))
def test_two_point_grid_matches_sweep(T):
    g = opt.exhaustive_small(TWO, p=2, T=T, grid_resolution=120)
    assert abs(float(g.ratio) - oracles.two_point_ratio_sweep(T)) < 1e-3
    assert g.ratio <= 1
