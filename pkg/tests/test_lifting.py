from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from markovtype import lifting as lf, markov as mk, metric_space as ms, sampling
from markovtype.errors import (
    AsymmetricE,
    HypothesisViolated,
    NotCovering,
    NotRegular,
    NotSurjective,
    SpaceMismatch,
)

HALF = F(1, 2)


def cycle_chain(n):
    a = [[HALF if (j - i) % n in (1, n - 1) else 0 for j in range(n)] for i in range(n)]
    return mk.new_chain([F(1, n)] * n, a)


def cycle_walk(n):
    return mk.markov_walk(cycle_chain(n), ms.graph_metric(ms.cycle_graph(n)))


def cover_spec(n, k):
    N = k * n
    E = [(i, (i + s) % N) for i in range(N) for s in (1, -1)]
    return lf.lift_spec([i % n for i in range(N)], E, n)


def all_pairs(n):
    return [(i, j) for i in range(n) for j in range(n)]


def test_deg_examples():
    assert lf.deg(0, range(3), set()) == 0
    assert lf.deg(1, range(3), set(all_pairs(3))) == 3
    spec = cover_spec(4, 2)
    fibres = spec.fibres()
    for x in range(8):
        for s in ((x + 1) % 4, (x - 1) % 4):
            assert lf.deg(x, fibres[s], spec.E) == 1


def test_lift_spec_errors():
    with pytest.raises(NotSurjective):
        lf.lift_spec([0, 0], [], 2)
    with pytest.raises(AsymmetricE):
        lf.lift_spec([0, 1], [(0, 1)])


def test_is_regular_examples():
    assert lf.is_regular(lf.lift_spec(range(3), all_pairs(3)))
    assert lf.is_regular(cover_spec(4, 2))
    assert not lf.is_regular(lf.lift_spec([0, 0, 0], [(0, 1), (1, 0)]))


def test_lift_chain_identity():
    Z = lf.diamond_chain()
    assert lf.lift_chain(Z, lf.lift_spec(range(4), all_pairs(4))) == Z


def test_lift_chain_cycle_cover():
    Zt = lf.lift_chain(cycle_chain(4), cover_spec(4, 2))
    assert Zt == cycle_chain(8)


def test_lift_chain_lazy_flip():
    Z = mk.new_chain([HALF, HALF], [[HALF, HALF], [HALF, HALF]])
    spec = lf.lift_spec([0, 0, 1, 1], all_pairs(4))
    Zt = lf.lift_chain(Z, spec)
    assert Zt.pi == (F(1, 4),) * 4
    assert all(v == F(1, 4) for row in Zt.a for v in row)
    assert lf.verify_lift(Zt, Z, spec.sigma)


def test_lift_chain_not_regular():
    with pytest.raises(NotRegular):
        lf.lift_chain(mk.new_chain([1], [[1]]), lf.lift_spec([0, 0, 0], [(0, 1), (1, 0)]))


def test_zero_degree_needs_idle_base():
    # opposite fibres never meet: fine for C_4, fatal for a chain jumping 0 -> 2
    spec = cover_spec(4, 2)
    third = F(1, 3)
    jump = mk.new_chain([F(1, 4)] * 4, [[0 if i == j else third for j in range(4)] for i in range(4)])
    assert lf.is_regular(spec) and lf.is_regular(spec, cycle_chain(4))
    assert not lf.is_regular(spec, jump)
    with pytest.raises(NotRegular):
        lf.lift_chain(jump, spec)


def test_verify_lift_examples():
    Z = lf.diamond_chain()
    assert lf.verify_lift(Z, Z, range(4))
    C8, C4 = cycle_chain(8), cycle_chain(4)
    assert lf.verify_lift(C8, C4, [(i + 1) % 4 for i in range(8)])
    # collapsing neighbours: a step now often stays in the same fibre
    assert not lf.verify_lift(C8, C4, [(i // 2) % 4 for i in range(8)])


def test_simplechain_condition():
    Z = lf.diamond_chain()
    assert lf.simplechain_condition(Z, Z, range(4))
    # alternate the edge weights of C_8: still reversible, no longer a lift of C_4
    a = [[F(0)] * 8 for _ in range(8)]
    for i in range(8):
        w = F(3, 4) if i % 2 == 0 else F(1, 4)
        a[i][(i + 1) % 8] = a[(i + 1) % 8][i] = w
    Zt = mk.new_chain([F(1, 8)] * 8, a)
    assert not lf.simplechain_condition(Zt, cycle_chain(4), [i % 4 for i in range(8)])
    assert lf.simplechain_condition(cycle_chain(8), cycle_chain(4), [i % 4 for i in range(8)])


def test_masslemma_examples():
    Z, spec = cycle_chain(4), cover_spec(4, 2)
    Zt = lf.lift_chain(Z, spec)
    fib = spec.fibres()
    assert lf.masslemma_check(Zt, Z, spec.sigma, fib[0], fib[1], 0, 1)
    # 0 and 1 are joined; 0's other partner over 1 would be 5, which is not adjacent
    assert lf.masslemma_check(Zt, Z, spec.sigma, {0}, {1}, 0, 1)
    assert Zt.pi[0] / Z.pi[0] == HALF


@pytest.mark.parametrize("S1, S2, s1, s2, name", [
    ({1}, {1}, 0, 1, "S1-in-fibre"),
    ({0}, {0}, 0, 1, "S2-in-fibre"),
    ({0}, {2}, 0, 2, "base-flow"),
    ({0}, {5}, 0, 1, "block-1"),
])
def test_masslemma_violations(S1, S2, s1, s2, name):
    Z, spec = cycle_chain(4), cover_spec(4, 2)
    Zt = lf.lift_chain(Z, spec)
    with pytest.raises(HypothesisViolated) as err:
        lf.masslemma_check(Zt, Z, spec.sigma, S1, S2, s1, s2)
    assert err.value.which == name


def test_masslemma_block_2():
    Z, spec = cycle_chain(4), cover_spec(4, 2)
    Zt = lf.lift_chain(Z, spec)
    # S2 = {1, 5} fills its fibre, but 5 steps to 4 which lies outside S1
    with pytest.raises(HypothesisViolated) as err:
        lf.masslemma_check(Zt, Z, spec.sigma, {0}, {1, 5}, 0, 1)
    assert err.value.which == "block-2"


def test_quotient_lift_trivial_group():
    X = ms.cycle(5)
    Q, chi = ms.quotient_by_group(X, ms.IsometryGroup.trivial(5))
    W = mk.markov_walk(cycle_chain(5), Q)
    L = lf.quotient_lift_walk(W, X, ms.IsometryGroup.trivial(5))
    assert L.walk.chain == W.chain and L.walk.f == W.f and chi == L.chi


def test_quotient_lift_flip():
    X = ms.graph_metric(ms.cycle_graph(4))
    G = ms.IsometryGroup.generated_by(4, [(2, 3, 0, 1)])
    Q, chi = ms.quotient_by_group(X, G)
    W = mk.markov_walk(mk.new_chain([HALF, HALF], [[0, 1], [1, 0]]), Q)
    L = lf.quotient_lift_walk(W, X, G)
    assert mk.energy(L.walk, 2, 1) == 1
    assert lf.verify_metric_lift(L.walk, W, chi, L.sigma)
    assert lf.verify_metric_lift(L.walk, W, chi)


def test_quotient_lift_mismatch():
    X = ms.cycle(4)
    G = ms.IsometryGroup.generated_by(4, [(2, 3, 0, 1)])
    with pytest.raises(SpaceMismatch):
        lf.quotient_lift_walk(cycle_walk(4), X, G)


def test_verify_metric_lift_identity():
    W = cycle_walk(6)
    assert lf.verify_metric_lift(W, W, range(6))


def test_covering_lift_cycle():
    cover, base, c = lf.cyclic_cover(4, 2)
    W = cycle_walk(4)
    L = lf.covering_lift_walk(W, cover, base, c)
    ft = L.walk.f
    assert sorted(ft) == list(range(8)) and set(L.walk.chain.pi) == {F(1, 8)}
    for i in range(8):
        for j in range(8):
            assert L.walk.chain.a[i][j] == (HALF if (ft[i] - ft[j]) % 8 in (1, 7) else 0)
    assert lf.verify_metric_lift(L.walk, W, c, L.sigma)
    assert mk.energy(L.walk, 2, 2) == 2 == mk.energy(W, 2, 2)
    assert mk.step_distance_distribution(L.walk).same_law(mk.step_distance_distribution(W))


def test_covering_lift_identity():
    G = ms.diamond_graph()
    W = mk.markov_walk(lf.diamond_chain(), ms.graph_metric(G))
    L = lf.covering_lift_walk(W, G, G, range(4))
    assert L.walk.chain == W.chain


def test_covering_lift_three_fold():
    cover, base, c = lf.cyclic_cover(4, 3)
    W = cycle_walk(4)
    L = lf.covering_lift_walk(W, cover, base, c)
    assert mk.energy(L.walk, 2, 1) == mk.energy(W, 2, 1)
    for T in range(2, 7):
        assert mk.energy(L.walk, 2, T) >= mk.energy(W, 2, T)
    assert mk.energy(L.walk, 2, 4) > mk.energy(W, 2, 4)


def test_check_covering():
    cover, base, c = lf.cyclic_cover(4, 2)
    lf.check_covering(cover, base, c)
    with pytest.raises(NotCovering):
        lf.check_covering(cover, base, [(i // 2) % 4 for i in range(8)])
    with pytest.raises(NotCovering):
        lf.check_covering(cover, base, [0] * 8)


def test_diamond_cover_is_submetry_not_covering():
    # y3 has two neighbours over x1, so covering_lift_walk does not apply
    cover, base = ms.diamond_cover_graph(), ms.diamond_graph()
    assert ms.is_submetry(ms.diamond_cover_map(), ms.graph_metric(cover), ms.graph_metric(base))
    W = mk.markov_walk(lf.diamond_chain(), ms.graph_metric(base))
    with pytest.raises(NotCovering):
        lf.covering_lift_walk(W, cover, base, ms.diamond_cover_map())


def test_cantlift():
    cert = lf.cantlift_certificate()
    assert cert.verify()
    assert cert.constant != 0
    assert not any(cert.ge_multipliers)
    modified = (F(2, 10), F(3, 20), F(4, 10), F(1, 4))
    res = lf.cantlift_analysis(modified)
    assert res.feasible
    assert lf.cantlift_system(modified).satisfied_by(res.solution)
    free = lf.cantlift_system(split_constraint=False)
    assert free.satisfied_by([lf.DIAMOND_PI[i % 4] / 3 for i in range(12)])
    assert lf.cantlift_analysis(split_constraint=False).feasible


def test_modified_diamond_chain_is_reversible():
    p = (F(2, 10), F(3, 20), F(4, 10), F(1, 4))
    # symmetric edge flows on the diamond, rows normalised by p
    flows = {(0, 1): F(1, 20), (0, 2): F(1, 10), (0, 3): F(1, 20), (1, 2): F(1, 10), (2, 3): F(1, 5)}
    a = [[F(0)] * 4 for _ in range(4)]
    for (i, j), q in flows.items():
        a[i][j], a[j][i] = q / p[i], q / p[j]
    Z = mk.new_chain(p, a)
    assert Z.pi == p


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5))
def test_random_lift_is_sound(seed, n):
    rng = np.random.default_rng(seed)
    Z = sampling.random_chain(rng, n)
    spec = sampling.random_lift_spec(rng, n)
    assert lf.is_regular(spec)
    Zt = lf.lift_chain(Z, spec)
    assert mk.is_restricted_by(Zt, spec.E)
    assert lf.verify_lift(Zt, Z, spec.sigma)
    assert lf.simplechain_condition(Zt, Z, spec.sigma)
    fib = spec.fibres()
    for s in range(n):
        assert lf.masslemma_check(Zt, Z, spec.sigma, fib[s], fib[s], s, s) if Z.a[s][s] else True


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4), st.integers(1, 3))
def test_lift_pushes_cylinders_forward(seed, n, T):
    rng = np.random.default_rng(seed)
    Z = sampling.random_chain(rng, n)
    spec = sampling.random_lift_spec(rng, n, max_fibre=3)
    Zt = lf.lift_chain(Z, spec)
    fib = spec.fibres()
    base_sets = [set(int(v) for v in rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
                 for _ in range(T + 1)]
    lifted_sets = [{x for s in S for x in fib[s]} for S in base_sets]
    assert oracles.cylinder_by_paths(Zt.pi, Zt.a, lifted_sets) == oracles.cylinder_by_paths(Z.pi, Z.a, base_sets)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 7))
def test_quotient_lift_dominates(seed, n):
    rng = np.random.default_rng(seed)
    G = sampling.random_permutation_group(rng, n)
    X = sampling.invariant_metric(rng, G, n)
    Q, chi = ms.quotient_by_group(X, G)
    Z = sampling.random_chain(rng, int(rng.integers(1, 4)))
    W = mk.markov_walk(Z, Q, sampling.random_tuple(rng, Q.n, Z.n))
    L = lf.quotient_lift_walk(W, X, G)
    assert lf.verify_metric_lift(L.walk, W, chi, L.sigma)
    law = mk.step_distance_distribution(L.walk)
    assert all(d <= Q.diam for d, _ in law.support())
    for p in (1, 2, 3):
        assert mk.energy(L.walk, p, 1) == mk.energy(W, p, 1)
        for T in (2, 3, 4):
            assert mk.energy(L.walk, p, T) >= mk.energy(W, p, T)
