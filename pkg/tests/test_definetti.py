import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anydim import definetti as D
from anydim import graphs as G
from anydim import settings as S

from conftest import rand_q

F = Fraction
FM = D.FiniteMap


def maps_st(source_max=5, target_max=4):
    return st.integers(1, source_max).flatmap(
        lambda m: st.integers(1, target_max).flatmap(
            lambda n: st.lists(st.integers(0, n - 1), min_size=m, max_size=m).map(lambda t: FM(tuple(t), n))))


def test_constructors():
    assert FM.inclusion(2, 4).targets == (0, 1)
    assert FM.equipartition(2, 3).targets == (0, 0, 0, 1, 1, 1)
    with pytest.raises(ValueError):
        FM((0, 3), 2)


def test_act_vec_examples():
    x = [[1, 2, 3, 4]]
    assert D.act_vec(FM.inclusion(2, 4), x) == [[1, 2]]
    assert D.act_vec(FM.equipartition(2, 2), [5, 7]) == [5, 5, 7, 7]
    assert D.act_vec(FM((1, 1, 1), 3), [4, 5, 6]) == [5, 5, 5]


def test_act_matrix_examples(rng):
    X = [[rand_q(rng) for _ in range(3)] for _ in range(3)]
    X = [[X[min(i, j)][max(i, j)] for j in range(3)] for i in range(3)]
    assert D.act_matrix(FM.identity(3), X) == X
    dup = D.act_matrix(FM.equipartition(3, 2), X)
    assert np.array_equal(np.array(dup, dtype=object), np.kron(np.array(X, dtype=object), np.ones((2, 2), dtype=int)))
    f = FM.random(5, 3, 1)
    Y = D.act_matrix(f, X)
    assert all(Y[i][j] == Y[j][i] for i in range(5) for j in range(5))


def test_coact_vec_examples():
    assert D.coact_vec(FM.equipartition(2, 3), [1, 2, 3, 4, 5, 6]) == [6, 15]
    assert D.coact_vec(FM.permutation([2, 0, 1]), [1, 2, 3]) == [2, 3, 1]


@given(maps_st(), maps_st())
def test_composition_rules(f, g):
    # g: [a] -> [b], f: [b] -> [c]
    if g.target != f.source:
        g = FM(tuple(t % f.source for t in g.targets), f.source)
    fg = f.compose(g)
    rng = np.random.default_rng(len(g.targets))
    x = [F(int(v)) for v in rng.integers(-5, 6, size=f.target)]
    assert D.act_vec(fg, x) == D.act_vec(g, D.act_vec(f, x))
    y = [F(int(v)) for v in rng.integers(-5, 6, size=g.source)]
    assert D.coact_vec(fg, y) == D.coact_vec(f, D.coact_vec(g, y))
    n = g.source
    Y = [[F(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            Y[i][j] = Y[j][i] = F(int(rng.integers(-3, 4)))
    assert D.coact_matrix(fg, Y) == D.coact_matrix(f, D.coact_matrix(g, Y))


@given(maps_st(6, 4))
def test_factorization(f):
    d, g, iota = D.factorization(f)
    assert sorted(g.targets) == list(range(g.source))
    assert d.compose(g).compose(iota).targets == f.targets


@given(maps_st(6, 4), st.data())
def test_l1_contraction(f, data):
    x = data.draw(st.lists(st.integers(-9, 9), min_size=f.source, max_size=f.source))
    assert sum(map(abs, D.coact_vec(f, x))) <= sum(map(abs, x))
    X = np.array(data.draw(st.lists(st.integers(-9, 9), min_size=f.source ** 2, max_size=f.source ** 2))).reshape(f.source, f.source)
    X = X + X.T
    assert np.abs(D.coact_matrix(f, X)).sum() <= np.abs(X).sum()


def test_expectation_t_k2(rng):
    for n in (2, 3, 4):
        X = G.graph_from_bits(n, int(rng.integers(0, 2 ** (n * (n - 1) // 2)))).astype(int).tolist()
        e = D.expect_over_maps(2, n, lambda f: D.act_matrix(f, X)[0][1])
        assert e.value == G.t_density(G.named_graph("K2"), X) and e.exact


def test_expectation_constant():
    assert D.expect_over_maps(3, 4, lambda f: F(7, 3)).value == F(7, 3)


def test_expectation_budget():
    with pytest.raises(ValueError, match="budget"):
        D.expect_over_maps(30, 3, lambda f: 0)


def test_monte_carlo_is_seeded():
    ev = lambda f: sum(f.targets)
    a = D.expect_over_maps(4, 3, ev, mode="monte_carlo", samples=500, seed=7)
    b = D.expect_over_maps(4, 3, ev, mode="monte_carlo", samples=500, seed=7)
    assert a.value == b.value and not a.exact
    assert abs(a.value - 4.0) < 5 * a.stderr + 1e-9


def test_goodman_identity_full_enumeration(rng):
    p = S.default_identity_cost("graph-density", 4)
    for n in range(2, 6):
        for _ in range(3):
            X = S.random_point("graph-density", n, rng)
            lhs, rhs = S.identity_sides("graph-density", p, 4, X)
            assert lhs == rhs


def test_tv_examples():
    a = D.FiniteLaw.dirac((1, 0))
    assert D.tv_exact(a, a) == 0
    assert D.tv_exact(a, D.FiniteLaw.dirac((0, 1))) == 2


def test_tv_all_equal_base():
    for n in range(2, 7):
        assert D.tv_rate_experiment(n, 2, [1] * n)[0] == 0


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("m", [2, 3])
def test_tv_rate_bound(n, m):
    if m > n:
        return
    tv, bound = D.tv_rate_experiment(n, m)
    assert tv <= bound == F(m * (m - 1), n)


def test_tv_first_coord_base_m2_oracle():
    # base (1, 0, ..., 0): distinct pairs never show (1, 1), sampled pairs do with probability 1/n^2
    for n in range(2, 8):
        tv, _ = D.tv_rate_experiment(n, 2)
        p_dist = {(1, 0): F(1, n), (0, 1): F(1, n), (0, 0): F(n - 2, n)}
        p_samp = {(1, 1): F(1, n * n), (1, 0): F(n - 1, n * n), (0, 1): F(n - 1, n * n), (0, 0): F((n - 1) ** 2, n * n)}
        keys = set(p_dist) | set(p_samp)
        assert tv == sum(abs(p_dist.get(k, 0) - p_samp.get(k, 0)) for k in keys)


@pytest.mark.parametrize("n", range(2, 9))
def test_bernoulli_tightness_mixture_oracle(n):
    # sampled pair = (1 - 1/n) Ber(1/2)^2 + (1/n) Unif{(0,0), (1,1)}; distinct pair = Ber(1/2)^2
    mix = {k: (1 - F(1, n)) / 4 + (F(1, 2 * n) if k[0] == k[1] else 0) for k in itertools.product((0, 1), repeat=2)}
    expected = sum(abs(v - F(1, 4)) for v in mix.values())
    assert D.bernoulli_tightness_tv(n) == expected == F(1, n)


def test_w1_examples():
    assert D.w1_to_dirac(D.FiniteLaw.dirac((F(1, 3), F(2, 3))), (F(1, 3), F(2, 3))) == 0
    for n in (2, 4, 8, 16, 32):
        w1, bound = D.w1_rate_experiment(n)
        assert w1 == D.binomial_mean_abs_deviation(n)
        assert float(w1) <= bound == 4 / math.sqrt(n)


def test_w1_small_case_by_hand():
    # n = 1: B ~ Bin(2, 1/2), E|B - 1| = 1/2, and the l1 distance counts both coordinates
    law = D.w1_tightness_law(1)
    assert D.w1_to_dirac(law, (F(1, 2), F(1, 2))) == F(1, 2)
    assert D.binomial_mean_abs_deviation(1) == F(1, 2)


def test_law_self_consistency():
    # sampled-coordinate law equals the average over all maps [m] -> [n] of the pushed-forward law
    base = D.permutation_law([2, 0, 1])
    direct = D.sampled_coords_law(base, 2)
    acc = {}
    for f in D.all_maps(2, 3):
        for x, p in base.probs.items():
            key = tuple(x[i] for i in f.targets)
            acc[key] = acc.get(key, 0) + p / 9
    assert D.tv_exact(direct, D.FiniteLaw(acc)) == 0


def test_finite_law_validation():
    with pytest.raises(ValueError):
        D.FiniteLaw({1: F(1, 2)})


def test_gap_bound_examples():
    assert D.gap_bound("means", 3, 12, 10) == pytest.approx(5.0)
    assert D.gap_bound("means", 1, 7, 3.0) == 0
    assert D.gap_bound("graph-numbers", 2, 8, 1, 1) == pytest.approx(2 * math.sqrt(2))
    with pytest.raises(ValueError, match="bound requires k \\| n"):
        D.gap_bound("symfunc", 3, 8, 1)
