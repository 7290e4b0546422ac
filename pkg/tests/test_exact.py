import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats as sps

from moneychains import exact, graphs, states


def brute_force_configs(n, m):
    return [c for c in itertools.product(range(m + 1), repeat=n)
            if sum(c) == m]


small_graphs = [
    graphs.build_graph(2, [(0, 1)]),
    graphs.build_graph(3, [(0, 1), (1, 2), (2, 0)]),
    graphs.path(3),
    graphs.star(4),
    graphs.cycle(4),
    graphs.complete(4),
]


def test_model1_stationary_prob_values():
    assert exact.model1_stationary_prob(2, 1) == Fraction(1, 2)
    assert exact.model1_stationary_prob(3, 2) == Fraction(1, 6)
    # independent of the configuration argument
    assert exact.model1_stationary_prob(3, 2, (2, 0, 0)) == Fraction(1, 6)
    assert exact.model1_stationary_prob(3, 2, (0, 1, 1)) == Fraction(1, 6)
    with pytest.raises(ValueError):
        exact.model1_stationary_prob(3, 2, (1, 1, 1))  # wrong total


def test_model1_marginal_frozen_values():
    # two agents, three dollars: every holding count equally likely
    for d in range(4):
        assert exact.model1_marginal(2, 3, d) == Fraction(1, 4)
    assert exact.model1_marginal(3, 2, 0) == Fraction(1, 2)
    assert exact.model1_marginal(3, 2, 5) == 0
    assert exact.model1_marginal(3, 2, -1) == 0


@given(st.integers(2, 5), st.integers(0, 6))
def test_model1_marginal_matches_enumeration(n, m):
    cfgs = brute_force_configs(n, m)
    for d in range(m + 1):
        hits = sum(1 for c in cfgs if c[0] == d)
        assert exact.model1_marginal(n, m, d) == Fraction(hits, len(cfgs))


@given(st.integers(2, 5), st.integers(0, 6))
def test_model1_marginal_is_state_count_ratio(n, m):
    for d in range(m + 1):
        lhs = exact.model1_marginal(n, m, d)
        rhs = Fraction(states.count_states(n - 1, m - d),
                       states.count_states(n, m))
        assert lhs == rhs


@given(st.integers(2, 8), st.integers(0, 12))
def test_model1_marginal_sums_to_one(n, m):
    total = sum(exact.model1_marginal(n, m, d) for d in range(m + 1))
    assert total == 1


def test_model1_marginal_vector_exact_vs_recurrence():
    n, m = 7, 30
    via_exact = exact.model1_marginal_vector(n, m)
    via_float = exact.model1_marginal_vector(n, m, digit_budget=0)
    np.testing.assert_allclose(via_exact, via_float, rtol=1e-12)
    assert via_exact.sum() == pytest.approx(1.0, abs=1e-12)


def test_model1_marginal_vector_large_scale():
    v = exact.model1_marginal_vector(1000, 100000)
    assert v.shape == (100001,)
    assert v.sum() == pytest.approx(1.0, abs=1e-9)
    assert float(exact.model1_marginal(1000, 100000, 0)) == pytest.approx(v[0])


def test_model1_marginal_limit_values():
    assert exact.model1_marginal_limit(1.0, 0) == pytest.approx(0.5)
    assert exact.model1_marginal_limit(1.0, 1) == pytest.approx(0.25)
    assert exact.model1_marginal_limit(100.0, 0) == pytest.approx(1 / 101)
    with pytest.raises(ValueError):
        exact.model1_marginal_limit(0.0, 0)


def test_model1_marginal_limit_is_geometric():
    T = 3.7
    d = np.arange(200)
    mine = exact.model1_marginal_limit(T, d)
    ref = sps.geom.pmf(d + 1, 1 / (T + 1))  # scipy counts trials, not failures
    np.testing.assert_allclose(mine, ref, rtol=1e-12)
    assert mine.sum() == pytest.approx(1.0, abs=1e-12)


def test_exponential_density_values():
    assert exact.exponential_density(100.0, 0) == pytest.approx(0.01)
    assert exact.exponential_density(100.0, 100) == pytest.approx(
        math.exp(-1) / 100)


def test_exponential_approximates_geometric_at_high_mean():
    d = np.arange(1001)
    gap = np.abs(exact.model1_marginal_limit(100.0, d)
                 - exact.exponential_density(100.0, d))
    assert gap.max() <= 2e-4


def test_finite_marginal_approaches_limit():
    # sup-distance to the geometric limit shrinks as the population grows
    d = np.arange(51)
    lim = exact.model1_marginal_limit(5.0, d)
    gaps = []
    for n in (10, 100, 1000):
        v = exact.model1_marginal_vector(n, 5 * n, dmax=50, digit_budget=0)
        gaps.append(np.abs(v - lim).max())
    assert gaps[0] > gaps[1] > gaps[2]


def test_bill_marginal_values():
    assert exact.bill_marginal(graphs.build_graph(2, [(0, 1)]), 0) == Fraction(1, 2)
    st4 = graphs.star(4)
    assert exact.bill_marginal(st4, 0) == Fraction(1, 2)
    assert exact.bill_marginal(st4, 1) == Fraction(1, 6)
    reg = graphs.cycle(7)
    assert all(exact.bill_marginal(reg, w) == Fraction(1, 7) for w in range(7))


@pytest.mark.parametrize("g", small_graphs, ids=lambda g: repr(g))
def test_bill_marginal_sums_to_one(g):
    assert sum(exact.bill_marginal(g, w) for w in range(g.n)) == 1


def test_model2_stationary_prob_frozen_values():
    k2 = graphs.build_graph(2, [(0, 1)])
    assert exact.model2_stationary_prob(k2, (1, 1)) == Fraction(1, 2)
    assert exact.model2_stationary_prob(k2, (2, 0)) == Fraction(1, 4)
    assert exact.model2_stationary_prob(k2, (0, 2)) == Fraction(1, 4)


@pytest.mark.parametrize("g", small_graphs, ids=lambda g: repr(g))
@pytest.mark.parametrize("m", [0, 1, 2, 3, 4])
def test_model2_stationary_prob_normalizes(g, m):
    total = sum(exact.model2_stationary_prob(g, c)
                for c in states.enumerate_configs(g.n, m))
    assert total == 1


def test_model2_stationary_prob_star_weighting():
    # center of the star is three times as likely as a leaf to hold the bill
    st4 = graphs.star(4)
    assert exact.model2_stationary_prob(st4, (1, 0, 0, 0)) == Fraction(1, 2)
    assert exact.model2_stationary_prob(st4, (0, 1, 0, 0)) == Fraction(1, 6)


def test_model2_stationary_logprob_matches_exact():
    g = graphs.star(5)
    for c in [(3, 1, 0, 0, 0), (0, 0, 2, 2, 0), (4, 0, 0, 0, 0)]:
        want = math.log(float(exact.model2_stationary_prob(g, c)))
        assert exact.model2_stationary_logprob(g, c) == pytest.approx(want)


def test_model2_marginal_frozen_values():
    k2 = graphs.build_graph(2, [(0, 1)])
    assert exact.model2_marginal(k2, 0, 2, 1) == Fraction(1, 2)
    st4 = graphs.star(4)
    assert exact.model2_marginal(st4, 1, 1, 1) == Fraction(1, 6)
    assert exact.model2_marginal(st4, 0, 1, 1) == Fraction(1, 2)
    assert exact.model2_marginal(st4, 0, 2, 5) == 0
    assert exact.model2_marginal(st4, 0, 2, -1) == 0


@pytest.mark.parametrize("g", small_graphs, ids=lambda g: repr(g))
@pytest.mark.parametrize("m", [1, 2, 4])
def test_model2_marginal_consistent_with_joint(g, m):
    # summing the joint law over one coordinate reproduces the binomial
    for x in range(g.n):
        for d in range(m + 1):
            joint = sum(exact.model2_stationary_prob(g, c)
                        for c in states.enumerate_configs(g.n, m)
                        if c[x] == d)
            assert joint == exact.model2_marginal(g, x, m, d)


@pytest.mark.parametrize("g", small_graphs, ids=lambda g: repr(g))
def test_model2_marginal_sums_to_one(g):
    m = 5
    for x in range(g.n):
        assert sum(exact.model2_marginal(g, x, m, d) for d in range(m + 1)) == 1


def test_model2_marginal_vector_matches_scipy():
    g = graphs.star(6)
    m = 40
    p = float(exact.bill_marginal(g, 0))
    mine = exact.model2_marginal_vector(g, 0, m)
    ref = sps.binom.pmf(np.arange(m + 1), m, p)
    np.testing.assert_allclose(mine, ref, rtol=1e-9)
    forced_float = exact.model2_marginal_vector(g, 0, m, digit_budget=0)
    np.testing.assert_allclose(forced_float, ref, rtol=1e-9)


def test_binomial_pmf_vector_edge_cases():
    np.testing.assert_allclose(exact.binomial_pmf_vector(5, 0.0, 5),
                               [1, 0, 0, 0, 0, 0])
    np.testing.assert_allclose(exact.binomial_pmf_vector(3, 1.0, 5),
                               [0, 0, 0, 1, 0, 0])
    with pytest.raises(ValueError):
        exact.binomial_pmf_vector(3, 1.5, 5)


def test_poisson_pmf_values():
    assert exact.poisson_pmf(1.0, 0) == pytest.approx(math.exp(-1))
    assert exact.poisson_pmf(1.0, 1) == pytest.approx(math.exp(-1))
    assert exact.poisson_pmf(1.0, -3) == 0.0
    with pytest.raises(ValueError):
        exact.poisson_pmf(0.0, 1)


def test_poisson_pmf_matches_scipy():
    d = np.arange(400)
    mine = exact.poisson_pmf_vector(100.0, 399)
    ref = sps.poisson.pmf(d, 100.0)
    np.testing.assert_allclose(mine, ref, rtol=1e-10)
    assert exact.poisson_pmf(100.0, 137) == pytest.approx(sps.poisson.pmf(137, 100.0))


def test_binomial_close_to_poisson_small_p():
    d = np.arange(40)
    b = exact.binomial_pmf_vector(1000, 1 / 1000, 39)
    p = exact.poisson_pmf_vector(1.0, 39)
    tv = 0.5 * np.abs(b - p).sum() + 0.5 * abs(b.sum() - p.sum())
    assert tv <= 0.002


@settings(max_examples=30)
@given(st.integers(2, 40), st.floats(0.01, 0.99), st.integers(0, 50))
def test_binomial_pmf_vector_property(n_trials, p, dmax):
    mine = exact.binomial_pmf_vector(n_trials, p, dmax)
    ref = sps.binom.pmf(np.arange(dmax + 1), n_trials, p)
    np.testing.assert_allclose(mine, ref, rtol=1e-9, atol=1e-300)
