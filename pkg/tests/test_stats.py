import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moneychains import dynamics, exact, graphs, stats


def test_histogram_basics():
    h = stats.Histogram()
    assert h.total_samples == 0
    h.add(3)
    h.add(3, 2)
    h.add(0, 5)
    assert h.counts == {3: 3, 0: 5}
    assert h.total_samples == 8
    assert h.to_array().tolist() == [5, 0, 0, 3]
    assert h.to_array(dmax=5).tolist() == [5, 0, 0, 3, 0, 0]
    np.testing.assert_allclose(h.to_probs(), [5 / 8, 0, 0, 3 / 8])


def test_histogram_rejects_negative():
    with pytest.raises(ValueError):
        stats.Histogram().add(1, -2)


def test_histogram_from_counts_and_merge():
    a = stats.Histogram.from_counts([1, 0, 2])
    b = stats.Histogram.from_counts({0: 1, 5: 3})
    merged = a.merge(b)
    assert merged.counts == {0: 2, 2: 2, 5: 3}
    assert merged.total_samples == a.total_samples + b.total_samples
    # inputs untouched
    assert a.counts == {0: 1, 2: 2}


@given(st.lists(st.lists(st.integers(0, 6), max_size=8), max_size=5))
def test_histogram_merge_associative_commutative(sample_sets):
    hs = []
    for vals in sample_sets:
        h = stats.Histogram()
        for v in vals:
            h.add(v)
        hs.append(h)
    left = stats.merge_all(hs)
    right = stats.merge_all(reversed(hs))
    assert left.counts == right.counts
    assert left.total_samples == sum(len(v) for v in sample_sets)
    # empty histogram is an identity
    assert left.merge(stats.Histogram()).counts == left.counts


def test_empty_histogram_probs_raises():
    with pytest.raises(stats.InsufficientSamplesError):
        stats.Histogram().to_probs()


def test_snapshot_marginal_pools_vertices():
    g = graphs.complete(3)
    s = dynamics.make_state(1, g, (2, 0, 1), seed=0)
    obs = stats.SnapshotMarginal()
    obs(s)
    assert obs.snapshots == 1
    assert obs.histogram.counts == {2: 1, 0: 1, 1: 1}
    obs(s)
    assert obs.histogram.total_samples == 6


def test_snapshot_marginal_single_vertex():
    g = graphs.complete(3)
    s = dynamics.make_state(1, g, (2, 0, 1), seed=0)
    obs = stats.SnapshotMarginal(vertices=[1])
    obs(s)
    obs(s)
    assert obs.histogram.counts == {0: 2}


def test_snapshot_marginal_frozen_chain_run():
    # observers through run() on a chain that cannot move
    g = graphs.path(3)
    s = dynamics.make_state(1, g, (0, 0, 0), seed=0)
    obs = stats.SnapshotMarginal()
    dynamics.run(s, g, 10, observers=[obs], stride=2)
    assert obs.snapshots == 5
    assert obs.histogram.counts == {0: 15}


def test_occupation_time_vector_and_scalar():
    counts = [6, 3, 1]
    vec = stats.occupation_time(counts, 10)
    np.testing.assert_allclose(vec, [0.6, 0.3, 0.1])
    assert stats.occupation_time(counts, 10, d=1) == 0.3
    assert stats.occupation_time(counts, 10, d=7) == 0.0
    with pytest.raises(stats.InsufficientSamplesError):
        stats.occupation_time(counts, 0)


def test_occupation_time_is_probability_vector_along_run():
    g = graphs.build_graph(2, [(0, 1)])
    for steps in (1, 7, 50):
        s = dynamics.make_state(2, g, (2, 0), seed=4)
        acc, weight = dynamics.run_occupation(s, g, steps, vertices=[0])
        vec = stats.occupation_time(acc, weight)
        assert vec.sum() == pytest.approx(1.0)
        assert (vec >= 0).all()


def test_tv_distance_basics():
    assert stats.tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert stats.tv_distance([1.0, 0.0], [0.0, 1.0]) == 1.0
    assert stats.tv_distance([0.7, 0.3], [0.5, 0.5]) == pytest.approx(0.2)


def test_tv_distance_validation():
    with pytest.raises(stats.NotNormalizedError):
        stats.tv_distance([0.5, 0.4], [0.5, 0.5])
    with pytest.raises(stats.NotNormalizedError):
        stats.tv_distance([0.5, 0.5], [0.5, 0.6])
    with pytest.raises(ValueError):
        stats.tv_distance([0.5, 0.5], [0.5, 0.25, 0.25])
    # just inside tolerance passes
    assert stats.tv_distance([0.5, 0.5 + 5e-10], [0.5, 0.5]) >= 0


@settings(max_examples=50)
@given(st.lists(st.floats(0.001, 1.0), min_size=2, max_size=20),
       st.lists(st.floats(0.001, 1.0), min_size=2, max_size=20))
def test_tv_distance_metric_properties(raw_p, raw_q):
    k = min(len(raw_p), len(raw_q))
    p = np.asarray(raw_p[:k]) / np.sum(raw_p[:k])
    q = np.asarray(raw_q[:k]) / np.sum(raw_q[:k])
    d = stats.tv_distance(p, q)
    assert 0.0 <= d <= 1.0
    assert d == pytest.approx(stats.tv_distance(q, p))
    assert stats.tv_distance(p, p) == 0.0


def test_chi_square_exact_binomial_data():
    # large sample drawn from the expected law itself: statistic near dof
    rng = np.random.default_rng(7)
    n = 200_000
    draws = rng.binomial(100, 0.3, size=n)
    h = stats.Histogram()
    h.add_array(draws)
    q = exact.binomial_pmf_vector(100, 0.3, 100)
    res = stats.chi_square(h, q)
    assert res.dof >= 10
    assert abs(res.statistic - res.dof) <= 4 * np.sqrt(2 * res.dof)


def test_chi_square_detects_wrong_law():
    rng = np.random.default_rng(8)
    draws = rng.binomial(100, 0.35, size=50_000)
    h = stats.Histogram()
    h.add_array(draws)
    q = exact.binomial_pmf_vector(100, 0.3, 100)
    res = stats.chi_square(h, q)
    assert res.statistic > res.dof + 10 * np.sqrt(2 * res.dof)


def test_chi_square_bucket_plan_properties():
    h = stats.Histogram.from_counts([30, 25, 20, 10, 10, 5])
    q = np.array([0.3, 0.25, 0.2, 0.1, 0.1, 0.05])
    res = stats.chi_square(h, q)
    n = h.total_samples
    # every closed bucket reaches the minimum expected count
    for s, e in res.buckets:
        mass = q[s:e].sum() if e is not None else 1.0 - q[:s].sum()
        assert n * mass >= 5.0 - 1e-9
    assert res.dof == len(res.buckets) - 1
    # buckets tile the support in order
    starts = [b[0] for b in res.buckets]
    assert starts == sorted(starts)
    assert res.buckets[0][0] == 0
    assert res.buckets[-1][1] is None


def test_chi_square_perfect_fit_is_zero():
    q = np.array([0.5, 0.3, 0.2])
    h = stats.Histogram.from_counts([50, 30, 20])
    res = stats.chi_square(h, q)
    assert res.statistic == pytest.approx(0.0, abs=1e-18)


def test_chi_square_insufficient_samples():
    q = np.array([0.5, 0.5])
    with pytest.raises(stats.InsufficientSamplesError):
        stats.chi_square(stats.Histogram.from_counts([2, 1]), q)
    with pytest.raises(stats.InsufficientSamplesError):
        stats.chi_square(stats.Histogram(), q)
    # point mass cannot produce two buckets no matter the sample size
    with pytest.raises(stats.InsufficientSamplesError):
        stats.chi_square(stats.Histogram.from_counts([1000]), np.array([1.0]))


def test_chi_square_truncated_expected_prefix():
    # geometric law truncated well before its tail is exhausted
    rng = np.random.default_rng(9)
    draws = rng.geometric(1 / 11, size=100_000) - 1  # mean 10
    h = stats.Histogram()
    h.add_array(draws)
    q = exact.model1_marginal_limit(10.0, np.arange(30))
    assert q.sum() < 0.95  # genuinely truncated
    res = stats.chi_square(h, q)
    assert abs(res.statistic - res.dof) <= 4 * np.sqrt(2 * res.dof)


def test_chi_square_statistic_merge_invariant():
    rng = np.random.default_rng(10)
    a, b = stats.Histogram(), stats.Histogram()
    a.add_array(rng.binomial(40, 0.5, size=30_000))
    b.add_array(rng.binomial(40, 0.5, size=30_000))
    q = exact.binomial_pmf_vector(40, 0.5, 40)
    r1 = stats.chi_square(a.merge(b), q)
    r2 = stats.chi_square(b.merge(a), q)
    assert r1 == r2


def test_chi_square_rejects_bad_expected():
    h = stats.Histogram.from_counts([10, 10])
    with pytest.raises(stats.NotNormalizedError):
        stats.chi_square(h, np.array([0.9, 0.3]))  # sums past 1
    with pytest.raises(stats.NotNormalizedError):
        stats.chi_square(h, np.array([-0.1, 0.6]))


def test_poolable_families_frozen():
    assert stats.POOLABLE_FAMILIES == {"complete", "cycle"}
