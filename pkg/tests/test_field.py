import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from poissonfield import field, stable
from poissonfield.field import FieldModel, FieldRealization, Interferer


def rng(seed=0):
    return np.random.default_rng(seed)


# ---------------------------------------------------------------- sample_field


def test_empty_field_in_zero_density_limit():
    model = FieldModel(lam=1e-12, b=2.0, r_max=1.0)
    g = rng(1)
    assert all(len(field.sample_field(model, g)) == 0 for _ in range(1000))


def test_mean_node_count():
    model = FieldModel(lam=0.1, b=2.0, r_max=100.0)
    g = rng(2)
    counts = np.array([len(field.sample_field(model, g)) for _ in range(10**4)])
    expected = 1000 * math.pi
    assert model.mean_count == pytest.approx(expected)
    assert abs(counts.mean() - expected) < 3 * math.sqrt(expected / counts.size)


def test_radii_area_uniform():
    model = FieldModel(lam=0.5, b=2.0, r_max=8.0)
    g = rng(3)
    u = []
    while sum(map(len, u)) < 10**5:
        u.append((field.sample_field(model, g).r / model.r_max) ** 2)
    u = np.concatenate(u)[: 10**5]
    assert np.all((u > 0) & (u <= 1))
    assert stats.kstest(u, "uniform").statistic < field.ks_critical_1pct(u.size)


def test_shadowing_standard_normal():
    model = FieldModel(lam=0.5, b=2.0, sigma=0.3, r_max=50.0)
    g = field.sample_field(model, rng(4)).g
    assert stats.kstest(g, "norm").statistic < field.ks_critical_1pct(g.size)


# ---------------------------------------------------------------- aggregate_A


def test_aggregate_examples():
    assert field.aggregate_A([], 2.0, 0.0) == 0.0
    assert field.aggregate_A(FieldRealization(np.array([])), 2.0, 0.3) == 0.0
    for b in (1.1, 2.0, 3.7):
        assert field.aggregate_A([Interferer(1.0, 0.0)], b, 0.5) == 1.0
    assert field.aggregate_A([Interferer(1.0, 0.0), Interferer(2.0, 0.0)], 2.0, 0.0) == 1.0625


def test_aggregate_with_shadowing():
    nodes = [Interferer(2.0, 0.5)]
    assert field.aggregate_A(nodes, 1.5, 0.4) == pytest.approx(math.exp(0.4) / 2.0**3)


nodes_st = st.lists(st.builds(Interferer, st.floats(1e-2, 1e2), st.floats(-4, 4)), max_size=30)


@settings(max_examples=100, deadline=None)
@given(nodes=nodes_st, seed=st.integers(0, 2**32 - 1), b=st.floats(1.05, 4.0), sigma=st.floats(0, 1.5))
def test_aggregate_permutation_invariant(nodes, seed, b, sigma):
    perm = list(np.random.default_rng(seed).permutation(len(nodes))) if nodes else []
    shuffled = [nodes[i] for i in perm]
    assert field.aggregate_A(shuffled, b, sigma) == pytest.approx(field.aggregate_A(nodes, b, sigma), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(a=nodes_st, c=nodes_st, b=st.floats(1.05, 4.0), sigma=st.floats(0, 1.5))
def test_aggregate_additive(a, c, b, sigma):
    joint = field.aggregate_A(a + c, b, sigma)
    assert joint == pytest.approx(field.aggregate_A(a, b, sigma) + field.aggregate_A(c, b, sigma), rel=1e-12)


def test_realization_iterates_interferers():
    real = FieldRealization(np.array([1.0, 2.0]), np.array([0.0, 0.1]))
    assert list(real) == [Interferer(1.0, 0.0), Interferer(2.0, 0.1)]
    assert field.aggregate_A(real, 2.0, 0.2) == field.aggregate_A(list(real), 2.0, 0.2)


# ---------------------------------------------------------------- truncation


@pytest.mark.parametrize("lam,b,sigma", [(0.1, 2.0, 0.0), (0.05, 1.5, 0.5), (0.01, 2.0, 1.15), (1.0, 3.0, 0.2)])
@pytest.mark.parametrize("compensate", [True, False])
def test_default_r_max_meets_bias_bound(lam, b, sigma, compensate):
    model = FieldModel(lam, b, sigma, compensate_far_field=compensate)
    median = field.target_median(lam, b, sigma)
    err = field.truncation_error(model)
    assert err < field.BIAS_FRACTION * median
    assert err == pytest.approx(field.BIAS_FRACTION / field.SAFETY_FACTOR * median, rel=1e-9)


def test_uncompensated_mass_formula():
    lam, b, sigma, r = 0.1, 2.0, 0.3, 40.0
    expected = 2 * math.pi * lam * math.exp(2 * sigma**2) * r ** (2 - 2 * b) / (2 * b - 2)
    assert field.far_field_mean(lam, b, sigma, r) == pytest.approx(expected, rel=1e-14)


def test_far_field_mean_matches_simulation():
    # Nodes in the annulus [r1, r2] have mean sum equal to the difference of far-field means.
    lam, b, sigma, r1, r2 = 0.2, 2.0, 0.3, 2.0, 20.0
    g = rng(5)
    sums = []
    for _ in range(4000):
        n = g.poisson(lam * math.pi * (r2**2 - r1**2))
        r = np.sqrt(g.uniform(r1**2, r2**2, n))
        sums.append(np.sum(np.exp(2 * sigma * g.standard_normal(n)) / r ** (2 * b)))
    sums = np.array(sums)
    expected = field.far_field_mean(lam, b, sigma, r1) - field.far_field_mean(lam, b, sigma, r2)
    assert abs(sums.mean() - expected) < 4 * sums.std() / math.sqrt(sums.size)


def test_target_median_levy():
    # Median of S(1/2, 1, gamma) is gamma^2 * 2.19810933831773240 (erfc^-1(1/2) closed form).
    gamma = stable.interference_stable_params(0.1, 2.0, 0.0).gamma
    assert field.target_median(0.1, 2.0, 0.0) == pytest.approx(gamma**2 * 2.19810933831773240, rel=1e-9)


def test_model_validation():
    for kw in (dict(lam=0, b=2), dict(lam=1, b=1), dict(lam=1, b=2, sigma=-1), dict(lam=1, b=2, r_max=0)):
        with pytest.raises(ValueError):
            FieldModel(**kw)


# ---------------------------------------------------------------- simulation


def test_simulation_deterministic_and_worker_independent():
    model = FieldModel(0.1, 2.0, 0.2)
    a = field.simulate_A(model, 5000, seed=7, workers=1)
    b = field.simulate_A(model, 5000, seed=7, workers=3)
    assert a.shape == (5000,)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, field.simulate_A(model, 5000, seed=8))


def test_simulation_prefix_stable():
    # Trials are keyed by chunk, so a longer run extends a shorter one
    # whenever the shorter run ends on a chunk boundary.
    model = FieldModel(0.1, 2.0)
    m = 2 * field.CHUNK_SIZE
    short = field.simulate_A(model, m, seed=1)
    long = field.simulate_A(model, 3 * m + 5, seed=1)
    assert np.array_equal(short, long[:m])


def test_simulation_requires_seed_and_trials():
    model = FieldModel(0.1, 2.0)
    with pytest.raises(ValueError):
        field.simulate_A(model, 0, seed=1)
    with pytest.raises(ValueError):
        field.simulate_A(model, 10, seed=None)


def test_fixed_radius_levy_ks():
    model = FieldModel(0.1, 2.0, 0.0, r_max=200.0)
    n = 10**4
    sample = field.empirical_A_cdf(model, n, seed=11)
    assert np.all(np.diff(sample) >= 0)
    gamma = stable.interference_stable_params(0.1, 2.0, 0.0).gamma
    d = field.ks_distance(sample, lambda x: np.array([stable.levy_cdf(gamma, v) for v in x]), grid_step=1)
    assert d < field.ks_critical_1pct(n)


def test_medians_increase_with_density():
    n = 10**5
    k = int(1.5 * math.sqrt(n))  # order-statistic half-width of a ~3-sigma median band
    lo_model, hi_model = FieldModel(0.05, 2.0), FieldModel(0.1, 2.0)
    a = field.empirical_A_cdf(lo_model, n, seed=21)
    b = field.empirical_A_cdf(hi_model, n, seed=22)
    assert a[n // 2 + k] < b[n // 2 - k]


# ---------------------------------------------------------------- KS helper


def test_ks_distance_matches_scipy():
    x = np.sort(rng(9).standard_normal(4000))
    exact = stats.kstest(x, "norm").statistic
    assert field.ks_distance(x, stats.norm.cdf, grid_step=1) == pytest.approx(exact, abs=1e-12)
    bound = field.ks_distance(x, stats.norm.cdf, grid_step=50)
    assert exact <= bound + 1e-12
    assert bound - exact < 50 / 4000 + 0.01


def test_ks_critical_value():
    assert field.ks_critical_1pct(10**5) == pytest.approx(1.63 / math.sqrt(1e5))
