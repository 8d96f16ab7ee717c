import numpy as np
import pytest
from scipy.stats import beta as beta_dist

from densreg import (
    DensityGrid,
    Grid,
    SupportInterval,
    cdf_of,
    demix_uniform,
    estimate_support,
    kde_estimate,
    mix_with_uniform,
    quantile_of,
    rescale_to_unit,
    silverman_bandwidth,
    truncate_normalize,
)
from densreg.errors import (
    AlphaOutOfRange,
    DegenerateSample,
    EmptyDensity,
    InsufficientData,
    OutOfSupport,
    ValidationError,
)
from densreg.grids import integrate
from conftest import gaussian_bump_mixture, linear_density, uniform_density


class TestEstimateSupport:
    def test_unit_kappa_margins(self):
        # s = 1, n = 3: bounds move out by 1/sqrt(3)
        support = estimate_support([1.0, 2.0, 3.0], 1.0, 1.0)
        assert support.lower == pytest.approx(1.0 - 1.0 / np.sqrt(3.0), abs=1e-12)
        assert support.upper == pytest.approx(3.0 + 1.0 / np.sqrt(3.0), abs=1e-12)
        assert support.lower == pytest.approx(0.42265, abs=1e-5)
        assert support.upper == pytest.approx(3.57735, abs=1e-5)

    def test_two_samples_corrected_std(self):
        # s = sqrt(1/2), n = 2: margin = 0.5 exactly
        support = estimate_support([0.0, 1.0], 1.0, 1.0)
        assert support.sample_std == pytest.approx(np.sqrt(0.5))
        assert support.lower == pytest.approx(-0.5)
        assert support.upper == pytest.approx(1.5)

    def test_degenerate_sample(self):
        with pytest.raises(DegenerateSample):
            estimate_support([5.0, 5.0, 5.0])

    def test_too_few_samples(self):
        with pytest.raises(InsufficientData):
            estimate_support([1.0])

    def test_kappa_below_one_rejected(self):
        with pytest.raises(ValidationError):
            estimate_support([0.0, 1.0], kappa_lower=0.5)

    def test_strictly_contains_sample_range(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            x = rng.normal(size=rng.integers(2, 40)) * rng.uniform(0.1, 10)
            if np.std(x, ddof=1) == 0:
                continue
            s = estimate_support(x, rng.uniform(1, 3), rng.uniform(1, 3))
            assert s.lower < x.min() and s.upper > x.max()


class TestRescaleToUnit:
    def test_affine_map(self):
        support = SupportInterval(lower=0.0, upper=4.0)
        np.testing.assert_allclose(
            rescale_to_unit([1.0, 2.0, 3.0], support), [0.25, 0.5, 0.75]
        )

    def test_identity_support(self):
        support = SupportInterval(lower=0.0, upper=1.0)
        np.testing.assert_allclose(rescale_to_unit([0.0, 1.0], support), [0.0, 1.0])

    def test_out_of_support(self):
        with pytest.raises(OutOfSupport):
            rescale_to_unit([5.0], SupportInterval(lower=0.0, upper=4.0))

    def test_round_trip_recovers_raw_samples(self):
        rng = np.random.default_rng(11)
        raw = rng.normal(3.0, 2.0, size=50)
        support = estimate_support(raw)
        back = support.from_unit(rescale_to_unit(raw, support))
        np.testing.assert_allclose(back, raw, rtol=1e-12)


class TestKdeEstimate:
    def test_too_few_samples(self, grid201):
        with pytest.raises(InsufficientData):
            kde_estimate([0.5, 0.5, 0.5, 0.5], grid201)

    def test_mode_at_dominant_sample(self, grid201):
        samples = np.concatenate([np.full(200, 0.62), np.array([0.1, 0.9])])
        raw = kde_estimate(samples, grid201)
        peak = grid201.nodes[np.argmax(raw)]
        assert abs(peak - 0.62) < 0.02

    def test_silverman_bandwidth_formula(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0, 1, 500)
        s = np.std(x, ddof=1)
        q75, q25 = np.percentile(x, [75, 25])
        expected = 0.9 * min(s, (q75 - q25) / 1.34) * 500 ** (-0.2)
        assert silverman_bandwidth(x) == pytest.approx(expected)

    def test_uniform_draws_flat_in_the_interior(self, grid1001):
        rng = np.random.default_rng(42)
        samples = rng.uniform(0, 1, 10_000)
        raw = kde_estimate(samples, grid1001)
        interior = (grid1001.nodes >= 0.1) & (grid1001.nodes <= 0.9)
        assert np.max(np.abs(raw[interior] - 1.0)) < 0.1

    def test_beta_draws_close_to_analytic_density(self, grid1001):
        rng = np.random.default_rng(42)
        samples = beta_dist(6, 3).rvs(10_000, random_state=rng)
        estimate = truncate_normalize(kde_estimate(samples, grid1001), grid1001)
        truth = beta_dist(6, 3).pdf(grid1001.nodes)
        truth = truth / integrate(truth, grid1001)
        assert integrate(np.abs(estimate.values - truth), grid1001) < 0.05


class TestTruncateNormalize:
    def test_constant(self, grid201):
        out = truncate_normalize(np.full(201, 2.0), grid201)
        np.testing.assert_allclose(out.values, 1.0)

    def test_linear(self, grid201):
        out = truncate_normalize(grid201.nodes.copy(), grid201)
        np.testing.assert_allclose(out.values, 2.0 * grid201.nodes, atol=1e-12)

    def test_all_zero(self, grid201):
        with pytest.raises(EmptyDensity):
            truncate_normalize(np.zeros(201), grid201)

    def test_negative_rejected(self, grid201):
        raw = np.ones(201)
        raw[3] = -0.5
        with pytest.raises(ValidationError):
            truncate_normalize(raw, grid201)


class TestMixDemix:
    def test_uniform_is_fixed_point(self, grid201):
        mixed = mix_with_uniform(uniform_density(grid201), 0.3)
        np.testing.assert_allclose(mixed.values, 1.0)

    def test_linear_blend(self, grid201):
        mixed = mix_with_uniform(linear_density(grid201), 0.5)
        np.testing.assert_allclose(mixed.values, grid201.nodes + 0.5, atol=1e-12)

    def test_alpha_range_enforced(self, grid201):
        with pytest.raises(AlphaOutOfRange):
            mix_with_uniform(uniform_density(grid201), 0.1)

    def test_alpha_override_warns(self, grid201):
        with pytest.warns(UserWarning):
            mixed = mix_with_uniform(uniform_density(grid201), 0.1, allow_any_alpha=True)
        assert mixed.alpha == 0.1

    def test_minimum_at_least_alpha(self, grid201):
        rng = np.random.default_rng(5)
        for _ in range(10):
            alpha = rng.uniform(0.2, 0.5)
            mixed = mix_with_uniform(gaussian_bump_mixture(rng, grid201), alpha)
            assert mixed.values.min() >= alpha - 1e-12
            assert integrate(mixed.values, grid201) == pytest.approx(1.0, abs=1e-9)

    def test_demix_inverts_mix_exactly(self, grid201):
        rng = np.random.default_rng(6)
        for _ in range(10):
            f = gaussian_bump_mixture(rng, grid201)
            alpha = rng.uniform(0.2, 0.5)
            back = demix_uniform(mix_with_uniform(f, alpha), alpha)
            assert integrate(np.abs(back.values - f.values), grid201) < 1e-10

    def test_demix_linear_case(self, grid201):
        mixed = mix_with_uniform(linear_density(grid201), 0.5)
        back = demix_uniform(mixed, 0.5)
        np.testing.assert_allclose(back.values, 2.0 * grid201.nodes, atol=1e-12)

    def test_demix_uniform_stays_uniform(self, grid201):
        back = demix_uniform(uniform_density(grid201), 0.3)
        np.testing.assert_allclose(back.values, 1.0)


class TestCdf:
    def test_uniform(self, grid201):
        cdf = cdf_of(uniform_density(grid201))
        np.testing.assert_allclose(cdf.values, grid201.nodes, atol=1e-12)

    def test_linear_density(self, grid1001):
        cdf = cdf_of(linear_density(grid1001))
        np.testing.assert_allclose(cdf.values, grid1001.nodes**2, atol=1e-4)

    def test_mixed_linear(self, grid1001):
        mixed = mix_with_uniform(linear_density(grid1001), 0.5)
        cdf = cdf_of(mixed)
        x = grid1001.nodes
        np.testing.assert_allclose(cdf.values, x**2 / 2 + x / 2, atol=1e-4)

    def test_endpoints_pinned(self, grid201):
        rng = np.random.default_rng(8)
        cdf = cdf_of(gaussian_bump_mixture(rng, grid201))
        assert cdf.values[0] == 0.0
        assert cdf.values[-1] == 1.0
        assert np.all(np.diff(cdf.values) >= 0)


class TestQuantile:
    def test_uniform(self, grid201):
        q = quantile_of(mix_with_uniform(uniform_density(grid201), 0.3))
        np.testing.assert_allclose(q.values, grid201.nodes, atol=1e-9)

    def test_mixed_linear_closed_form(self, grid1001):
        mixed = mix_with_uniform(linear_density(grid1001), 0.5)
        q = quantile_of(mixed)
        t = grid1001.nodes
        np.testing.assert_allclose(q.values, -0.5 + np.sqrt(0.25 + 2 * t), atol=1e-6)

    def test_quantile_of_cdf_is_identity_within_two_spacings(self, grid1001):
        rng = np.random.default_rng(9)
        for _ in range(5):
            mixed = mix_with_uniform(gaussian_bump_mixture(rng, grid1001), 0.3)
            cdf = cdf_of(mixed)
            q = quantile_of(mixed)
            q_of_f = np.interp(cdf.values, grid1001.nodes, q.values)
            assert np.max(np.abs(q_of_f - grid1001.nodes)) < 2 * grid1001.spacing
