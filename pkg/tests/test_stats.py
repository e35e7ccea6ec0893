"""KS tests, Q-Q data and moment estimators: brute-force oracles, null
calibration and the documented invariances."""

import numpy as np
import pytest

from nvmlevy import DomainError, KSResult, ks_one_sample, ks_two_sample, make_stream, moments, qq_points
from nvmlevy.stats import normal_cdf


def brute_force_one_sample_stat(samples, cdf):
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    best = 0.0
    for i, xi in enumerate(x):
        f = cdf(np.array([xi]))[0]
        best = max(best, abs((i + 1) / n - f), abs(i / n - f))
    return best


def brute_force_two_sample_stat(a, b):
    grid = np.unique(np.concatenate([a, b]))
    best = 0.0
    for g in grid:
        fa = np.mean(a <= g)
        fb = np.mean(b <= g)
        best = max(best, abs(fa - fb))
    return best


class TestOneSample:
    def test_statistic_matches_brute_force(self):
        rng = make_stream(41)
        x = rng.normal(size=200)
        res = ks_one_sample(x, normal_cdf)
        assert res.statistic == pytest.approx(brute_force_one_sample_stat(x, normal_cdf), abs=1e-15)

    def test_null_calibration_at_one_percent(self):
        # Exact-null rejection rate over 2000 replications of n=500 must sit
        # at the nominal 1% level within half a percentage point.
        rng = make_stream(42)
        rejections = 0
        reps = 2000
        for _ in range(reps):
            x = rng.normal(size=500)
            if ks_one_sample(x, normal_cdf).p_value < 0.01:
                rejections += 1
        rate = rejections / reps
        assert 0.005 <= rate <= 0.015, f"null rejection rate {rate}"

    def test_degenerate_samples_have_large_statistic(self):
        res = ks_one_sample(np.zeros(100), normal_cdf)
        assert res.statistic >= 0.5

    def test_rejects_tiny_samples(self):
        with pytest.raises(DomainError):
            ks_one_sample(np.arange(5), normal_cdf)

    def test_rejects_degenerate_cdf(self):
        with pytest.raises(DomainError):
            ks_one_sample(np.arange(20.0), lambda x: np.full_like(np.asarray(x, float), 0.5))

    def test_rejects_decreasing_cdf(self):
        with pytest.raises(DomainError):
            ks_one_sample(np.arange(20.0), lambda x: 1.0 - normal_cdf(x))


class TestTwoSample:
    def test_identical_samples(self):
        x = np.arange(50.0)
        assert ks_two_sample(x, x).statistic == 0.0

    def test_disjoint_supports(self):
        res = ks_two_sample(np.arange(50.0), np.arange(50.0) + 100.0)
        assert res.statistic == 1.0
        assert res.p_value < 1e-10

    def test_symmetry(self):
        rng = make_stream(43)
        a, b = rng.normal(size=300), rng.normal(size=450) * 1.2
        ab, ba = ks_two_sample(a, b), ks_two_sample(b, a)
        assert ab.statistic == ba.statistic
        assert ab.p_value == ba.p_value

    def test_statistic_matches_brute_force(self):
        rng = make_stream(44)
        a, b = rng.normal(size=80), rng.normal(size=120) + 0.3
        res = ks_two_sample(a, b)
        assert res.statistic == pytest.approx(brute_force_two_sample_stat(a, b), abs=1e-15)

    def test_size_validation(self):
        with pytest.raises(DomainError):
            ks_two_sample(np.arange(5.0), np.arange(50.0))


class TestQQPoints:
    def test_identical_on_diagonal(self):
        rng = make_stream(45)
        x = rng.normal(size=500)
        pts = qq_points(x, x, 21)
        assert all(abs(a - b) < 1e-12 for a, b in pts)

    def test_scaled_sample_gives_slope_two(self):
        rng = make_stream(46)
        x = rng.normal(size=40_000)
        pts = qq_points(2.0 * x, x, 15)
        inner = [(a, b) for a, b in pts if abs(b) > 0.2]
        for a, b in inner:
            assert a / b == pytest.approx(2.0, rel=0.1)

    def test_permutation_invariance(self):
        rng = make_stream(47)
        x, y = rng.normal(size=300), rng.normal(size=200)
        pts = qq_points(x, y, 11)
        perm = qq_points(rng.permutation(x), rng.permutation(y), 11)
        assert pts == perm

    def test_k_validation(self):
        with pytest.raises(DomainError):
            qq_points(np.arange(10.0), np.arange(10.0), 1)


class TestMoments:
    def test_constant_samples(self):
        res = moments(np.full(64, 3.25))
        assert res.variance == 0.0
        assert res.skewness == 0.0

    def test_standard_normal_null(self):
        rng = make_stream(48)
        res = moments(rng.normal(size=100_000))
        assert abs(res.mean) <= 3.0 * res.se_mean
        assert abs(res.variance - 1.0) <= 3.0 * res.se_variance
        assert abs(res.excess_kurtosis) <= 3.0 * res.se_kurtosis
        lo, hi = res.kurtosis_ci99
        assert lo < 0.0 < hi

    def test_heavy_tailed_kurtosis_detected(self):
        rng = make_stream(49)
        x = rng.standard_t(df=6, size=50_000)
        res = moments(x)
        lo, _ = res.kurtosis_ci99
        assert lo > 0.0

    def test_deterministic_bootstrap(self):
        rng = make_stream(50)
        x = rng.normal(size=2000)
        a = moments(x)
        b = moments(x)
        assert a.kurtosis_ci99 == b.kurtosis_ci99

    def test_minimum_size(self):
        with pytest.raises(DomainError):
            moments(np.arange(10.0))


class TestKSResultValidation:
    def test_bounds_enforced(self):
        with pytest.raises(DomainError):
            KSResult(statistic=1.2, p_value=0.5, n=10)
        with pytest.raises(DomainError):
            KSResult(statistic=0.2, p_value=-0.1, n=10)
