"""Tests for the Monte Carlo experiment runner and its diagnostics."""

import math

import numpy as np
import pytest
from scipy import stats

from sphereproj import (InvalidInputError, WindowSpec, cube, df_ks,
                        duplicated_basis, explicit, factorial_moments,
                        finite_d_intensity, gaussian_intensity,
                        poisson_diagnostics, poisson_pmf,
                        run_point_process_experiment, uniform_sphere)
from sphereproj.experiments import gaussian_cdf, summary_fields


class TestFactorialMoments:
    def test_all_zero_counts(self):
        fm = factorial_moments({0: 1000}, 1000, 4)
        assert all(e == 0.0 and se == 0.0 for e, se in fm)

    def test_constant_two(self):
        fm = factorial_moments({2: 500}, 500, 2)
        assert fm[0] == (2.0, 0.0)
        assert fm[1] == (1.0, 0.0)

    def test_synthetic_poisson_hits_targets(self):
        lam, m = 0.35, 10**5
        counts = np.random.default_rng(7).poisson(lam, m)
        hist = {int(c): int(o) for c, o in zip(*np.unique(counts, return_counts=True))}
        fm = factorial_moments(hist, m, 4)
        for k, (e, se) in enumerate(fm, start=1):
            target = lam**k / math.factorial(k)
            assert abs(e - target) <= 4 * max(se, 1e-12)

    def test_inconsistent_histogram_rejected(self):
        with pytest.raises(InvalidInputError):
            factorial_moments({0: 10}, 11, 2)

    def test_large_count_float_path(self):
        fm = factorial_moments({100: 10}, 10, 3)
        assert fm[0][0] == 100.0
        assert fm[2][0] == pytest.approx(math.comb(100, 3), rel=1e-12)


class TestPoissonDiagnostics:
    def test_exact_distribution_leaves_truncation_only(self):
        lam, m = 0.5, 1.0
        hist = {c: m * stats.poisson.pmf(c, lam) for c in range(21)}
        tv, dispersion, even = poisson_diagnostics(hist, m, lam)
        assert tv < 1e-12
        assert dispersion == pytest.approx(1.0, abs=1e-9)

    def test_two_point_histogram(self):
        tv, dispersion, even = poisson_diagnostics({0: 500, 2: 500}, 1000, 1.0)
        assert even == 1.0
        assert dispersion == pytest.approx(1.0)

    def test_pmf_recursion_base(self):
        assert poisson_pmf(0.5, 0)[0] == pytest.approx(0.6065306597126334236, abs=1e-16)
        pm = poisson_pmf(1.0, 30)
        assert pm.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(pm, stats.poisson.pmf(np.arange(31), 1.0), atol=1e-14)

    def test_zero_mean_dispersion_is_nan(self):
        tv, dispersion, even = poisson_diagnostics({0: 10}, 10, 0.5)
        assert math.isnan(dispersion)
        assert even == 1.0

    @pytest.mark.parametrize("lam", [0.1, 0.35, 1.0])
    def test_pipeline_oracle(self, lam):
        # synthetic Poisson counts, geometry bypassed entirely
        m = 10**5
        counts = np.random.default_rng(int(lam * 1000)).poisson(lam, m)
        hist = {int(c): int(o) for c, o in zip(*np.unique(counts, return_counts=True))}
        tv, dispersion, _ = poisson_diagnostics(hist, m, lam)
        assert tv <= 0.01
        assert 0.9 < dispersion < 1.1


@pytest.fixture(scope="module")
def small_run():
    cfg = cube(12)
    win = WindowSpec(level=0.4, lo=0.0, hi=2.0)
    return run_point_process_experiment(cfg, uniform_sphere(), win,
                                        m=2000, K=3, master_seed=17)


class TestRunner:
    def test_histogram_sums_to_m(self, small_run):
        assert sum(small_run.histogram.values()) == small_run.m == 2000

    def test_lambdas(self, small_run):
        assert small_run.lambda_limit == pytest.approx(2 * gaussian_intensity(0.4))
        assert small_run.lambda_finite_d == pytest.approx(2 * finite_d_intensity(0.4, 12))

    def test_first_moment_is_histogram_mean(self, small_run):
        mean = sum(c * o for c, o in small_run.histogram.items()) / small_run.m
        assert small_run.factorial_moments[0][0] == mean

    def test_dispersion_identity(self, small_run):
        e1 = small_run.factorial_moments[0][0]
        e2 = small_run.factorial_moments[1][0]
        assert small_run.dispersion == pytest.approx((2 * e2 + e1 - e1 * e1) / e1, rel=1e-12)

    def test_deterministic_rerun(self, small_run):
        again = run_point_process_experiment(cube(12), uniform_sphere(),
                                             WindowSpec(level=0.4, lo=0.0, hi=2.0),
                                             m=2000, K=3, master_seed=17)
        assert again == small_run

    def test_workers_do_not_change_result(self, small_run):
        par = run_point_process_experiment(cube(12), uniform_sphere(),
                                           WindowSpec(level=0.4, lo=0.0, hi=2.0),
                                           m=2000, K=3, master_seed=17, workers=4)
        assert par == small_run

    def test_first_moment_near_intensity(self, small_run):
        e1, se1 = small_run.factorial_moments[0]
        assert abs(e1 - small_run.lambda_finite_d) <= 4 * se1

    def test_even_counts_forced_at_level_zero(self):
        res = run_point_process_experiment(cube(14), uniform_sphere(),
                                           WindowSpec(level=0.0, lo=-1.0, hi=1.0),
                                           m=300, K=1, master_seed=5)
        assert res.even_fraction == 1.0

    def test_summary_fields_shape(self, small_run):
        fields = summary_fields(small_run, {"config": "cube:12"})
        names = [n for n, _ in fields]
        assert names[:3] == ["m", "lambda_limit", "lambda_finite_d"]
        assert "e1" in names and "se3" in names and names[-1] == "config"


class TestDfKs:
    def test_single_point_jump(self):
        cfg = explicit(np.array([[1.0, 0.0]]))
        stat = df_ks(cfg, uniform_sphere(), 1, master_seed=3)
        from sphereproj import sample_direction, project
        v = project(cfg, 0, sample_direction(uniform_sphere(), 2, 3, 0))
        assert stat == pytest.approx(max(gaussian_cdf(v), 1 - gaussian_cdf(v)), abs=1e-12)

    def test_gaussian_cdf_accuracy(self):
        assert gaussian_cdf(0.0) == 0.5
        assert gaussian_cdf(1.959963984540054) == pytest.approx(0.975, abs=1e-12)
        assert gaussian_cdf(-8.0) == pytest.approx(6.2209605742718204e-16, rel=1e-9)

    def test_dup_basis_all_points(self):
        # DF conditions hold for the duplicated basis: global Gaussian limit is fine
        cfg = duplicated_basis(400, 0.5)
        assert df_ks(cfg, uniform_sphere(), cfg.n, master_seed=11) <= 0.05

    def test_subsampling_path(self):
        stat = df_ks(cube(30), uniform_sphere(), 4000, master_seed=2)
        assert 0.0 < stat <= 0.1
