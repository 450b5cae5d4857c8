import numpy as np
import pytest
from dataclasses import replace

from coxscreen.cox import fit
from coxscreen.errors import ValidationError
from coxscreen.simulate import (
    SimConfig,
    _rng,
    calibrate_censoring,
    config_from_kv,
    config_to_kv,
    example_config,
    gen_covariates,
    gen_replicate,
    gen_survival_times,
    linear_predictor_covariance,
)


class TestCovariates:
    def test_independent_columns(self):
        config = SimConfig(n=1000, p=5, beta={})
        z = gen_covariates(config, _rng(1, 0, 0))
        corr = np.corrcoef(z, rowvar=False)
        off = corr[~np.eye(5, dtype=bool)]
        assert np.all(np.abs(off) < 0.1)

    def test_equicorrelated_mean_offdiagonal(self):
        values = []
        for rep in range(20):
            config = SimConfig(n=1000, p=10, beta={}, correlation="equicorrelated", rho=0.5)
            z = gen_covariates(config, _rng(2, rep, 0))
            corr = np.corrcoef(z, rowvar=False)
            values.append(corr[~np.eye(10, dtype=bool)].mean())
        assert abs(np.mean(values) - 0.5) < 0.05

    def test_block_last_independent(self):
        config = example_config(3, n=1000, p=20, seed=4)
        z = gen_covariates(config, _rng(4, 0, 0))
        corr = np.corrcoef(z, rowvar=False)
        assert abs(corr[0, 19]) < 0.05  # last column independent of the block
        assert corr[0, 1] > 0.8

    def test_frobenius_convergence(self):
        # the shared-factor sampling error keeps the distance near 0.14 at
        # n=5000, so convergence is checked at a larger n as well
        rho = 0.5
        sigma = (1 - rho) * np.eye(10) + rho
        dists = {}
        for n in (5000, 50000):
            config = SimConfig(n=n, p=10, beta={}, correlation="equicorrelated", rho=rho)
            z = gen_covariates(config, _rng(7, 0, 0))
            dists[n] = np.linalg.norm(np.cov(z, rowvar=False) - sigma)
        assert dists[5000] < 0.3
        assert dists[50000] < 0.1


class TestSurvivalTimes:
    def test_unit_exponential_at_zero_beta(self):
        z = np.zeros((10000, 1))
        t, clipped = gen_survival_times(z, [0.0], 0.0, _rng(1, 0, 0))
        assert clipped == 0
        assert abs(t.mean() - 1.0) < 0.1

    def test_negative_intercept_scales_mean(self):
        z = np.zeros((10000, 1))
        t, _ = gen_survival_times(z, [0.0], -1.0, _rng(2, 0, 0))
        assert abs(t.mean() - np.e) < 0.3

    def test_conditional_median_closed_form(self):
        beta = np.array([0.8])
        for z_value in (-1.0, 0.0, 1.5):
            z = np.full((20000, 1), z_value)
            t, _ = gen_survival_times(z, beta, 0.0, _rng(3, int(z_value * 10) + 100, 0))
            expected = np.log(2) * np.exp(-beta[0] * z_value)
            assert np.median(t) == pytest.approx(expected, rel=0.05)

    def test_extreme_predictor_clipped(self):
        z = np.full((10, 1), 100.0)
        _, clipped = gen_survival_times(z, [10.0], 0.0, _rng(4, 0, 0))
        assert clipped == 10


class TestCalibration:
    def test_achieves_target(self):
        config = example_config(1, n=100, p=10, seed=11)
        c, achieved = calibrate_censoring(config, 0.2)
        assert abs(achieved - 0.2) <= 0.01
        # fresh validation batch
        rates = [
            gen_replicate(replace(config, censor_upper=c), rid).realized_censoring
            for rid in range(50)
        ]
        assert abs(np.mean(rates) - 0.2) < 0.02

    def test_low_target_gives_large_c(self):
        config = example_config(1, n=100, p=10, seed=12)
        c_small, achieved = calibrate_censoring(config, 0.01)
        c_mid, _ = calibrate_censoring(config, 0.2)
        assert c_small > c_mid
        assert achieved <= 0.03

    def test_monotone_in_target(self):
        config = example_config(1, n=100, p=10, seed=13)
        c_60, _ = calibrate_censoring(config, 0.6)
        c_20, _ = calibrate_censoring(config, 0.2)
        assert c_60 < c_20

    def test_invalid_target(self):
        config = example_config(1, n=50, p=10, seed=1)
        with pytest.raises(ValidationError):
            calibrate_censoring(config, 1.5)


class TestReplicates:
    def test_deterministic(self):
        config = example_config(1, n=50, p=10, censor_target=0.2, seed=21)
        a = gen_replicate(config, 3)
        b = gen_replicate(config, 3)
        assert a.dataset == b.dataset

    def test_distinct_ids_differ(self):
        config = example_config(1, n=50, p=10, censor_target=0.2, seed=21)
        assert gen_replicate(config, 1).dataset != gen_replicate(config, 2).dataset

    def test_true_active_matches_support(self):
        config = example_config(1, n=50, p=10, seed=21)
        rep = gen_replicate(config, 0)
        assert rep.true_active == (1, 2, 3, 4, 5, 6)

    def test_realized_censoring_near_target(self):
        config = example_config(1, n=100, p=10, censor_target=0.2, seed=22)
        c, _ = calibrate_censoring(config)
        config = replace(config, censor_upper=c)
        rates = [gen_replicate(config, rid).realized_censoring for rid in range(100)]
        assert abs(np.mean(rates) - 0.2) < 0.03

    def test_no_censoring_when_target_zero(self):
        config = SimConfig(n=30, p=3, beta={1: 1.0}, seed=5)
        rep = gen_replicate(config, 0)
        assert rep.realized_censoring == 0.0


class TestDesignProperties:
    def test_example1_hidden_variable_uncorrelated(self):
        config = example_config(1, n=100, p=1000)
        cov = linear_predictor_covariance(config)
        assert cov[5] == pytest.approx(0.0, abs=1e-12)  # variable 6 is hidden
        assert cov[0] == pytest.approx(0.5 * 1.0 + 0.5 * (5 * 1.0 - 2.5))

    def test_example3_hidden_variable_weak(self):
        config = example_config(3, n=100, p=50)
        cov = linear_predictor_covariance(config)
        # last variable: independent of the block, so only its own coefficient
        assert cov[-1] == pytest.approx(1.0)
        # noise columns inside the block inherit 0.9 * 10 from variable 1
        assert cov[1] == pytest.approx(9.0)

    def test_fit_recovers_truth_at_large_n(self):
        config = example_config(1, n=2000, p=10, censor_target=0.2, seed=31)
        c, _ = calibrate_censoring(config)
        rep = gen_replicate(replace(config, censor_upper=c), 0)
        result = fit(rep.dataset, list(rep.true_active))
        truth = np.array([1, 1, 1, 1, 1, -2.5])
        se = np.sqrt(result.variances)
        assert np.all(np.abs(result.coefficients - truth) <= 3 * se)


class TestConfigSerialization:
    def test_roundtrip(self, tmp_path):
        config = example_config(2, n=77, p=33, censor_target=0.6, seed=9)
        path = tmp_path / "sim.cfg"
        config_to_kv(config, path)
        assert config_from_kv(path) == config

    def test_bad_line_rejected(self, tmp_path):
        path = tmp_path / "sim.cfg"
        path.write_text("n=10\np=2\nnot a kv line\n")
        with pytest.raises(ValidationError, match="key=value"):
            config_from_kv(path)

    def test_examples_validate(self):
        for ex in (1, 2, 3):
            config = example_config(ex, n=100, p=20)
            assert config.censor_target == 0.2
        with pytest.raises(ValidationError):
            example_config(4)
