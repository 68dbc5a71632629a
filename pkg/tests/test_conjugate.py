import math

import numpy as np
import pytest
from scipy import optimize, stats

from oscseg.conjugate import (
    BetaConditional,
    beta_conditional,
    design_matrix,
    gibbs_sigma2_params,
    invgamma_logpdf,
    invgamma_sample,
    sigma2_conditional_params,
)
from oscseg.model import Hyperparams, basis_vector

from conftest import random_segment, segment_data


class TestDesignMatrix:
    def test_trend_only(self):
        X = design_matrix(np.arange(1.0, 6.0), np.empty(0))
        assert np.allclose(X[:, 0], 1.0)
        assert np.allclose(X[:, 1], np.arange(1.0, 6.0))

    def test_quarter_cycle_rows(self):
        X = design_matrix(np.arange(1.0, 5.0), np.array([0.25]))
        for i, t in enumerate(range(1, 5)):
            assert np.allclose(X[i], basis_vector(float(t), np.array([0.25])), atol=1e-12)

    def test_rowwise_oracle(self, rng):
        t = np.arange(3.0, 40.0)
        omega = np.array([0.07, 0.31])
        X = design_matrix(t, omega)
        for i, ti in enumerate(t):
            assert np.allclose(X[i], basis_vector(ti, omega), rtol=1e-12)

    def test_undersized_segment(self):
        with pytest.raises(ValueError):
            design_matrix(np.arange(1.0, 4.0), np.array([0.1]))


def neg_log_conditional(beta, y, X, sigma2, sigma2_beta):
    r = y - X @ beta
    return 0.5 * float(r @ r) / sigma2 + 0.5 * float(beta @ beta) / sigma2_beta


class TestBetaConditional:
    def test_no_shrinkage_limit(self, rng):
        y = rng.normal(0.0, 1.0, 4)
        X = np.eye(4)
        mean, cov = beta_conditional(y, X, 1.0, 1e12)
        assert np.allclose(mean, y, atol=1e-9)
        assert np.allclose(cov, np.eye(4), atol=1e-9)

    def test_zero_data_zero_mean(self, rng):
        X = rng.normal(0.0, 1.0, (20, 4))
        mean, _ = beta_conditional(np.zeros(20), X, 2.0, 10.0)
        assert np.allclose(mean, 0.0)

    def test_matches_optimizer_and_fd_hessian(self, rng):
        y = rng.normal(0.0, 2.0, 20)
        X = rng.normal(0.0, 1.0, (20, 4))
        sigma2, sigma2_beta = 1.7, 30.0
        mean, cov = beta_conditional(y, X, sigma2, sigma2_beta)

        res = optimize.minimize(
            neg_log_conditional, np.zeros(4), args=(y, X, sigma2, sigma2_beta), method="BFGS",
            options={"gtol": 1e-12},
        )
        assert np.allclose(res.x, mean, atol=1e-6)

        # central finite-difference Hessian of the negative log density
        h = 1e-4
        hess = np.empty((4, 4))
        for i in range(4):
            for j in range(4):
                e_i = np.zeros(4); e_i[i] = h
                e_j = np.zeros(4); e_j[j] = h
                f = lambda b: neg_log_conditional(b, y, X, sigma2, sigma2_beta)
                hess[i, j] = (
                    f(res.x + e_i + e_j) - f(res.x + e_i - e_j)
                    - f(res.x - e_i + e_j) + f(res.x - e_i - e_j)
                ) / (4 * h * h)
        assert np.allclose(np.linalg.inv(hess), cov, atol=1e-6)

    def test_exact_conditional_mh_ratio_is_zero(self, rng):
        # independence proposal from the conditional always accepts
        for _ in range(100):
            n = int(rng.integers(8, 40))
            seg = random_segment(rng, n)
            y, t = segment_data(rng, seg, n)
            cond = BetaConditional.from_data(y, t, seg.omega, seg.sigma2, 100.0)
            prop = cond.sample(rng)
            X = design_matrix(t, seg.omega)
            log_ratio = (
                -neg_log_conditional(prop, y, X, seg.sigma2, 100.0)
                + neg_log_conditional(seg.beta, y, X, seg.sigma2, 100.0)
                + cond.logpdf(seg.beta)
                - cond.logpdf(prop)
            )
            assert abs(log_ratio) < 1e-8

    def test_covariance_spd(self, rng):
        for _ in range(30):
            n = int(rng.integers(8, 60))
            seg = random_segment(rng, n)
            y, t = segment_data(rng, seg, n)
            _, cov = beta_conditional(y, design_matrix(t, seg.omega), seg.sigma2, 1e4)
            np.linalg.cholesky(cov)  # raises if not SPD
            assert np.allclose(cov, cov.T, atol=1e-12)

    def test_shrinkage_monotone(self, rng):
        y = rng.normal(0.0, 2.0, 30)
        X = rng.normal(0.0, 1.0, (30, 5))
        norms = []
        for s2b in (100.0, 10.0, 1.0, 0.1, 0.01):
            mean, _ = beta_conditional(y, X, 1.0, s2b)
            norms.append(np.linalg.norm(mean))
        assert all(a >= b - 1e-12 for a, b in zip(norms, norms[1:]))

    def test_sample_moments(self, rng):
        y = rng.normal(0.0, 1.0, 25)
        X = rng.normal(0.0, 1.0, (25, 3))
        cond = BetaConditional.from_stats(X.T @ X, X.T @ y, 1.0, 50.0)
        draws = np.array([cond.sample(rng) for _ in range(20000)])
        assert np.allclose(draws.mean(axis=0), cond.mean, atol=0.05)
        assert np.allclose(np.cov(draws.T), cond.covariance(), atol=0.05)

    def test_logpdf_matches_scipy(self, rng):
        y = rng.normal(0.0, 1.0, 25)
        X = rng.normal(0.0, 1.0, (25, 3))
        cond = BetaConditional.from_stats(X.T @ X, X.T @ y, 1.0, 50.0)
        x = rng.normal(0.0, 1.0, 3)
        oracle = stats.multivariate_normal.logpdf(x, cond.mean, cond.covariance())
        assert cond.logpdf(x) == pytest.approx(oracle, rel=1e-9)


class TestSigma2Conditional:
    def test_zero_residual_scale(self):
        X = np.column_stack([np.ones(10), np.arange(10.0)])
        beta = np.array([1.0, 2.0])
        y = X @ beta
        shape, scale = sigma2_conditional_params(y, X, beta, 0.01, 0.02)
        assert shape == pytest.approx((10 + 0.01) / 2)
        assert scale == pytest.approx(0.01)

    def test_shape_arithmetic(self):
        X = np.ones((10, 1))
        shape, _ = sigma2_conditional_params(np.zeros(10), X, np.zeros(1), 0.01, 1.0)
        assert shape == pytest.approx(5.005)

    def test_draws_match_grid_density_oracle(self, rng):
        # Gibbs draws should follow prior x likelihood normalized on a grid
        seg = random_segment(rng, 40, m=1)
        y, t = segment_data(rng, seg, 40)
        X = design_matrix(t, seg.omega)
        nu0, gamma0 = 1.0, 2.0
        shape, scale = sigma2_conditional_params(y, X, seg.beta, nu0, gamma0)

        r = y - X @ seg.beta
        rss = float(r @ r)
        grid = np.linspace(scale / shape * 0.05, scale / shape * 8, 4001)
        log_dens = (
            -0.5 * 40 * np.log(2 * np.pi * grid)
            - 0.5 * rss / grid
            + stats.invgamma.logpdf(grid, nu0 / 2, scale=gamma0 / 2)
        )
        dens = np.exp(log_dens - log_dens.max())
        dens /= np.trapezoid(dens, grid)
        oracle = stats.invgamma.pdf(grid, shape, scale=scale)
        assert np.allclose(dens, oracle, atol=1e-3 * oracle.max())

        draws = np.array([invgamma_sample(shape, scale, rng) for _ in range(5000)])
        assert stats.kstest(draws, stats.invgamma(shape, scale=scale).cdf).pvalue > 1e-3

    def test_invgamma_logpdf_oracle(self, rng):
        for _ in range(20):
            shape = float(rng.uniform(0.5, 20.0))
            scale = float(rng.uniform(0.1, 30.0))
            x = float(rng.uniform(0.05, 20.0))
            assert invgamma_logpdf(x, shape, scale) == pytest.approx(
                stats.invgamma.logpdf(x, shape, scale=scale), rel=1e-10
            )


class TestLikelihoodOffSwitch:
    def test_gibbs_params_fall_back_to_prior(self):
        hyper = Hyperparams(nu0=2.0, gamma0=3.0, likelihood_off=True)
        assert gibbs_sigma2_params(123.0, 50, hyper) == (1.0, 1.5)

    def test_normal_mode_uses_data(self):
        hyper = Hyperparams(nu0=2.0, gamma0=3.0)
        shape, scale = gibbs_sigma2_params(10.0, 50, hyper)
        assert shape == pytest.approx(26.0)
        assert scale == pytest.approx(6.5)
