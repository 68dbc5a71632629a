"""Exact conditional distributions behind every proposal.

The coefficient vector has a Gaussian conditional (ridge-regularized least
squares; the "normal approximation" is exact because the conditional target is
quadratic), and the residual variance has an Inverse-Gamma conditional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.linalg import cholesky, solve

from . import kernels
from .model import Hyperparams

_LOG_2PI = math.log(2.0 * math.pi)


def design_matrix(t_seg, omega) -> np.ndarray:
    """Design with one basis row per time index."""
    t_seg = np.ascontiguousarray(t_seg, dtype=np.float64)
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    if t_seg.shape[0] < 2 * omega.shape[0] + 2:
        raise ValueError("segment shorter than its coefficient count")
    return kernels.design_matrix(t_seg, omega)


@dataclass
class BetaConditional:
    """Gaussian conditional N(mean, P^{-1}) with P = X'X/sigma2 + I/sigma2_beta.

    Carries the Cholesky factor of the precision so sampling and density
    evaluation need no further factorizations.
    """

    mean: np.ndarray
    chol_prec: np.ndarray  # lower-triangular L with L L' = P

    @classmethod
    def from_stats(cls, xtx, xty, sigma2: float, sigma2_beta: float) -> "BetaConditional":
        d = xty.shape[0]
        prec = xtx / sigma2 + np.eye(d) / sigma2_beta
        L = cholesky(prec)
        mean = solve(prec, xty / sigma2)
        return cls(mean, L)

    @classmethod
    def from_data(cls, y_seg, t_seg, omega, sigma2: float, sigma2_beta: float) -> "BetaConditional":
        xtx, xty = kernels.xtx_xty(
            np.ascontiguousarray(y_seg, dtype=np.float64),
            np.ascontiguousarray(t_seg, dtype=np.float64),
            np.ascontiguousarray(omega, dtype=np.float64),
        )
        return cls.from_stats(xtx, xty, sigma2, sigma2_beta)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def covariance(self) -> np.ndarray:
        inv_l = np.linalg.inv(self.chol_prec)
        return inv_l.T @ inv_l

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal(self.dim)
        # x = mean + L^{-T} z  has covariance (L L')^{-1}
        return self.mean + np.linalg.solve(self.chol_prec.T, z)

    def logpdf(self, x) -> float:
        w = self.chol_prec.T @ (np.asarray(x, dtype=np.float64) - self.mean)
        log_det_prec = 2.0 * float(np.sum(np.log(np.diag(self.chol_prec))))
        return 0.5 * (log_det_prec - self.dim * _LOG_2PI - float(w @ w))


def beta_conditional(y_seg, X, sigma2: float, sigma2_beta: float) -> tuple[np.ndarray, np.ndarray]:
    """(mean, covariance) of the exact coefficient conditional."""
    X = np.asarray(X, dtype=np.float64)
    y_seg = np.asarray(y_seg, dtype=np.float64)
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y_seg))):
        raise ValueError("non-finite inputs")
    cond = BetaConditional.from_stats(X.T @ X, X.T @ y_seg, sigma2, sigma2_beta)
    return cond.mean, cond.covariance()


def sigma2_conditional_params(y_seg, X, beta, nu0: float, gamma0: float) -> tuple[float, float]:
    """(shape, scale) of the Inverse-Gamma conditional for the residual variance."""
    y_seg = np.asarray(y_seg, dtype=np.float64)
    r = y_seg - np.asarray(X, dtype=np.float64) @ np.asarray(beta, dtype=np.float64)
    return 0.5 * (y_seg.shape[0] + nu0), 0.5 * (gamma0 + float(r @ r))


def invgamma_sample(shape: float, scale: float, rng: np.random.Generator) -> float:
    return scale / rng.gamma(shape)


def invgamma_logpdf(x: float, shape: float, scale: float) -> float:
    if x <= 0.0:
        return -np.inf
    return shape * math.log(scale) - math.lgamma(shape) - (shape + 1.0) * math.log(x) - scale / x


def loglik_term(y_seg, t_seg, omega, beta, sigma2: float, hyper: Hyperparams) -> float:
    """Segment Gaussian log-likelihood, or 0 in constant-likelihood mode."""
    if hyper.likelihood_off:
        return 0.0
    rss = kernels.rss_value(y_seg, t_seg, omega, beta)
    n = y_seg.shape[0]
    return -0.5 * n * math.log(2.0 * math.pi * sigma2) - 0.5 * rss / sigma2


def gibbs_sigma2_params(rss: float, n: int, hyper: Hyperparams) -> tuple[float, float]:
    """Inverse-Gamma parameters of the variance Gibbs step; the raw prior when
    the likelihood is switched off."""
    if hyper.likelihood_off:
        return 0.5 * hyper.nu0, 0.5 * hyper.gamma0
    return 0.5 * (n + hyper.nu0), 0.5 * (hyper.gamma0 + rss)


def gibbs_params_at(y_seg, t_seg, omega, beta, hyper: Hyperparams) -> tuple[float, float]:
    """Variance Gibbs parameters with the residual sum computed in place."""
    if hyper.likelihood_off:
        rss = 0.0
    else:
        rss = kernels.rss_value(y_seg, t_seg, omega, beta)
    return gibbs_sigma2_params(rss, y_seg.shape[0], hyper)


def beta_proposal(y_seg, t_seg, omega, sigma2: float, hyper: Hyperparams) -> BetaConditional:
    """Coefficient proposal distribution used by every move.

    Normally the exact data conditional; in constant-likelihood mode the prior
    itself (a data conditional is a degenerate proposal for prior-distributed
    coefficients, which would freeze the trans-dimensional moves in the
    prior-recovery diagnostics).
    """
    if hyper.likelihood_off:
        d = 2 * np.asarray(omega).shape[0] + 2
        sd = math.sqrt(hyper.sigma2_beta)
        return BetaConditional(np.zeros(d), np.eye(d) / sd)
    return BetaConditional.from_data(y_seg, t_seg, omega, sigma2, hyper.sigma2_beta)
