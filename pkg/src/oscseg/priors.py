"""Log prior densities/masses and the birth/death/within move probabilities.

Counts (number of change-points k, number of frequencies m per segment) carry
truncated Poisson priors; change-point locations follow the even-ordered
uniform order-statistics density; frequencies are uniform on (0, 0.5);
coefficients are zero-mean isotropic Gaussian; residual variances are
Inverse-Gamma(nu0/2, gamma0/2).
"""

from __future__ import annotations

import math

import numpy as np

LOG_TWO = math.log(2.0)


def _log_pmf_raw(z: int, lam: float) -> float:
    return z * math.log(lam) - math.lgamma(z + 1)


def log_prior_count(z: int, lam: float, z_min: int, z_max: int) -> float:
    """Log mass of a Poisson(lam) truncated to {z_min..z_max}."""
    if not z_min <= z <= z_max:
        raise ValueError(f"count {z} outside truncation range [{z_min}, {z_max}]")
    terms = [_log_pmf_raw(j, lam) for j in range(z_min, z_max + 1)]
    hi = max(terms)
    log_norm = hi + math.log(sum(math.exp(v - hi) for v in terms))
    return _log_pmf_raw(z, lam) - log_norm


def log_prior_changepoints(s, k: int, n: int) -> float:
    """Log density of change-point locations given k: the odd order statistics
    of 2k+1 uniforms on (1, n), i.e. (2k+1)!/(n-1)^(2k+1) * prod of gaps."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape[0] != k:
        raise ValueError("location vector length must equal k")
    if k == 0:
        return 0.0
    bounds = np.concatenate(([1.0], s, [float(n)]))
    gaps = np.diff(bounds)
    if np.any(gaps <= 0.0):
        return -np.inf
    return (
        math.lgamma(2 * k + 2)
        - (2 * k + 1) * math.log(n - 1.0)
        + float(np.sum(np.log(gaps)))
    )


def log_prior_omega(omega) -> float:
    """Independent Uniform(0, 0.5) frequencies: m*log 2 inside the support."""
    omega = np.asarray(omega, dtype=np.float64)
    if np.any(omega <= 0.0) or np.any(omega >= 0.5):
        return -np.inf
    return omega.shape[0] * LOG_TWO


def log_prior_beta(beta, sigma2_beta: float) -> float:
    beta = np.asarray(beta, dtype=np.float64)
    d = beta.shape[0]
    return -0.5 * d * math.log(2.0 * math.pi * sigma2_beta) - 0.5 * float(
        beta @ beta
    ) / sigma2_beta


def log_prior_sigma2(sigma2: float, nu0: float, gamma0: float) -> float:
    """Inverse-Gamma(nu0/2, gamma0/2) log density."""
    if sigma2 <= 0.0:
        raise ValueError("sigma2 must be positive")
    shape, scale = 0.5 * nu0, 0.5 * gamma0
    return (
        shape * math.log(scale)
        - math.lgamma(shape)
        - (shape + 1.0) * math.log(sigma2)
        - scale / sigma2
    )


def move_probabilities(
    z: int, lam: float, z_min: int, z_max: int, c: float
) -> tuple[float, float, float]:
    """(birth, death, within) probabilities at dimension z.

    birth = c*min(1, prior(z+1)/prior(z)), death = c*min(1, prior(z-1)/prior(z));
    the truncation zeroes birth at z_max and death at z_min.
    """
    if c > 0.5:
        raise ValueError("c must not exceed 0.5")
    if not z_min <= z <= z_max:
        raise ValueError(f"dimension {z} outside [{z_min}, {z_max}]")
    b = c * min(1.0, lam / (z + 1.0)) if z < z_max else 0.0
    d = c * min(1.0, z / lam) if z > z_min else 0.0
    mu = 1.0 - b - d
    return b, d, mu


def move_prob_table(lam: float, z_min: int, z_max: int, c: float) -> list[tuple[float, float, float]]:
    """move_probabilities for every z in range, indexed by z - z_min."""
    return [move_probabilities(z, lam, z_min, z_max, c) for z in range(z_min, z_max + 1)]
