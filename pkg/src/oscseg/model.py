"""Generative model: piecewise sinusoidal regression with segment-specific
trend, frequencies and residual variance.

A series y_1..y_n is split at k continuous change-points 1 < s_1 < ... < s_k < n
into k+1 segments; membership uses half-open intervals [s_{j-1}, s_j) with the
last interval closed at n. Within segment j the mean is

    f(t) = alpha + mu*t + sum_l b1_l cos(2 pi w_l t) + b2_l sin(2 pi w_l t)

with Gaussian noise of variance sigma2_j. The time index t is global (1..n)
in every segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import kernels


@dataclass
class TimeSeries:
    """Ordered real observations indexed t = 1..n."""

    values: np.ndarray

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.n < 2:
            raise ValueError("need a 1-d series with at least 2 observations")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("series contains non-finite values")
        self.t = np.arange(1, self.n + 1, dtype=np.float64)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass
class SegmentParams:
    """One segment's parameter block.

    beta is ordered (alpha, mu, b1_1, b2_1, ..., b1_m, b2_m); omega is sorted
    ascending and pairs with the beta entries by position.
    """

    omega: np.ndarray
    beta: np.ndarray
    sigma2: float

    def __post_init__(self):
        self.omega = np.ascontiguousarray(self.omega, dtype=np.float64)
        self.beta = np.ascontiguousarray(self.beta, dtype=np.float64)
        self.sigma2 = float(self.sigma2)

    @property
    def m(self) -> int:
        return self.omega.shape[0]

    def copy(self) -> "SegmentParams":
        return SegmentParams(self.omega.copy(), self.beta.copy(), self.sigma2)

    def validate(self, psi_omega: float = 0.0, m_max: int | None = None):
        m = self.m
        if m < 1:
            raise InvalidStateError("segment needs at least one frequency")
        if m_max is not None and m > m_max:
            raise InvalidStateError(f"m={m} exceeds m_max={m_max}")
        if self.beta.shape[0] != 2 * m + 2:
            raise InvalidStateError("beta length must be 2m+2")
        if not (self.sigma2 > 0.0 and np.isfinite(self.sigma2)):
            raise InvalidStateError("sigma2 must be positive and finite")
        if np.any(self.omega <= 0.0) or np.any(self.omega >= 0.5):
            raise InvalidStateError("frequencies must lie in (0, 0.5)")
        if m > 1:
            gaps = np.diff(self.omega)
            if np.any(gaps <= 0.0):
                raise InvalidStateError("frequencies must be strictly increasing")
            if psi_omega > 0.0 and np.any(gaps < psi_omega):
                raise InvalidStateError("frequency separation below psi_omega")


@dataclass
class ModelState:
    """Full sampler state: change-point locations plus one SegmentParams per segment."""

    s: np.ndarray
    segments: list[SegmentParams]

    def __post_init__(self):
        self.s = np.ascontiguousarray(self.s, dtype=np.float64)

    @property
    def k(self) -> int:
        return self.s.shape[0]

    def copy(self) -> "ModelState":
        return ModelState(self.s.copy(), [seg.copy() for seg in self.segments])

    def validate(self, n: int, hyper: "Hyperparams"):
        k = self.k
        if len(self.segments) != k + 1:
            raise InvalidStateError("need k+1 segments")
        if k > hyper.k_max:
            raise InvalidStateError(f"k={k} exceeds k_max={hyper.k_max}")
        bounds = np.concatenate(([1.0], self.s, [float(n)]))
        if np.any(np.diff(bounds) < hyper.psi_s):
            raise InvalidStateError("change-point spacing below psi_s")
        slices = segment_slices(self.s, n)
        for seg, (a, b) in zip(self.segments, slices):
            seg.validate(hyper.psi_omega or 0.0, hyper.m_max)
            if b - a < 2 * seg.m + 2:
                raise InvalidStateError("segment too short for its frequency count")


class InvalidStateError(ValueError):
    """A sampler state violated a structural invariant."""


@dataclass
class Hyperparams:
    """Prior constants and proposal tuning knobs.

    None for psi_omega / sigma2_omega / sigma2_s means "derive from the data
    length at fit time": psi_omega = 2/n, sigma2_omega = (1/(50 n_seg))^2 per
    segment, sigma2_s = max(5, n/200)^2. `likelihood_off` is a diagnostic
    switch that makes every move target the prior alone (used by the
    prior-recovery tests).
    """

    lambda_s: float = 2.0
    lambda_omega: float = 2.0
    k_max: int = 15
    m_max: int = 10
    sigma2_beta: float = 1e4
    nu0: float = 0.01
    gamma0: float = 0.01
    psi_s: float = 20.0
    psi_omega: float | None = None
    phi_omega: float = 0.25
    c: float = 0.4
    delta_omega: float = 0.2
    sigma2_omega: float | None = None
    delta_s: float = 0.2
    sigma2_s: float | None = None
    enforce_psi_omega_within: bool = True
    likelihood_off: bool = False

    def resolved(self, n: int) -> "Hyperparams":
        """Fill the length-dependent defaults for a series of n observations."""
        out = replace(self)
        if out.psi_omega is None:
            out.psi_omega = 2.0 / n
        if out.sigma2_s is None:
            out.sigma2_s = max(5.0, n / 200.0) ** 2
        out.validate(n)
        return out

    def validate(self, n: int | None = None):
        if not (0.0 < self.c <= 0.5):
            raise ValueError("c must lie in (0, 0.5]")
        if self.lambda_s <= 0 or self.lambda_omega <= 0:
            raise ValueError("Poisson prior means must be positive")
        if self.k_max < 0 or self.m_max < 1:
            raise ValueError("k_max must be >= 0 and m_max >= 1")
        if self.sigma2_beta <= 0 or self.nu0 <= 0 or self.gamma0 <= 0:
            raise ValueError("sigma2_beta, nu0, gamma0 must be positive")
        if not (0.0 <= self.delta_omega <= 1.0 and 0.0 <= self.delta_s <= 1.0):
            raise ValueError("mixture weights must lie in [0, 1]")
        if not (0.0 < self.phi_omega <= 0.5):
            raise ValueError("phi_omega must lie in (0, 0.5]")
        if self.psi_s < 0:
            raise ValueError("psi_s must be non-negative")
        if n is not None and self.psi_omega is not None and self.psi_omega <= 1.0 / n:
            raise ValueError("psi_omega must exceed 1/n (frequency resolution)")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def segment_slices(s, n: int) -> list[tuple[int, int]]:
    """0-based half-open array slices [(start, stop), ...] of the k+1 segments.

    Integer time t = i+1 belongs to segment j iff s_j <= t < s_{j+1} (sentinels
    s_0 = 1, s_{k+1} = n, last interval closed at n).
    """
    s = np.asarray(s, dtype=np.float64)
    starts = [0] + [int(math.ceil(v - 1.0)) for v in s]
    stops = [int(math.ceil(v - 1.0)) for v in s] + [n]
    return list(zip(starts, stops))


def segment_index(s, t: float) -> int:
    """Index of the segment containing time t."""
    return int(np.searchsorted(np.asarray(s, dtype=np.float64), t, side="right"))


def basis_vector(t: float, omega) -> np.ndarray:
    """(1, t, cos(2 pi w1 t), sin(2 pi w1 t), ...) at a single time index."""
    return kernels.design_matrix(
        np.array([t], dtype=np.float64), np.asarray(omega, dtype=np.float64)
    )[0]


def signal_at(t: float, seg: SegmentParams) -> float:
    """Segment mean function at a single time index."""
    return float(
        kernels.signal_eval(np.array([t], dtype=np.float64), seg.omega, seg.beta)[0]
    )


def segment_signal(t_seg: np.ndarray, seg: SegmentParams) -> np.ndarray:
    """Segment mean function over an array of time indices."""
    return kernels.signal_eval(t_seg, seg.omega, seg.beta)


def gaussian_loglik(n: int, rss: float, sigma2: float) -> float:
    return -0.5 * n * math.log(2.0 * math.pi * sigma2) - 0.5 * rss / sigma2


def segment_loglik(y_seg, seg: SegmentParams, t_seg) -> float:
    """Exact Gaussian log-likelihood of one segment."""
    y_seg = np.ascontiguousarray(y_seg, dtype=np.float64)
    t_seg = np.ascontiguousarray(t_seg, dtype=np.float64)
    rss = kernels.rss_value(y_seg, t_seg, seg.omega, seg.beta)
    value = gaussian_loglik(y_seg.shape[0], rss, seg.sigma2)
    if not np.isfinite(value):
        raise InvalidStateError("non-finite segment log-likelihood")
    return value


def total_loglik(state: ModelState, ts: TimeSeries) -> float:
    """Sum of segment log-likelihoods, left to right over segments."""
    if state.k and (state.s[0] <= 1.0 or state.s[-1] >= ts.n):
        raise InvalidStateError("change-points outside (1, n)")
    total = 0.0
    for seg, (a, b) in zip(state.segments, segment_slices(state.s, ts.n)):
        total += segment_loglik(ts.values[a:b], seg, ts.t[a:b])
    return total


def power(beta_pair) -> float:
    """Squared amplitude b1^2 + b2^2 of one sinusoid pair."""
    b1, b2 = float(beta_pair[0]), float(beta_pair[1])
    return b1 * b1 + b2 * b2


def phase(beta_pair) -> float:
    """Cosine phase shift in (-pi, pi]: b1 cos + b2 sin = B cos(. + tau)."""
    b1, b2 = float(beta_pair[0]), float(beta_pair[1])
    if b1 == 0.0 and b2 == 0.0:
        raise ValueError("phase undefined when both coefficients are zero")
    return math.atan2(-b2, b1)
