"""Data generators for the simulation studies: the three-regime sinusoidal
demo (Gaussian or heavy-tailed errors), a three-regime autoregression with
sharp spectral peaks, and a slowly drifting AR(2)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SegmentParams, TimeSeries, segment_slices
from . import kernels


@dataclass
class NoiseSpec:
    """Gaussian per-segment noise, or Student-t with per-segment dof.

    t draws are raw by default (not rescaled by the segment sigma); set
    scale_by_sigma to multiply them by sqrt(sigma2_j).
    """

    kind: str = "gaussian"  # gaussian | student-t
    t_dof: list[float] | None = None
    scale_by_sigma: bool = False


@dataclass
class PiecewiseTruth:
    """Generating parameters: boundaries plus one SegmentParams per segment."""

    n: int
    s: list[float]
    segments: list[SegmentParams]
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    def signal(self) -> np.ndarray:
        t = np.arange(1, self.n + 1, dtype=np.float64)
        f = np.empty(self.n)
        for seg, (a, b) in zip(self.segments, segment_slices(np.array(self.s), self.n)):
            f[a:b] = kernels.signal_eval(t[a:b], seg.omega, seg.beta)
        return f

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "s": list(self.s),
            "segments": [
                {"omega": seg.omega.tolist(), "beta": seg.beta.tolist(), "sigma2": seg.sigma2}
                for seg in self.segments
            ],
            "noise": {
                "kind": self.noise.kind,
                "t_dof": self.noise.t_dof,
                "scale_by_sigma": self.noise.scale_by_sigma,
            },
        }


def gen_piecewise_sinusoid(truth: PiecewiseTruth, rng: np.random.Generator) -> TimeSeries:
    """Piecewise sinusoidal series with per-segment noise."""
    f = truth.signal()
    y = f.copy()
    slices = segment_slices(np.array(truth.s), truth.n)
    for j, (seg, (a, b)) in enumerate(zip(truth.segments, slices)):
        size = b - a
        if truth.noise.kind == "gaussian":
            y[a:b] += rng.normal(0.0, math.sqrt(seg.sigma2), size)
        elif truth.noise.kind == "student-t":
            dof = truth.noise.t_dof[j]
            eps = rng.standard_t(dof, size)
            if truth.noise.scale_by_sigma:
                eps = eps * math.sqrt(seg.sigma2)
            y[a:b] += eps
        else:
            raise ValueError(f"unknown noise kind {truth.noise.kind!r}")
    return TimeSeries(y)


def demo_truth(student_t: bool = False) -> PiecewiseTruth:
    """Three-regime demo: n = 900, changes at 300 and 650, frequency counts
    (3, 1, 2), mild linear trends, noise sd (4.0, 3.5, 2.8) or t with dof
    (2, 3, 2)."""
    seg1 = SegmentParams(
        omega=np.array([1 / 24, 1 / 15, 1 / 7]),
        beta=np.array([0.0, 0.010, 2.0, 3.0, 4.0, 5.0, 1.0, 2.5]),
        sigma2=4.0**2,
    )
    seg2 = SegmentParams(
        omega=np.array([1 / 12]),
        beta=np.array([0.0, 0.000, 4.0, 3.0]),
        sigma2=3.5**2,
    )
    seg3 = SegmentParams(
        omega=np.array([1 / 22, 1 / 15]),
        beta=np.array([0.0, -0.005, 2.5, 4.0, 4.0, 2.0]),
        sigma2=2.8**2,
    )
    noise = NoiseSpec("student-t", t_dof=[2.0, 3.0, 2.0]) if student_t else NoiseSpec()
    return PiecewiseTruth(n=900, s=[300.0, 650.0], segments=[seg1, seg2, seg3], noise=noise)


def gen_piecewise_ar(
    rng: np.random.Generator, regime_lengths: tuple[int, int, int] = (250, 150, 150)
) -> TimeSeries:
    """Three-regime autoregression with sharp, nearby spectral peaks:
    AR(2) coefficients (1.9, -.975) then (1.9, -.991), then an AR(3)
    (-1.35, -.37, .36); noise sd 0.5 in the first regime, 1 after."""
    n1, n2, n3 = regime_lengths
    n = n1 + n2 + n3
    eps = np.empty(n)
    eps[:n1] = rng.normal(0.0, 0.5, n1)
    eps[n1:] = rng.normal(0.0, 1.0, n2 + n3)
    y = np.zeros(n)
    for i in range(n):
        y1 = y[i - 1] if i >= 1 else 0.0
        y2 = y[i - 2] if i >= 2 else 0.0
        y3 = y[i - 3] if i >= 3 else 0.0
        if i < n1:
            y[i] = 1.9 * y1 - 0.975 * y2 + eps[i]
        elif i < n1 + n2:
            y[i] = 1.9 * y1 - 0.991 * y2 + eps[i]
        else:
            y[i] = -1.35 * y1 - 0.37 * y2 + 0.36 * y3 + eps[i]
    return TimeSeries(y)


def gen_slowly_varying_ar(rng: np.random.Generator, n: int = 1031) -> TimeSeries:
    """AR(2) whose first coefficient drifts: a_t = .8 (1 - .5 cos(pi t / n)),
    second coefficient fixed at -.81, unit-variance noise."""
    y = np.zeros(n)
    eps = rng.normal(0.0, 1.0, n)
    for i in range(n):
        t = i + 1
        a_t = 0.8 * (1.0 - 0.5 * math.cos(math.pi * t / n))
        y1 = y[i - 1] if i >= 1 else 0.0
        y2 = y[i - 2] if i >= 2 else 0.0
        y[i] = a_t * y1 - 0.81 * y2 + eps[i]
    return TimeSeries(y)


def ar2_peak_freq(a1: float, a2: float) -> float:
    """Frequency maximizing the AR(2) spectral density of
    y_t = a1 y_{t-1} + a2 y_{t-2} + e_t: cos(2 pi w) = -a1 (1 - a2) / (4 a2),
    clamped to the boundary when no interior peak exists."""
    if a2 == 0.0:
        return 0.0 if a1 > 0 else 0.5
    c = -a1 * (1.0 - a2) / (4.0 * a2)
    c = min(1.0, max(-1.0, c))
    return math.acos(c) / (2.0 * math.pi)


def slowly_varying_peak_curve(n: int = 1031) -> np.ndarray:
    """Per-t spectral-peak frequency of the drifting AR(2) generator."""
    t = np.arange(1, n + 1, dtype=np.float64)
    a1 = 0.8 * (1.0 - 0.5 * np.cos(np.pi * t / n))
    return np.array([ar2_peak_freq(a, -0.81) for a in a1])
