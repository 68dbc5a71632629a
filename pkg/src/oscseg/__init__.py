"""Bayesian segmentation of oscillatory time series.

Piecewise sinusoidal regression with an unknown number of change-points and
an unknown number of frequencies per segment, sampled by a two-level
reversible-jump MCMC: per-segment model moves followed by a change-point move
each iteration.
"""

from .chain import ChainConfig, ChainOutput, init_state, run_chain
from .kernels import BACKEND as KERNEL_BACKEND
from .model import (
    Hyperparams,
    InvalidStateError,
    ModelState,
    SegmentParams,
    TimeSeries,
    basis_vector,
    phase,
    power,
    segment_loglik,
    signal_at,
    total_loglik,
)
from .spectral import Periodogram, periodogram, q1_log_density, q1_sample

__version__ = "0.1.0"

__all__ = [
    "ChainConfig",
    "ChainOutput",
    "Hyperparams",
    "InvalidStateError",
    "KERNEL_BACKEND",
    "ModelState",
    "Periodogram",
    "SegmentParams",
    "TimeSeries",
    "basis_vector",
    "init_state",
    "periodogram",
    "phase",
    "power",
    "q1_log_density",
    "q1_sample",
    "run_chain",
    "segment_loglik",
    "signal_at",
    "total_loglik",
]
