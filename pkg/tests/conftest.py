import numpy as np
import pytest

from oscseg.model import SegmentParams


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_segment(rng, n, m=None, m_max=4):
    """A valid random segment with data; used across move/conjugate tests."""
    m = int(rng.integers(1, m_max + 1)) if m is None else m
    omega = np.sort(rng.uniform(0.02, 0.48, m))
    while m > 1 and np.min(np.diff(omega)) < 0.01:
        omega = np.sort(rng.uniform(0.02, 0.48, m))
    beta = rng.normal(0.0, 2.0, 2 * m + 2)
    beta[1] *= 0.01  # keep the trend mild
    sigma2 = float(rng.uniform(0.5, 4.0))
    return SegmentParams(omega, beta, sigma2)


def segment_data(rng, seg, n, t0=1):
    """Noisy data drawn from the segment's own model on t = t0..t0+n-1."""
    from oscseg import kernels

    t = np.arange(t0, t0 + n, dtype=np.float64)
    f = kernels.signal_eval(t, seg.omega, seg.beta)
    y = f + rng.normal(0.0, np.sqrt(seg.sigma2), n)
    return y, t
