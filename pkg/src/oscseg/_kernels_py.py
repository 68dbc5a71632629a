"""Pure-numpy implementations of the hot regression kernels.

Fallback lane used when the compiled extension is unavailable or when
OSCSEG_PURE_PYTHON is set. Kept numerically interchangeable with the
compiled lane (same formulas; summation order may differ in the last ulps).
"""

import numpy as np

_TWO_PI = 2.0 * np.pi


def design_matrix(t, omega):
    """Rows (1, t, cos(2*pi*w1*t), sin(2*pi*w1*t), ...) for each time index."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    omega = np.ascontiguousarray(omega, dtype=np.float64)
    n = t.shape[0]
    m = omega.shape[0]
    X = np.empty((n, 2 * m + 2))
    X[:, 0] = 1.0
    X[:, 1] = t
    if m:
        ang = _TWO_PI * t[:, None] * omega[None, :]
        X[:, 2::2] = np.cos(ang)
        X[:, 3::2] = np.sin(ang)
    return X


def signal_eval(t, omega, beta):
    """Trend-plus-sinusoids signal at each time index."""
    return design_matrix(t, omega) @ np.ascontiguousarray(beta, dtype=np.float64)


def rss_value(y, t, omega, beta):
    """Sum of squared residuals of y against the signal."""
    r = np.ascontiguousarray(y, dtype=np.float64) - signal_eval(t, omega, beta)
    return float(r @ r)


def xtx_xty(y, t, omega):
    """Normal-equation blocks (X'X, X'y) of the design at omega."""
    X = design_matrix(t, omega)
    y = np.ascontiguousarray(y, dtype=np.float64)
    return X.T @ X, X.T @ y
