"""Periodograms and the data-driven frequency proposal.

The proposal picks a DFT bin with probability proportional to its periodogram
ordinate and then draws uniformly within the bin, independently of the current
state. Bin h covers [h/n, (h+1)/n) for h = 0..floor(n/2)-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegeneratePeriodogramError(ValueError):
    """All periodogram ordinates are zero; caller should fall back to uniform."""


@dataclass
class Periodogram:
    """Squared DFT moduli I_0..I_{floor(n/2)-1} of one segment of length n."""

    values: np.ndarray
    n: int

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        total = float(self.values.sum())
        self.total = total
        # bin masses and cumulative table for sampling / density lookups
        if total > 0.0:
            self._cum = np.cumsum(self.values) / total
        else:
            self._cum = None


def periodogram(y_seg) -> Periodogram:
    """Squared modulus of the DFT over the first floor(n/2) frequencies."""
    y_seg = np.ascontiguousarray(y_seg, dtype=np.float64)
    n = y_seg.shape[0]
    if n < 2:
        raise ValueError("periodogram needs at least 2 observations")
    spec = np.fft.rfft(y_seg)[: n // 2]
    return Periodogram(np.abs(spec) ** 2, n)


def q1_sample(pg: Periodogram, rng: np.random.Generator) -> float:
    """Draw a frequency: bin h with probability I_h / sum(I), uniform within."""
    if pg._cum is None:
        raise DegeneratePeriodogramError("all periodogram ordinates are zero")
    while True:
        h = int(np.searchsorted(pg._cum, rng.random(), side="right"))
        freq = (h + rng.random()) / pg.n
        if 0.0 < freq < 0.5:
            return freq


def q1_log_density(freq: float, pg: Periodogram) -> float:
    """Log density of q1_sample at freq: piecewise constant, mass*n per bin."""
    if not 0.0 < freq < 0.5:
        raise ValueError("frequency outside (0, 0.5)")
    if pg._cum is None:
        raise DegeneratePeriodogramError("all periodogram ordinates are zero")
    h = int(freq * pg.n)
    if h >= pg.values.shape[0] or pg.values[h] <= 0.0:
        return -np.inf
    return math.log(pg.values[h] / pg.total * pg.n)


def q1_propose(pg: Periodogram, rng: np.random.Generator) -> tuple[float, float, float]:
    """(candidate, log q(candidate), density evaluator hint) with the uniform
    fallback applied when the periodogram is degenerate.

    Returns (freq, logq_freq, logq_of) where logq_of is a callable for the
    reverse density under the same proposal.
    """
    if pg._cum is None:
        freq = rng.uniform(0.0, 0.5)
        return freq, math.log(2.0), lambda _w: math.log(2.0)
    freq = q1_sample(pg, rng)
    return freq, q1_log_density(freq, pg), lambda w: q1_log_density(w, pg)


class PeriodogramCache:
    """Per-segment periodograms keyed on the (start, stop) array slice.

    Segment boundaries move every few iterations; the cache avoids recomputing
    DFTs for the unaffected segments.
    """

    def __init__(self, values: np.ndarray, max_entries: int = 256):
        self._values = values
        self._cache: dict[tuple[int, int], Periodogram] = {}
        self._max = max_entries

    def get(self, start: int, stop: int) -> Periodogram:
        key = (start, stop)
        pg = self._cache.get(key)
        if pg is None:
            pg = periodogram(self._values[start:stop])
            if len(self._cache) >= self._max:
                self._cache.clear()
            self._cache[key] = pg
        return pg
