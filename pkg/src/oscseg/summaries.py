"""Posterior summaries over stored sampler states.

Segment identity across samples is positional (left to right by change-point
order); frequency identity within a segment is ascending order. Conditional
summaries filter samples on the requested dimension before aggregating.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .model import ModelState, TimeSeries, power, phase, segment_slices


def posterior_k(out) -> dict[int, float]:
    """Empirical posterior mass over the number of change-points."""
    ks = np.array([st.k for st in out.samples], dtype=int)
    if ks.size == 0:
        raise ValueError("no stored samples")
    values, counts = np.unique(ks, return_counts=True)
    return {int(v): c / ks.size for v, c in zip(values, counts)}


def modal_k(out) -> int:
    table = posterior_k(out)
    return max(table, key=lambda k: (table[k], -k))


def _conditional(out, k_star: int) -> list[ModelState]:
    sub = [st for st in out.samples if st.k == k_star]
    if not sub:
        raise ValueError(f"no samples with k = {k_star}")
    return sub


def posterior_m_given_k(out, k_star: int) -> list[dict[int, float]]:
    """Per-segment empirical mass over the frequency count, conditional on k."""
    sub = _conditional(out, k_star)
    tables = []
    for j in range(k_star + 1):
        ms = np.array([st.segments[j].m for st in sub], dtype=int)
        values, counts = np.unique(ms, return_counts=True)
        tables.append({int(v): c / ms.size for v, c in zip(values, counts)})
    return tables


def modal_m(out, k_star: int) -> list[int]:
    return [max(t, key=lambda m: (t[m], -m)) for t in posterior_m_given_k(out, k_star)]


def changepoint_posterior(out, k_star: int, bin_width: float = 1.0):
    """Conditional on k, per-ordinal change-point samples with histogram,
    mean and standard deviation."""
    sub = _conditional(out, k_star)
    result = []
    for j in range(k_star):
        vals = np.array([st.s[j] for st in sub])
        lo = np.floor(vals.min() / bin_width) * bin_width
        hi = np.ceil(vals.max() / bin_width) * bin_width
        edges = np.arange(lo, hi + bin_width, bin_width)
        if edges.shape[0] < 2:
            edges = np.array([lo, lo + bin_width])
        hist, edges = np.histogram(vals, bins=edges)
        result.append(
            {
                "samples": vals,
                "mean": float(vals.mean()),
                "sd": float(vals.std(ddof=0)),
                "hist": hist,
                "edges": edges,
            }
        )
    return result


def frequency_posterior(out, k_star: int, m_star: list[int]):
    """Per-segment sorted-frequency samples conditional on k and the given
    per-segment frequency counts; returns samples plus means and sds."""
    sub = [
        st
        for st in out.samples
        if st.k == k_star and all(st.segments[j].m == m_star[j] for j in range(k_star + 1))
    ]
    if not sub:
        raise ValueError("no samples matching the requested (k, m) condition")
    result = []
    for j in range(k_star + 1):
        mat = np.array([st.segments[j].omega for st in sub])
        result.append(
            {
                "samples": mat,
                "mean": mat.mean(axis=0),
                "sd": mat.std(axis=0, ddof=0),
            }
        )
    return result


def _sample_signal(state: ModelState, ts: TimeSeries) -> np.ndarray:
    f = np.empty(ts.n)
    for seg, (a, b) in zip(state.segments, segment_slices(state.s, ts.n)):
        f[a:b] = kernels.signal_eval(ts.t[a:b], seg.omega, seg.beta)
    return f


def estimated_signal(out, ts: TimeSeries):
    """Model-averaged signal: pointwise mean over the stored states' mean
    functions, with the 2.5 / 97.5 empirical percentile band."""
    if not out.samples:
        raise ValueError("no stored samples")
    mat = np.empty((len(out.samples), ts.n))
    for i, st in enumerate(out.samples):
        mat[i] = _sample_signal(st, ts)
    lo, hi = np.percentile(mat, [2.5, 97.5], axis=0)
    return {"mean": mat.mean(axis=0), "lo": lo, "hi": hi}


def power_phase_table(out, k_star: int, m_star: list[int]):
    """Posterior means of frequency, power and phase per retained sinusoid,
    conditional on (k, m)."""
    sub = [
        st
        for st in out.samples
        if st.k == k_star and all(st.segments[j].m == m_star[j] for j in range(k_star + 1))
    ]
    if not sub:
        raise ValueError("no samples matching the requested (k, m) condition")
    table = []
    for j in range(k_star + 1):
        rows = []
        for l in range(m_star[j]):
            freqs = np.array([st.segments[j].omega[l] for st in sub])
            pows = np.array([power(st.segments[j].beta[2 + 2 * l : 4 + 2 * l]) for st in sub])
            phs = np.array([phase(st.segments[j].beta[2 + 2 * l : 4 + 2 * l]) for st in sub])
            rows.append(
                {
                    "frequency": float(freqs.mean()),
                    "power": float(pows.mean()),
                    "phase": float(phs.mean()),
                }
            )
        table.append(rows)
    return table


def acceptance_report(out) -> list[dict]:
    """Accept/attempt ratios by (family, kind), a pooled segment frequency
    within row, and the overall ratio over every M-H step."""
    rows = []
    total_acc = total_att = 0
    for (family, kind), (acc, att) in sorted(out.counters.items()):
        rows.append(
            {
                "family": family,
                "kind": kind,
                "accepted": acc,
                "attempted": att,
                "rate": acc / att if att else float("nan"),
            }
        )
        total_acc += acc
        total_att += att
    q1 = out.counters.get(("segment", "within-freq-q1"), [0, 0])
    rw = out.counters.get(("segment", "within-freq-rw"), [0, 0])
    acc, att = q1[0] + rw[0], q1[1] + rw[1]
    rows.append(
        {
            "family": "segment",
            "kind": "within",
            "accepted": acc,
            "attempted": att,
            "rate": acc / att if att else float("nan"),
        }
    )
    rows.append(
        {
            "family": "all",
            "kind": "overall",
            "accepted": total_acc,
            "attempted": total_att,
            "rate": total_acc / total_att if total_att else float("nan"),
        }
    )
    return rows


def dominant_frequency(state: ModelState) -> np.ndarray:
    """Per-segment frequency with the largest power (lowest frequency on ties)."""
    peaks = np.empty(len(state.segments))
    for j, seg in enumerate(state.segments):
        pows = np.array([power(seg.beta[2 + 2 * l : 4 + 2 * l]) for l in range(seg.m)])
        best = int(np.argmax(pows))  # argmax takes the first (lowest) on ties
        peaks[j] = seg.omega[best]
    return peaks


def time_varying_peak(out, ts: TimeSeries) -> np.ndarray:
    """Per-t dominant frequency of the segment containing t, averaged over samples."""
    if not out.samples:
        raise ValueError("no stored samples")
    acc = np.zeros(ts.n)
    for st in out.samples:
        peaks = dominant_frequency(st)
        for j, (a, b) in enumerate(segment_slices(st.s, ts.n)):
            acc[a:b] += peaks[j]
    return acc / len(out.samples)


def rss(curve, truth) -> float:
    """Residual sum of squares between an estimated and a reference curve."""
    curve = np.asarray(curve, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if curve.shape != truth.shape:
        raise ValueError("curves must have equal length")
    d = curve - truth
    return float(d @ d)
