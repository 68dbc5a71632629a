"""Change-point moves: relocation, segment split (birth) and merge (death).

A split copies the parent's frequencies into both children, divides the
residual variance through u/(1-u) with a fresh u ~ Uniform(0,1), and redraws
both coefficient vectors; the merge inverts the variance transformation with
a geometric mean and keeps one child's frequencies chosen by a fair coin.
Split and merge share one log-ratio routine so a matched pair negates exactly.
"""

from __future__ import annotations

import math

import numpy as np

from . import priors
from .conjugate import (
    beta_proposal,
    gibbs_params_at,
    invgamma_sample,
    loglik_term,
)
from .model import Hyperparams, ModelState, SegmentParams, TimeSeries, segment_slices
from .segment_moves import NEG_INF, MoveOutcome, mh_accept


def support_intervals(s, psi_s: float, n: int) -> tuple[list[tuple[float, float]], float]:
    """Closed intervals of (1, n) at distance >= psi_s from 1, n and every
    existing change-point, with empty ones dropped; new change-points are
    proposed uniformly over this union."""
    s = np.asarray(s, dtype=np.float64)
    edges = np.concatenate(([1.0], s, [float(n)]))
    intervals = []
    for a, b in zip(edges[:-1], edges[1:]):
        lo, hi = a + psi_s, b - psi_s
        if hi > lo:
            intervals.append((lo, hi))
    total = sum(b - a for a, b in intervals)
    return intervals, total


def _raw_support_ok(s, psi_s: float, n: int) -> bool:
    """True when no stated support interval is empty, i.e. the closed-form
    density 1/(n - 2 psi (k+1) - 1) equals one over the realizable length."""
    edges = np.concatenate(([1.0], np.asarray(s, dtype=np.float64), [float(n)]))
    return bool(np.all(np.diff(edges) >= 2.0 * psi_s))


def birth_support_log_density(s, psi_s: float, n: int) -> float:
    """Log of the closed-form split-location density for the configuration s;
    -inf when the configuration is degenerate (some stated interval empty)."""
    k = np.asarray(s).shape[0]
    length = n - 2.0 * psi_s * (k + 1) - 1.0
    if length <= 0.0 or not _raw_support_ok(s, psi_s, n):
        return NEG_INF
    return -math.log(length)


def _segment_data(ts: TimeSeries, a: int, b: int):
    return ts.values[a:b], ts.t[a:b]


def cp_split_log_ratio(
    small: ModelState,
    big: ModelState,
    j: int,
    ts: TimeSeries,
    hyper: Hyperparams,
) -> float:
    """Log M-H ratio of the split small -> big, where big's segments j and j+1
    partition small's segment j at the inserted change-point big.s[j]. The
    matching merge uses the exact negation."""
    n = ts.n
    k_small = small.k
    parent = small.segments[j]
    left, right = big.segments[j], big.segments[j + 1]
    sl_small = segment_slices(small.s, n)
    sl_big = segment_slices(big.s, n)
    y_par, t_par = _segment_data(ts, *sl_small[j])
    y_l, t_l = _segment_data(ts, *sl_big[j])
    y_r, t_r = _segment_data(ts, *sl_big[j + 1])

    ll = (
        loglik_term(y_l, t_l, left.omega, left.beta, left.sigma2, hyper)
        + loglik_term(y_r, t_r, right.omega, right.beta, right.sigma2, hyper)
        - loglik_term(y_par, t_par, parent.omega, parent.beta, parent.sigma2, hyper)
    )

    lp = (
        priors.log_prior_count(k_small + 1, hyper.lambda_s, 0, hyper.k_max)
        - priors.log_prior_count(k_small, hyper.lambda_s, 0, hyper.k_max)
        + priors.log_prior_changepoints(big.s, k_small + 1, n)
        - priors.log_prior_changepoints(small.s, k_small, n)
    )
    for seg in (left, right):
        lp += priors.log_prior_count(seg.m, hyper.lambda_omega, 1, hyper.m_max)
        lp += priors.log_prior_omega(seg.omega)
        lp += priors.log_prior_beta(seg.beta, hyper.sigma2_beta)
        lp += priors.log_prior_sigma2(seg.sigma2, hyper.nu0, hyper.gamma0)
    lp -= priors.log_prior_count(parent.m, hyper.lambda_omega, 1, hyper.m_max)
    lp -= priors.log_prior_omega(parent.omega)
    lp -= priors.log_prior_beta(parent.beta, hyper.sigma2_beta)
    lp -= priors.log_prior_sigma2(parent.sigma2, hyper.nu0, hyper.gamma0)

    b_small = priors.move_probabilities(k_small, hyper.lambda_s, 0, hyper.k_max, hyper.c)[0]
    d_big = priors.move_probabilities(k_small + 1, hyper.lambda_s, 0, hyper.k_max, hyper.c)[1]
    lq = (
        math.log(d_big)
        - math.log(k_small + 1.0)
        + math.log(0.5)
        - math.log(b_small)
        - birth_support_log_density(small.s, hyper.psi_s, n)
    )
    # reverse merge redraw: coefficients at the surviving frequencies and the
    # merged variance over the whole parent stretch
    cond_rev = beta_proposal(y_par, t_par, parent.omega, parent.sigma2, hyper)
    lq += cond_rev.logpdf(parent.beta)
    # forward redraws: each child's coefficients at its own split variance
    cond_l = beta_proposal(y_l, t_l, left.omega, left.sigma2, hyper)
    cond_r = beta_proposal(y_r, t_r, right.omega, right.sigma2, hyper)
    lq -= cond_l.logpdf(left.beta) + cond_r.logpdf(right.beta)

    # variance-split Jacobian |d(sig_l, sig_r)/d(sig_parent, u)|
    jac = 2.0 * (math.sqrt(left.sigma2) + math.sqrt(right.sigma2)) ** 2
    return ll + lp + lq + math.log(jac)


def cp_within(
    state: ModelState,
    ts: TimeSeries,
    hyper: Hyperparams,
    rng: np.random.Generator,
) -> tuple[ModelState, MoveOutcome]:
    """Relocate one change-point; the two adjacent segments keep their
    frequencies, get fresh coefficients, and (on acceptance) fresh variances."""
    k = state.k
    if k < 1:
        raise ValueError("relocation dispatched at k = 0")
    n = ts.n
    psi = hyper.psi_s
    j = int(rng.integers(k))
    lo = state.s[j - 1] if j > 0 else 1.0
    hi = state.s[j + 1] if j + 1 < k else float(n)
    if rng.random() < hyper.delta_s:
        cand = rng.uniform(lo + psi, hi - psi)
    else:
        cand = rng.normal(state.s[j], math.sqrt(hyper.sigma2_s))
    # mixture density is symmetric in (current, candidate): the uniform window
    # depends only on the unchanged neighbours
    if not lo + psi <= cand <= hi - psi:
        return state, MoveOutcome("within", False, NEG_INF)

    new_s = state.s.copy()
    new_s[j] = cand
    sl_old = segment_slices(state.s, n)
    sl_new = segment_slices(new_s, n)
    segs = (state.segments[j], state.segments[j + 1])
    for seg, (a, b) in zip(segs, (sl_new[j], sl_new[j + 1])):
        if b - a < 2 * seg.m + 2:
            return state, MoveOutcome("within", False, NEG_INF)

    log_ratio = priors.log_prior_changepoints(new_s, k, n) - priors.log_prior_changepoints(
        state.s, k, n
    )
    new_segments = list(state.segments)
    conds_new = []
    for idx, seg in zip((j, j + 1), segs):
        y_new, t_new = _segment_data(ts, *sl_new[idx])
        y_old, t_old = _segment_data(ts, *sl_old[idx])
        cond_new = beta_proposal(y_new, t_new, seg.omega, seg.sigma2, hyper)
        beta_new = cond_new.sample(rng)
        cond_old = beta_proposal(y_old, t_old, seg.omega, seg.sigma2, hyper)
        log_ratio += (
            loglik_term(y_new, t_new, seg.omega, beta_new, seg.sigma2, hyper)
            - loglik_term(y_old, t_old, seg.omega, seg.beta, seg.sigma2, hyper)
            + priors.log_prior_beta(beta_new, hyper.sigma2_beta)
            - priors.log_prior_beta(seg.beta, hyper.sigma2_beta)
            + cond_old.logpdf(seg.beta)
            - cond_new.logpdf(beta_new)
        )
        new_segments[idx] = SegmentParams(seg.omega.copy(), beta_new, seg.sigma2)
        conds_new.append((idx, y_new, t_new))

    accepted = mh_accept(rng, log_ratio)
    if not accepted:
        return state, MoveOutcome("within", False, log_ratio)

    # variance Gibbs step on the two repartitioned segments
    for idx, y_new, t_new in conds_new:
        seg = new_segments[idx]
        shape, scale = gibbs_params_at(y_new, t_new, seg.omega, seg.beta, hyper)
        seg.sigma2 = invgamma_sample(shape, scale, rng)
    return ModelState(new_s, new_segments), MoveOutcome("within", True, log_ratio)


def cp_birth(
    state: ModelState,
    ts: TimeSeries,
    hyper: Hyperparams,
    rng: np.random.Generator,
) -> tuple[ModelState, MoveOutcome]:
    """Split one segment at a fresh change-point."""
    k = state.k
    if k >= hyper.k_max:
        raise ValueError("split dispatched at k_max")
    n = ts.n
    if birth_support_log_density(state.s, hyper.psi_s, n) == NEG_INF:
        return state, MoveOutcome("birth", False, NEG_INF)
    intervals, total = support_intervals(state.s, hyper.psi_s, n)
    u_pos = rng.random() * total
    cand = None
    for a, b in intervals:
        if u_pos <= b - a:
            cand = a + u_pos
            break
        u_pos -= b - a
    if cand is None:
        cand = intervals[-1][1]

    j = int(np.searchsorted(state.s, cand))
    parent = state.segments[j]
    new_s = np.insert(state.s, j, cand)
    sl_new = segment_slices(new_s, n)
    for idx in (j, j + 1):
        a, b = sl_new[idx]
        if b - a < 2 * parent.m + 2:
            return state, MoveOutcome("birth", False, NEG_INF)

    u = rng.random()
    if not 0.0 < u < 1.0:
        return state, MoveOutcome("birth", False, NEG_INF)
    sig_l = u / (1.0 - u) * parent.sigma2
    sig_r = (1.0 - u) / u * parent.sigma2
    if not (np.isfinite(sig_l) and np.isfinite(sig_r) and sig_l > 0.0 and sig_r > 0.0):
        return state, MoveOutcome("birth", False, NEG_INF)

    children = []
    for idx, sig in zip((j, j + 1), (sig_l, sig_r)):
        y_c, t_c = _segment_data(ts, *sl_new[idx])
        cond = beta_proposal(y_c, t_c, parent.omega, sig, hyper)
        children.append(SegmentParams(parent.omega.copy(), cond.sample(rng), sig))

    new_segments = state.segments[:j] + children + state.segments[j + 1 :]
    proposed = ModelState(new_s, new_segments)
    log_ratio = cp_split_log_ratio(state, proposed, j, ts, hyper)
    accepted = mh_accept(rng, log_ratio)
    return (proposed if accepted else state), MoveOutcome("birth", accepted, log_ratio)


def cp_death(
    state: ModelState,
    ts: TimeSeries,
    hyper: Hyperparams,
    rng: np.random.Generator,
) -> tuple[ModelState, MoveOutcome]:
    """Merge the two segments around one change-point."""
    k = state.k
    if k < 1:
        raise ValueError("merge dispatched at k = 0")
    n = ts.n
    j = int(rng.integers(k))
    keep = j + int(rng.integers(2))  # which child's frequencies survive
    surv = state.segments[keep]
    new_s = np.delete(state.s, j)
    sl_new = segment_slices(new_s, n)
    a, b = sl_new[j]
    if b - a < 2 * surv.m + 2:
        return state, MoveOutcome("death", False, NEG_INF)

    sig_merged = math.sqrt(state.segments[j].sigma2 * state.segments[j + 1].sigma2)
    y_m, t_m = _segment_data(ts, a, b)
    cond = beta_proposal(y_m, t_m, surv.omega, sig_merged, hyper)
    merged = SegmentParams(surv.omega.copy(), cond.sample(rng), sig_merged)
    new_segments = state.segments[:j] + [merged] + state.segments[j + 2 :]
    proposed = ModelState(new_s, new_segments)
    log_ratio = -cp_split_log_ratio(proposed, state, j, ts, hyper)
    accepted = mh_accept(rng, log_ratio)
    return (proposed if accepted else state), MoveOutcome("death", accepted, log_ratio)
