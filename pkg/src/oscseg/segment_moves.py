"""Segment model moves: one-at-a-time frequency updates (periodogram-driven or
random-walk), the exact-conditional coefficient step, the variance Gibbs step,
and the frequency birth/death pair.

Frequencies are kept sorted with their coefficient pairs attached by position.
Within-move candidates are confined to the open interval between neighbouring
frequencies: a crossing would permute labels and break per-kernel detailed
balance. Birth and death share one log-ratio routine so a matched pair negates
exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels, priors, spectral
from .conjugate import (
    beta_proposal,
    gibbs_params_at,
    gibbs_sigma2_params,
    invgamma_logpdf,
    invgamma_sample,
    loglik_term,
)
from .model import Hyperparams, SegmentParams

NEG_INF = float("-inf")


@dataclass
class MoveOutcome:
    """One Metropolis-Hastings accept/reject record."""

    kind: str
    accepted: bool
    log_ratio: float


def mh_accept(rng: np.random.Generator, log_ratio: float) -> bool:
    """Standard M-H coin flip; always consumes one uniform."""
    u = rng.random()
    if log_ratio >= 0.0:
        return True
    if log_ratio == NEG_INF:
        return False
    if u == 0.0:
        return True
    return math.log(u) < log_ratio


def _slot_bounds(omega: np.ndarray, l: int) -> tuple[float, float]:
    lo = omega[l - 1] if l > 0 else 0.0
    hi = omega[l + 1] if l + 1 < omega.shape[0] else 0.5
    return lo, hi


def _candidate_ok(omega, l, cand, hyper: Hyperparams) -> bool:
    if not 0.0 < cand < 0.5:
        return False
    lo, hi = _slot_bounds(omega, l)
    if not lo < cand < hi:
        return False
    if hyper.enforce_psi_omega_within:
        psi = hyper.psi_omega
        if l > 0 and cand - omega[l - 1] < psi:
            return False
        if l + 1 < omega.shape[0] and omega[l + 1] - cand < psi:
            return False
    return True


def within_move(
    seg: SegmentParams,
    y_seg: np.ndarray,
    t_seg: np.ndarray,
    pg: spectral.Periodogram,
    hyper: Hyperparams,
    rng: np.random.Generator,
) -> tuple[SegmentParams, list[MoveOutcome]]:
    """Fixed-dimension update of one segment: frequencies one at a time, then
    the coefficient vector, then the residual variance."""
    outcomes: list[MoveOutcome] = []
    omega = seg.omega.copy()
    beta = seg.beta.copy()
    sigma2 = seg.sigma2
    n = y_seg.shape[0]
    m = omega.shape[0]
    sd_omega = (
        math.sqrt(hyper.sigma2_omega)
        if hyper.sigma2_omega is not None
        else 1.0 / (50.0 * n)
    )

    ll_cur = loglik_term(y_seg, t_seg, omega, beta, sigma2, hyper)
    for l in range(m):
        if rng.random() < hyper.delta_omega:
            kind = "within-freq-q1"
            if pg.total > 0.0:
                cand = spectral.q1_sample(pg, rng)
                log_fwd = spectral.q1_log_density(cand, pg)
                log_rev = spectral.q1_log_density(omega[l], pg)
            else:
                cand = rng.uniform(0.0, 0.5)
                log_fwd = log_rev = 0.0
        else:
            kind = "within-freq-rw"
            cand = rng.normal(omega[l], sd_omega)
            log_fwd = log_rev = 0.0

        if not _candidate_ok(omega, l, cand, hyper):
            outcomes.append(MoveOutcome(kind, False, NEG_INF))
            continue
        cand_omega = omega.copy()
        cand_omega[l] = cand
        ll_cand = loglik_term(y_seg, t_seg, cand_omega, beta, sigma2, hyper)
        log_ratio = (ll_cand - ll_cur) + (log_rev - log_fwd)
        accepted = mh_accept(rng, log_ratio)
        outcomes.append(MoveOutcome(kind, accepted, log_ratio))
        if accepted:
            omega = cand_omega
            ll_cur = ll_cand

    # coefficient step: independence M-H from the exact conditional; the
    # quadratic-form RSS keeps current and proposed terms consistent
    cond = beta_proposal(y_seg, t_seg, omega, sigma2, hyper)
    beta_prop = cond.sample(rng)
    if hyper.likelihood_off:
        ll_c = ll_p = 0.0
        rss_final = 0.0
    else:
        xtx, xty = kernels.xtx_xty(y_seg, t_seg, omega)
        yty = float(y_seg @ y_seg)

        def _rss(b):
            return max(yty - 2.0 * float(b @ xty) + float(b @ (xtx @ b)), 0.0)

        ll_c = -0.5 * _rss(beta) / sigma2
        ll_p = -0.5 * _rss(beta_prop) / sigma2
    log_ratio = (
        ll_p
        - ll_c
        + priors.log_prior_beta(beta_prop, hyper.sigma2_beta)
        - priors.log_prior_beta(beta, hyper.sigma2_beta)
        + cond.logpdf(beta)
        - cond.logpdf(beta_prop)
    )
    accepted = mh_accept(rng, log_ratio)
    outcomes.append(MoveOutcome("within-beta", accepted, log_ratio))
    if accepted:
        beta = beta_prop
    if not hyper.likelihood_off:
        rss_final = _rss(beta)

    # variance Gibbs step (always accepted, not an M-H record)
    shape, scale = gibbs_sigma2_params(rss_final, n, hyper)
    sigma2 = invgamma_sample(shape, scale, rng)

    return SegmentParams(omega, beta, sigma2), outcomes


def admissible_gaps(omega, phi: float, psi: float) -> tuple[list[tuple[float, float]], float]:
    """Sub-intervals of (0, phi) at distance >= psi from every existing
    frequency, and their total length. New frequencies are proposed uniformly
    over this union."""
    gaps: list[tuple[float, float]] = []
    lo = 0.0
    for w in omega:
        hi = min(w - psi, phi)
        if hi > lo:
            gaps.append((lo, hi))
        lo = max(lo, w + psi)
        if lo >= phi:
            break
    if lo < phi:
        gaps.append((lo, phi))
    total = sum(b - a for a, b in gaps)
    return gaps, total


def gap_log_density(omega_remaining, value: float, phi: float, psi: float) -> float:
    """Log density of the birth proposal at `value` given the other frequencies."""
    gaps, total = admissible_gaps(omega_remaining, phi, psi)
    if total <= 0.0:
        return NEG_INF
    for a, b in gaps:
        if a <= value <= b:
            return -math.log(total)
    return NEG_INF


def _draw_from_union(gaps, total, rng) -> float:
    u = rng.random() * total
    for a, b in gaps:
        width = b - a
        if u <= width:
            return a + u
        u -= width
    return gaps[-1][1]


def _inserted_value(small_omega: np.ndarray, big_omega: np.ndarray) -> float:
    """The single frequency present in big but not in small (values are copied
    bit-for-bit between the two states, so float equality is reliable)."""
    i = 0
    for v in big_omega:
        if i < small_omega.shape[0] and v == small_omega[i]:
            i += 1
        else:
            return float(v)
    raise ValueError("no inserted frequency found")


def segment_birth_log_ratio(
    small: SegmentParams,
    big: SegmentParams,
    y_seg: np.ndarray,
    t_seg: np.ndarray,
    hyper: Hyperparams,
) -> float:
    """Log M-H ratio of the frequency birth small -> big. The matching death
    uses the exact negation.

    On the sorted-frequency state space the order-statistics prior factor
    (m+1) cancels the reverse death's uniform victim choice, so neither
    appears; the frequency prior contributes one uniform density (log 2).
    """
    new_value = _inserted_value(small.omega, big.omega)
    ll = loglik_term(y_seg, t_seg, big.omega, big.beta, big.sigma2, hyper) - loglik_term(
        y_seg, t_seg, small.omega, small.beta, small.sigma2, hyper
    )
    lp = (
        priors.log_prior_count(big.m, hyper.lambda_omega, 1, hyper.m_max)
        - priors.log_prior_count(small.m, hyper.lambda_omega, 1, hyper.m_max)
        + priors.LOG_TWO
        + priors.log_prior_beta(big.beta, hyper.sigma2_beta)
        - priors.log_prior_beta(small.beta, hyper.sigma2_beta)
        + priors.log_prior_sigma2(big.sigma2, hyper.nu0, hyper.gamma0)
        - priors.log_prior_sigma2(small.sigma2, hyper.nu0, hyper.gamma0)
    )
    b_small = priors.move_probabilities(
        small.m, hyper.lambda_omega, 1, hyper.m_max, hyper.c
    )[0]
    d_big = priors.move_probabilities(big.m, hyper.lambda_omega, 1, hyper.m_max, hyper.c)[1]
    lq = math.log(d_big) - math.log(b_small)
    lq -= gap_log_density(small.omega, new_value, hyper.phi_omega, hyper.psi_omega)
    # forward draws: coefficients at (big omega, small sigma2), then variance
    cond_fwd = beta_proposal(y_seg, t_seg, big.omega, small.sigma2, hyper)
    lq -= cond_fwd.logpdf(big.beta)
    shp_f, scl_f = gibbs_params_at(y_seg, t_seg, big.omega, big.beta, hyper)
    lq -= invgamma_logpdf(big.sigma2, shp_f, scl_f)
    # reverse death redraws: coefficients at (small omega, big sigma2), then variance
    cond_rev = beta_proposal(y_seg, t_seg, small.omega, big.sigma2, hyper)
    lq += cond_rev.logpdf(small.beta)
    shp_r, scl_r = gibbs_params_at(y_seg, t_seg, small.omega, small.beta, hyper)
    lq += invgamma_logpdf(small.sigma2, shp_r, scl_r)
    return ll + lp + lq


def birth_move(
    seg: SegmentParams,
    y_seg: np.ndarray,
    t_seg: np.ndarray,
    hyper: Hyperparams,
    rng: np.random.Generator,
) -> tuple[SegmentParams, MoveOutcome]:
    """Propose one additional frequency for the segment."""
    if seg.m >= hyper.m_max:
        raise ValueError("birth dispatched at m_max")
    n = y_seg.shape[0]
    if n < 2 * (seg.m + 1) + 2:
        return seg, MoveOutcome("birth", False, NEG_INF)
    gaps, total = admissible_gaps(seg.omega, hyper.phi_omega, hyper.psi_omega)
    if total <= 0.0:
        return seg, MoveOutcome("birth", False, NEG_INF)
    value = _draw_from_union(gaps, total, rng)
    if not 0.0 < value < 0.5:
        return seg, MoveOutcome("birth", False, NEG_INF)
    big_omega = np.sort(np.append(seg.omega, value))
    cond = beta_proposal(y_seg, t_seg, big_omega, seg.sigma2, hyper)
    big_beta = cond.sample(rng)
    shape, scale = gibbs_params_at(y_seg, t_seg, big_omega, big_beta, hyper)
    big_sigma2 = invgamma_sample(shape, scale, rng)
    proposed = SegmentParams(big_omega, big_beta, big_sigma2)
    log_ratio = segment_birth_log_ratio(seg, proposed, y_seg, t_seg, hyper)
    accepted = mh_accept(rng, log_ratio)
    return (proposed if accepted else seg), MoveOutcome("birth", accepted, log_ratio)


def death_move(
    seg: SegmentParams,
    y_seg: np.ndarray,
    t_seg: np.ndarray,
    hyper: Hyperparams,
    rng: np.random.Generator,
) -> tuple[SegmentParams, MoveOutcome]:
    """Propose removing one frequency chosen uniformly at random."""
    if seg.m < 2:
        raise ValueError("death dispatched at m = 1")
    victim = int(rng.integers(seg.m))
    small_omega = np.delete(seg.omega, victim)
    cond = beta_proposal(y_seg, t_seg, small_omega, seg.sigma2, hyper)
    small_beta = cond.sample(rng)
    shape, scale = gibbs_params_at(y_seg, t_seg, small_omega, small_beta, hyper)
    small_sigma2 = invgamma_sample(shape, scale, rng)
    proposed = SegmentParams(small_omega, small_beta, small_sigma2)
    log_ratio = -segment_birth_log_ratio(proposed, seg, y_seg, t_seg, hyper)
    accepted = mh_accept(rng, log_ratio)
    return (proposed if accepted else seg), MoveOutcome("death", accepted, log_ratio)
