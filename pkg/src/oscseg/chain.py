"""Sampler driver: per iteration, one model move for every segment followed by
one change-point move, with reproducible per-task random substreams.

Substreams are keyed on (iteration, slot) rather than on threads, so running
the segment moves on a worker pool cannot change the output: identical
(seed, config, data) give bit-identical results with parallelism on or off.
"""

from __future__ import annotations


from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import priors
from .changepoint_moves import cp_birth, cp_death, cp_within
from .conjugate import beta_proposal, gibbs_params_at, invgamma_sample
from .model import (
    Hyperparams,
    InvalidStateError,
    ModelState,
    SegmentParams,
    TimeSeries,
    segment_slices,
    total_loglik,
)
from .segment_moves import MoveOutcome, birth_move, death_move, within_move
from .spectral import PeriodogramCache, q1_sample

SEGMENT_KINDS = ("within-freq-q1", "within-freq-rw", "within-beta", "birth", "death")
CHANGEPOINT_KINDS = ("within", "birth", "death")


@dataclass
class ChainConfig:
    iterations: int = 20000
    burn_in: int = 5000
    thin: int = 1
    seed: int = 0
    parallel_segments: bool = False
    init_k: int = 0
    init_s: list[float] | None = None

    def validate(self):
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")
        if self.thin < 1:
            raise ValueError("thin must be at least 1")
        if self.init_k < 0:
            raise ValueError("init_k must be non-negative")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "thin": self.thin,
            "seed": self.seed,
            "parallel_segments": self.parallel_segments,
            "init_k": self.init_k,
            "init_s": None if self.init_s is None else list(self.init_s),
        }


@dataclass
class ChainOutput:
    samples: list[ModelState]
    counters: dict[tuple[str, str], list[int]]  # (family, kind) -> [accepted, attempted]
    loglik: np.ndarray
    n: int
    hyper: Hyperparams | None = None
    config: ChainConfig | None = None

    def rate(self, family: str, kind: str) -> float:
        acc, att = self.counters.get((family, kind), [0, 0])
        return acc / att if att else float("nan")


def _stream(seed: int, key: tuple[int, ...]) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def init_state(
    ts: TimeSeries,
    hyper: Hyperparams,
    config: ChainConfig,
    rng: np.random.Generator,
) -> ModelState:
    """Starting state: init_k evenly spaced change-points (or the given ones),
    one frequency per segment seeded from its periodogram."""
    n = ts.n
    k0 = config.init_k
    if config.init_s is not None:
        s = np.asarray(config.init_s, dtype=np.float64)
        k0 = s.shape[0]
    else:
        s = 1.0 + (n - 1.0) * np.arange(1, k0 + 1) / (k0 + 1.0)
    edges = np.concatenate(([1.0], s, [float(n)]))
    if np.any(np.diff(edges) < hyper.psi_s) or (k0 and (s[0] < 1 + hyper.psi_s or s[-1] > n - hyper.psi_s)):
        raise ValueError("initial change-points violate the psi_s spacing")
    if k0 > hyper.k_max:
        raise ValueError("init_k exceeds k_max")

    cache = PeriodogramCache(ts.values)
    segments = []
    for a, b in segment_slices(s, n):
        if b - a < 4:
            raise ValueError("initial segmentation produces a segment below 4 samples")
        y_seg, t_seg = ts.values[a:b], ts.t[a:b]
        pg = cache.get(a, b)
        if pg.total > 0.0:
            omega = np.array([q1_sample(pg, rng)])
        else:
            omega = np.array([rng.uniform(0.0, 0.5)])
        sigma2_boot = max(float(np.var(y_seg)), 1e-12)
        cond = beta_proposal(y_seg, t_seg, omega, sigma2_boot, hyper)
        beta = cond.sample(rng)
        shape, scale = gibbs_params_at(y_seg, t_seg, omega, beta, hyper)
        sigma2 = invgamma_sample(shape, scale, rng)
        segments.append(SegmentParams(omega, beta, sigma2))
    state = ModelState(s, segments)
    state.validate(n, hyper)
    return state


def _segment_task(args):
    seg, y_seg, t_seg, pg, probs, hyper, rng = args
    u = rng.random()
    b, d, _ = probs
    if u <= b:
        new_seg, outcome = birth_move(seg, y_seg, t_seg, hyper, rng)
        return new_seg, [outcome]
    if u <= b + d:
        new_seg, outcome = death_move(seg, y_seg, t_seg, hyper, rng)
        return new_seg, [outcome]
    return within_move(seg, y_seg, t_seg, pg, hyper, rng)


def run_chain(ts: TimeSeries, hyper: Hyperparams, config: ChainConfig) -> ChainOutput:
    """Run the two-level sampler and collect post-burn-in states."""
    config.validate()
    hyper = hyper.resolved(ts.n)
    n = ts.n

    state = init_state(ts, hyper, config, _stream(config.seed, (0, 0)))
    m_table = priors.move_prob_table(hyper.lambda_omega, 1, hyper.m_max, hyper.c)
    k_table = priors.move_prob_table(hyper.lambda_s, 0, hyper.k_max, hyper.c)

    counters: dict[tuple[str, str], list[int]] = {}
    for kind in SEGMENT_KINDS:
        counters[("segment", kind)] = [0, 0]
    for kind in CHANGEPOINT_KINDS:
        counters[("changepoint", kind)] = [0, 0]

    def tally(family: str, outcomes: list[MoveOutcome]):
        for out in outcomes:
            cell = counters[(family, out.kind)]
            cell[1] += 1
            cell[0] += int(out.accepted)

    cache = PeriodogramCache(ts.values)
    samples: list[ModelState] = []
    loglik = np.empty(config.iterations)
    pool = ThreadPoolExecutor(max_workers=min(8, 1 + hyper.k_max)) if config.parallel_segments else None

    try:
        for it in range(1, config.iterations + 1):
            slices = segment_slices(state.s, n)
            tasks = [
                (
                    state.segments[j],
                    ts.values[a:b],
                    ts.t[a:b],
                    cache.get(a, b),
                    m_table[state.segments[j].m - 1],
                    hyper,
                    _stream(config.seed, (it, 1 + j)),
                )
                for j, (a, b) in enumerate(slices)
            ]
            results = list(pool.map(_segment_task, tasks)) if pool else [
                _segment_task(t) for t in tasks
            ]
            new_segments = []
            for seg, outcomes in results:
                new_segments.append(seg)
                tally("segment", outcomes)
            state = ModelState(state.s, new_segments)

            rng_cp = _stream(config.seed, (it, 0))
            u = rng_cp.random()
            b, d, _ = k_table[state.k]
            if u <= b:
                state, outcome = cp_birth(state, ts, hyper, rng_cp)
                tally("changepoint", [outcome])
            elif u <= b + d:
                state, outcome = cp_death(state, ts, hyper, rng_cp)
                tally("changepoint", [outcome])
            elif state.k >= 1:
                state, outcome = cp_within(state, ts, hyper, rng_cp)
                tally("changepoint", [outcome])
            # k = 0 within-step has nothing to relocate: structural no-op

            loglik[it - 1] = total_loglik(state, ts)
            if not np.isfinite(loglik[it - 1]):
                raise InvalidStateError(f"non-finite log-likelihood at iteration {it}")
            if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
                samples.append(state.copy())
    finally:
        if pool:
            pool.shutdown()

    return ChainOutput(samples, counters, loglik, n, hyper, config)
