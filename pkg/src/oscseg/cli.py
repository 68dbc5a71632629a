"""Command line interface: simulate | fit | summarize.

Options may come from a JSON config file (--config) with explicit flags
taking precedence. Every hyperparameter default is documented in --help.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import serialize, simulate, summaries
from .chain import ChainConfig, run_chain
from .kernels import BACKEND
from .model import Hyperparams, TimeSeries

GENERATORS = ("illustrative", "illustrative-t", "piecewise-ar", "slowly-varying-ar")

_HYPER_HELP = {
    "lambda_s": "Poisson prior mean for the number of change-points",
    "lambda_omega": "Poisson prior mean for the per-segment frequency count",
    "k_max": "maximum number of change-points",
    "m_max": "maximum frequencies per segment",
    "sigma2_beta": "prior variance of the linear coefficients",
    "nu0": "Inverse-Gamma prior shape constant (shape = nu0/2)",
    "gamma0": "Inverse-Gamma prior scale constant (scale = gamma0/2)",
    "psi_s": "minimum spacing between change-points (samples)",
    "psi_omega": "minimum spacing between frequencies (default 2/n)",
    "phi_omega": "upper bound of the frequency birth proposal",
    "c": "dimension-move probability constant (at most 0.5)",
    "delta_omega": "weight of the periodogram branch in the frequency proposal",
    "sigma2_omega": "frequency random-walk variance (default (1/(50 n_seg))^2)",
    "delta_s": "weight of the uniform branch in the relocation proposal",
    "sigma2_s": "relocation random-walk variance (default max(5, n/200)^2)",
}


def _add_hyper_args(parser: argparse.ArgumentParser):
    defaults = Hyperparams()
    for f in fields(Hyperparams):
        if f.name not in _HYPER_HELP:
            continue
        kind = int if f.name in ("k_max", "m_max") else float
        parser.add_argument(
            f"--{f.name.replace('_', '-')}",
            type=kind,
            default=None,
            help=f"{_HYPER_HELP[f.name]} (default: {getattr(defaults, f.name)})",
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscseg",
        description="Bayesian segmentation of oscillatory time series "
        f"(kernel backend: {BACKEND})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write a synthetic series and its truth")
    p_sim.add_argument("--model", choices=GENERATORS, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out-dir", default=".")

    p_fit = sub.add_parser("fit", help="run the sampler on a CSV series")
    p_fit.add_argument("--input", required=True, help="CSV with columns t,y or bare y")
    p_fit.add_argument("--out-dir", default=".")
    p_fit.add_argument("--config", help="JSON file with any of the fit options")
    p_fit.add_argument("--iterations", type=int, default=None, help="default 20000")
    p_fit.add_argument("--burn-in", type=int, default=None, help="default 5000")
    p_fit.add_argument("--thin", type=int, default=None, help="default 1")
    p_fit.add_argument("--seed", type=int, default=None, help="default 0")
    p_fit.add_argument("--init-k", type=int, default=None, help="initial change-point count")
    p_fit.add_argument(
        "--init-s", default=None, help="comma-separated initial change-point locations"
    )
    p_fit.add_argument(
        "--parallel-segments", action="store_true", default=None,
        help="run segment moves on a thread pool (identical output)",
    )
    p_fit.add_argument("--quiet", action="store_true")
    _add_hyper_args(p_fit)

    p_sum = sub.add_parser("summarize", help="write posterior summary tables")
    p_sum.add_argument("--samples", required=True, help="samples.jsonl from fit")
    p_sum.add_argument("--out-dir", default=".")
    p_sum.add_argument("--k", type=int, default=None, help="condition on this k (default: modal)")
    p_sum.add_argument(
        "--m", default=None, help="comma-separated per-segment m (default: modal given k)"
    )
    p_sum.add_argument("--bin-width", type=float, default=1.0)
    p_sum.add_argument(
        "--truth-peaks", default=None,
        help="CSV with a reference per-t peak curve; adds an RSS line to peak_curve.csv",
    )
    return parser


def _cmd_simulate(args) -> int:
    out_dir = serialize.ensure_dir(args.out_dir)
    rng = np.random.default_rng(args.seed)
    if args.model in ("illustrative", "illustrative-t"):
        truth = simulate.demo_truth(student_t=args.model.endswith("-t"))
        ts = simulate.gen_piecewise_sinusoid(truth, rng)
        truth_dict = truth.to_dict()
    elif args.model == "piecewise-ar":
        ts = simulate.gen_piecewise_ar(rng)
        truth_dict = {
            "model": "piecewise-ar",
            "boundaries": [250, 400],
            "coefficients": [[1.9, -0.975], [1.9, -0.991], [-1.35, -0.37, 0.36]],
            "noise_sd": [0.5, 1.0, 1.0],
        }
    else:
        ts = simulate.gen_slowly_varying_ar(rng)
        truth_dict = {
            "model": "slowly-varying-ar",
            "n": ts.n,
            "a1": "0.8*(1 - 0.5*cos(pi*t/n))",
            "a2": -0.81,
            "peak_curve": simulate.slowly_varying_peak_curve(ts.n).tolist(),
        }
    truth_dict["seed"] = args.seed
    serialize.write_series_csv(out_dir / "series.csv", ts)
    with open(out_dir / "truth.json", "w") as fh:
        json.dump(truth_dict, fh, indent=1)
    print(f"wrote {out_dir / 'series.csv'} ({ts.n} rows) and truth.json")
    return 0


def _merge_config(args) -> dict:
    merged: dict = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            merged.update(json.load(fh))
    for key, val in vars(args).items():
        if key in ("command", "config", "input", "out_dir", "quiet") or val is None:
            continue
        merged[key] = val
    return merged


def _cmd_fit(args) -> int:
    ts = serialize.read_series_csv(args.input)
    opts = _merge_config(args)

    hyper_kwargs = {f.name: opts[f.name] for f in fields(Hyperparams) if f.name in opts}
    hyper = Hyperparams(**hyper_kwargs)
    init_s = opts.get("init_s")
    if isinstance(init_s, str):
        init_s = [float(v) for v in init_s.split(",") if v.strip()]
    config = ChainConfig(
        iterations=int(opts.get("iterations", 20000)),
        burn_in=int(opts.get("burn_in", 5000)),
        thin=int(opts.get("thin", 1)),
        seed=int(opts.get("seed", 0)),
        parallel_segments=bool(opts.get("parallel_segments", False)),
        init_k=int(opts.get("init_k", 0)),
        init_s=init_s,
    )
    config.validate()
    hyper.resolved(ts.n)  # fail fast on bad hyperparameters

    started = time.perf_counter()
    out = run_chain(ts, hyper, config)
    elapsed = time.perf_counter() - started

    out_dir = serialize.ensure_dir(args.out_dir)
    serialize.write_samples(out_dir / "samples.jsonl", out)
    serialize.write_table_csv(
        out_dir / "loglik.csv",
        ["iteration", "loglik"],
        [(i + 1, v) for i, v in enumerate(out.loglik)],
    )
    serialize.write_table_csv(
        out_dir / "acceptance.csv",
        ["family", "kind", "accepted", "attempted", "rate"],
        [
            (r["family"], r["kind"], r["accepted"], r["attempted"], r["rate"])
            for r in summaries.acceptance_report(out)
        ],
    )
    if not args.quiet:
        print(
            f"fit: {config.iterations} iterations on n={ts.n} in {elapsed:.1f}s "
            f"({BACKEND} kernels), {len(out.samples)} stored samples"
        )
        print(f"wrote samples.jsonl, loglik.csv, acceptance.csv to {out_dir}")
    return 0


def _cmd_summarize(args) -> int:
    out = serialize.read_samples(args.samples)
    out_dir = serialize.ensure_dir(args.out_dir)
    ts = TimeSeries(np.zeros(out.n))  # summaries only need the time grid

    k_table = summaries.posterior_k(out)
    serialize.write_table_csv(
        out_dir / "posterior_k.csv", ["k", "probability"], sorted(k_table.items())
    )

    k_star = args.k if args.k is not None else summaries.modal_k(out)
    m_tables = summaries.posterior_m_given_k(out, k_star)
    serialize.write_table_csv(
        out_dir / "posterior_m.csv",
        ["segment", "m", "probability"],
        [(j, m, p) for j, tab in enumerate(m_tables) for m, p in sorted(tab.items())],
    )

    rows = []
    for j, info in enumerate(summaries.changepoint_posterior(out, k_star, args.bin_width)):
        rows.append((j, info["mean"], info["sd"]))
    serialize.write_table_csv(out_dir / "changepoints.csv", ["ordinal", "mean", "sd"], rows)

    if args.m is not None:
        m_star = [int(v) for v in args.m.split(",")]
    else:
        m_star = summaries.modal_m(out, k_star)
    freq = summaries.frequency_posterior(out, k_star, m_star)
    serialize.write_table_csv(
        out_dir / "frequencies.csv",
        ["segment", "ordinal", "mean", "sd"],
        [
            (j, l, info["mean"][l], info["sd"][l])
            for j, info in enumerate(freq)
            for l in range(m_star[j])
        ],
    )

    sig = summaries.estimated_signal(out, ts)
    serialize.write_table_csv(
        out_dir / "signal.csv",
        ["t", "mean", "lo2.5", "hi97.5"],
        [
            (i + 1, sig["mean"][i], sig["lo"][i], sig["hi"][i])
            for i in range(out.n)
        ],
    )

    table = summaries.power_phase_table(out, k_star, m_star)
    serialize.write_table_csv(
        out_dir / "power_phase.csv",
        ["segment", "ordinal", "frequency", "power", "phase"],
        [
            (j, l, row["frequency"], row["power"], row["phase"])
            for j, rows_j in enumerate(table)
            for l, row in enumerate(rows_j)
        ],
    )

    peak = summaries.time_varying_peak(out, ts)
    serialize.write_table_csv(
        out_dir / "peak_curve.csv",
        ["t", "frequency"],
        [(i + 1, peak[i]) for i in range(out.n)],
    )
    if args.truth_peaks:
        truth_ts = serialize.read_series_csv(args.truth_peaks)
        print(f"peak RSS vs reference: {summaries.rss(peak, truth_ts.values)!r}")

    print(
        f"summaries written to {out_dir} (conditioned on k={k_star}, "
        f"m={','.join(map(str, m_star))})"
    )
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "fit":
            return _cmd_fit(args)
        return _cmd_summarize(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
