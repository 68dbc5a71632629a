"""On-disk formats: JSON-lines sampler states (variable-dimension states do
not fit rectangular files), CSV series ingestion, CSV table emission."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .chain import ChainConfig, ChainOutput
from .model import Hyperparams, ModelState, SegmentParams, TimeSeries

SCHEMA_VERSION = 1


def state_to_record(state: ModelState) -> dict:
    return {
        "k": state.k,
        "s": state.s.tolist(),
        "segments": [
            {"omega": seg.omega.tolist(), "beta": seg.beta.tolist(), "sigma2": seg.sigma2}
            for seg in state.segments
        ],
    }


def state_from_record(rec: dict) -> ModelState:
    segments = [
        SegmentParams(np.array(s["omega"]), np.array(s["beta"]), s["sigma2"])
        for s in rec["segments"]
    ]
    return ModelState(np.array(rec["s"], dtype=np.float64), segments)


def write_samples(path, out: ChainOutput):
    """First line holds the run metadata (schema version, n, hyperparameters,
    chain config, acceptance counters); each further line is one state."""
    meta = {
        "schema_version": SCHEMA_VERSION,
        "kind": "meta",
        "n": out.n,
        "hyper": out.hyper.to_dict() if out.hyper else None,
        "config": out.config.to_dict() if out.config else None,
        "counters": {f"{fam}/{kind}": v for (fam, kind), v in out.counters.items()},
    }
    with open(path, "w") as fh:
        fh.write(json.dumps(meta) + "\n")
        for st in out.samples:
            fh.write(json.dumps(state_to_record(st)) + "\n")


def read_samples(path) -> ChainOutput:
    with open(path) as fh:
        first = fh.readline()
        if not first:
            raise ValueError(f"{path}: empty samples file")
        meta = json.loads(first)
        if meta.get("kind") != "meta" or "schema_version" not in meta:
            raise ValueError(f"{path}: missing metadata line")
        if meta["schema_version"] != SCHEMA_VERSION:
            raise ValueError(f"{path}: unsupported schema version {meta['schema_version']}")
        samples = [state_from_record(json.loads(line)) for line in fh if line.strip()]
    counters = {}
    for key, val in meta.get("counters", {}).items():
        fam, kind = key.split("/", 1)
        counters[(fam, kind)] = list(val)
    hyper = Hyperparams(**meta["hyper"]) if meta.get("hyper") else None
    config = ChainConfig(**meta["config"]) if meta.get("config") else None
    return ChainOutput(samples, counters, np.empty(0), meta["n"], hyper, config)


def read_series_csv(path) -> TimeSeries:
    """Accepts `t,y` or bare `y` columns, with or without a header row."""
    values = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row if c.strip() != ""]
            if not row:
                continue
            if lineno == 1 and any(not _numeric(c) for c in row):
                continue  # header
            try:
                nums = [float(c) for c in row]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-numeric value ({exc})") from None
            if len(nums) == 1:
                values.append(nums[0])
            elif len(nums) == 2:
                values.append(nums[1])
            else:
                raise ValueError(f"{path}:{lineno}: expected 1 or 2 columns, got {len(nums)}")
    if not values:
        raise ValueError(f"{path}: no observations found")
    return TimeSeries(np.array(values))


def _numeric(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def write_series_csv(path, ts: TimeSeries):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "y"])
        for t, y in zip(ts.t, ts.values):
            writer.writerow([int(t), repr(float(y))])


def write_table_csv(path, header: list[str], rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def ensure_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p
