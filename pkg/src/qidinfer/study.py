"""Seeded Monte-Carlo study harness.

A study sweeps (n, run_id) over a model, runs the spectral pipeline plus the
kernel decontamination on every replication, and persists one JSON record
per run. Guarantees:

* determinism: identical configs (including base_seed) produce byte-identical
  ``report.ndjson``/``summary.json``/``config.json`` regardless of the worker
  count, because per-run seeds are derived from (base_seed, n, run_id) via
  ``numpy.random.SeedSequence`` spawn keys and records are assembled in a
  fixed order. Wall-clock timings go to the separate, non-canonical
  ``timings.json``.
* failure tolerance: a run that trips an estimator guard (for example a
  near-zero characteristic-function modulus) is recorded as a data point
  with its error name, never aborts the sweep.
* observability: every record carries the decontamination error both with
  estimated parameters (full pipeline) and with the model's true parameters
  injected (ablation), and both before and after the positive-part trim.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .core import (DensityCurve, KernelSpec, UniformGrid, bandwidth_rule,
                   l2_distance)
from .em import EmConfig, em_fit
from .errors import QidInferError
from .mixture import decontaminate, kde, positive_part
from .models import (ModelSpec, TwoNormalMixture, exact_g_circ, exact_triplet,
                     model_from_dict, model_to_dict, sample_model)
from .spectral import DEFAULT_GRID_COUNT, DEFAULT_MODULUS_FLOOR, estimate_triplet
from .weights import build_base_weight

__all__ = [
    "StudyConfig",
    "StudyReport",
    "derive_run_seed",
    "run_study",
    "write_report",
    "load_report",
    "summarize_records",
]


@dataclass(frozen=True)
class StudyConfig:
    model: ModelSpec
    n_values: Sequence[int]
    n_runs: int
    U: float
    V: float
    T: Optional[float] = None
    epsilon: float = 0.5
    weight_kind: str = "indicator"
    grid_count: int = DEFAULT_GRID_COUNT
    bandwidth_c: float = 1.0 / 30.0
    modulus_floor: float = DEFAULT_MODULUS_FLOOR
    base_seed: int = 0
    with_em: bool = False
    x_lo: float = -10.0
    x_hi: float = 10.0
    x_count: int = 2001
    workers: int = 1
    outputs: Optional[str] = None

    def __post_init__(self):
        if self.n_runs < 1:
            raise ValueError(f"n_runs must be >= 1, got {self.n_runs}")
        if any(n < 10 for n in self.n_values):
            raise ValueError(f"all n_values must be >= 10, got {list(self.n_values)}")
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))

    def to_dict(self) -> dict:
        d = {
            "model": model_to_dict(self.model),
            "n_values": list(self.n_values),
            "n_runs": self.n_runs,
            "U": self.U,
            "V": self.V,
            "T": self.T,
            "epsilon": self.epsilon,
            "weight_kind": self.weight_kind,
            "grid_count": self.grid_count,
            "bandwidth_c": self.bandwidth_c,
            "modulus_floor": self.modulus_floor,
            "base_seed": self.base_seed,
            "with_em": self.with_em,
            "x_lo": self.x_lo,
            "x_hi": self.x_hi,
            "x_count": self.x_count,
        }
        return d

    @classmethod
    def from_dict(cls, d: dict, **overrides) -> "StudyConfig":
        d = dict(d)
        d.update(overrides)
        d["model"] = model_from_dict(d["model"]) if isinstance(d["model"], dict) else d["model"]
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown study config keys: {sorted(extra)}")
        return cls(**d)


@dataclass
class StudyReport:
    config: StudyConfig
    records: List[dict]
    summary: dict
    timings: List[dict] = field(default_factory=list)


def derive_run_seed(base_seed: int, n: int, run_id: int) -> int:
    """Collision-free 128-bit Philox key for the (n, run_id) replication."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(n), int(run_id)))
    lo, hi = ss.generate_state(2, dtype=np.uint64)
    return (int(hi) << 64) | int(lo)


# ------------------------- per-run worker -------------------------

def _execute_run(config_dict: dict, n: int, run_id: int,
                 oracle_vals: Optional[np.ndarray]) -> dict:
    """One replication; returns a flat JSON-safe record."""
    model = model_from_dict(config_dict["model"])
    seed = derive_run_seed(config_dict["base_seed"], n, run_id)
    record: dict = {
        "n": int(n), "run_id": int(run_id), "seed": seed,
        "error": None, "error_message": None,
        "gamma_star": None, "sigma2": None, "lambda_star": None, "p_hat": None,
        "sigma2_raw": None, "lambda_star_raw": None, "min_modulus": None,
        "l2_plus": None, "l2_raw": None,
        "l2_plus_oracle": None, "l2_raw_oracle": None,
        "decon_error": None, "em": None,
    }
    sample = sample_model(model, n, seed)
    truth = exact_triplet(model)

    triplet = None
    try:
        triplet = estimate_triplet(
            sample,
            build_base_weight(config_dict["epsilon"], config_dict["weight_kind"]),
            U=config_dict["U"], V=config_dict["V"],
            grid_count=config_dict["grid_count"],
            modulus_floor=config_dict["modulus_floor"],
        )
        record.update(
            gamma_star=triplet.gamma_star, sigma2=triplet.sigma2,
            lambda_star=triplet.lambda_star, p_hat=triplet.p_hat,
            sigma2_raw=triplet.sigma2_raw, lambda_star_raw=triplet.lambda_star_raw,
            min_modulus=triplet.diagnostics.min_modulus,
        )
    except QidInferError as exc:
        record["error"] = type(exc).__name__
        record["error_message"] = str(exc)

    if oracle_vals is not None:
        x_grid = UniformGrid(config_dict["x_lo"], config_dict["x_hi"],
                             config_dict["x_count"])
        oracle = DensityCurve(x_grid, oracle_vals)
        h = bandwidth_rule(n, config_dict["bandwidth_c"])
        g_hat = kde(sample, KernelSpec(), h, x_grid)

        g_raw_oracle = decontaminate(g_hat, truth.p, truth.sigma2)
        record["l2_raw_oracle"] = l2_distance(g_raw_oracle, oracle)
        record["l2_plus_oracle"] = l2_distance(positive_part(g_raw_oracle), oracle)

        if triplet is not None:
            try:
                g_raw = decontaminate(g_hat, triplet.p_hat, triplet.sigma2)
                record["l2_raw"] = l2_distance(g_raw, oracle)
                record["l2_plus"] = l2_distance(positive_part(g_raw), oracle)
            except (QidInferError, ValueError) as exc:
                record["decon_error"] = type(exc).__name__

    if config_dict["with_em"] and isinstance(model, TwoNormalMixture):
        res = em_fit(sample, EmConfig())
        steps = np.diff(res.loglik_trace) if res.iterations > 1 else np.array([0.0])
        record["em"] = {
            "p_hat": res.p_hat,
            "sigma1_sq_hat": res.sigma1_sq_hat,
            "sigma2_sq_hat": res.sigma2_sq_hat,
            "iterations": res.iterations,
            "converged": res.converged,
            "loglik_final": float(res.loglik_trace[-1]),
            "loglik_monotone": bool(np.all(steps >= -1e-10)),
            "min_loglik_step": float(np.min(steps)),
        }
    return record


def _timed_run(args):
    config_dict, n, run_id, oracle_vals = args
    t0 = time.perf_counter()
    record = _execute_run(config_dict, n, run_id, oracle_vals)
    elapsed = time.perf_counter() - t0
    return record, {"n": int(n), "run_id": int(run_id), "wall_time": elapsed}


# ------------------------- summaries -------------------------

def _quantiles(values: List[float]) -> Optional[dict]:
    if not values:
        return None
    q25, q50, q75 = (float(q) for q in np.quantile(np.asarray(values), [0.25, 0.5, 0.75]))
    return {"q25": q25, "q50": q50, "q75": q75}


def summarize_records(records: List[dict], model: ModelSpec) -> dict:
    """Per-n quantiles of the estimation errors; pure function of the records."""
    truth = exact_triplet(model)
    per_n: dict = {}
    for n in sorted({r["n"] for r in records}):
        subset = [r for r in records if r["n"] == n]
        ok = [r for r in subset if r["error"] is None]
        p_err = [abs(r["p_hat"] - truth.p) for r in ok]
        s_err = [abs(r["sigma2"] - truth.sigma2) for r in ok]
        g_err = [abs(r["gamma_star"] - truth.gamma_star) for r in ok]
        lam_err = [abs(r["lambda_star"] - truth.lambda_star) for r in ok]
        l2_plus = [r["l2_plus"] for r in subset if r["l2_plus"] is not None]
        l2_plus_oracle = [r["l2_plus_oracle"] for r in subset
                          if r["l2_plus_oracle"] is not None]
        em_p_err = [abs(r["em"]["p_hat"] - truth.p) for r in subset if r["em"]]
        entry = {
            "runs": len(subset),
            "failed": len(subset) - len(ok),
            "p_err": _quantiles(p_err),
            "sigma2_err": _quantiles(s_err),
            "gamma_err": _quantiles(g_err),
            "lambda_err": _quantiles(lam_err),
            "l2_plus": _quantiles(l2_plus),
            "l2_plus_oracle": _quantiles(l2_plus_oracle),
            "em_p_err": _quantiles(em_p_err),
        }
        if entry["l2_plus"] and entry["l2_plus_oracle"] \
                and entry["l2_plus_oracle"]["q50"] > 0:
            entry["full_vs_ablation_ratio"] = (
                entry["l2_plus"]["q50"] / entry["l2_plus_oracle"]["q50"])
        else:
            entry["full_vs_ablation_ratio"] = None
        per_n[str(n)] = entry
    return per_n


# ------------------------- the study driver -------------------------

def _oracle_curve_values(config: StudyConfig) -> Optional[np.ndarray]:
    try:
        grid = UniformGrid(config.x_lo, config.x_hi, config.x_count)
        return exact_g_circ(config.model, grid).values
    except QidInferError:
        return None  # no contaminant component (pure normal)


def run_study(config: StudyConfig) -> StudyReport:
    """Execute all (n, run) replications; deterministic given the config."""
    config_dict = config.to_dict()
    oracle_vals = _oracle_curve_values(config)
    tasks = [(config_dict, n, run_id, oracle_vals)
             for n in config.n_values for run_id in range(config.n_runs)]

    if config.workers <= 1:
        outcomes = [_timed_run(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_timed_run, tasks, chunksize=4))

    records = [rec for rec, _ in outcomes]
    timings = [t for _, t in outcomes]
    records.sort(key=lambda r: (r["n"], r["run_id"]))
    timings.sort(key=lambda t: (t["n"], t["run_id"]))

    summary = {
        "config": config_dict,
        "per_n": summarize_records(records, config.model),
    }
    report = StudyReport(config=config, records=records, summary=summary,
                         timings=timings)
    if config.outputs is not None:
        write_report(report, config.outputs)
    return report


def write_report(report: StudyReport, outdir) -> Path:
    """Persist report.ndjson / summary.json / config.json (+ timings.json).

    The first three are canonical and byte-reproducible; timings.json holds
    wall-clock times and is excluded from determinism comparisons.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "report.ndjson", "w") as fh:
        for rec in report.records:
            fh.write(json.dumps(rec, sort_keys=True, separators=(",", ":")))
            fh.write("\n")
    with open(out / "summary.json", "w") as fh:
        json.dump(report.summary, fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out / "config.json", "w") as fh:
        json.dump(report.config.to_dict(), fh, sort_keys=True, indent=2)
        fh.write("\n")
    with open(out / "timings.json", "w") as fh:
        json.dump(report.timings, fh, indent=2)
        fh.write("\n")
    return out


def load_report(outdir) -> StudyReport:
    out = Path(outdir)
    with open(out / "config.json") as fh:
        config = StudyConfig.from_dict(json.load(fh))
    with open(out / "report.ndjson") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    with open(out / "summary.json") as fh:
        summary = json.load(fh)
    return StudyReport(config=config, records=records, summary=summary)
