"""Command-line entry point.

Subcommands
-----------
study     run a seeded Monte-Carlo study from a JSON config file
estimate  run the spectral pipeline on a one-value-per-line CSV
plot      render figures from a stored study report
oracle    write exact characteristic function / density / jump-density
          curves for a model

Fatal errors print a machine-readable ``{"error": ..., "message": ...}``
object to stderr and exit non-zero. QIDINFER_OUTPUT_DIR provides the default
output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import _kernels
from .charfn import complex_series_to_csv, exact_cf
from .core import Sample, UniformGrid, bandwidth_rule
from .errors import ParseError, QidInferError
from .mixture import decompose
from .models import (NuTildeSeriesConfig, exact_density, exact_g_circ,
                     exact_triplet, model_from_dict, nu_tilde_density,
                     nu_tilde_term_count)
from .spectral import PipelineConfig, density_curve_to_csv, full_pipeline
from .study import StudyConfig, load_report, run_study

__all__ = ["main"]


def _default_outdir() -> str:
    return os.environ.get("QIDINFER_OUTPUT_DIR", ".")


def _read_values_csv(path) -> Sample:
    """One real value per line; blank lines are rejected like any non-number."""
    values = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            try:
                values.append(float(text))
            except ValueError:
                raise ParseError(line_no, text) from None
    if len(values) < 10:
        raise QidInferError(f"need at least 10 input values, got {len(values)}")
    return Sample(np.asarray(values))


def _parse_override(text: str):
    key, sep, raw = text.partition("=")
    if not sep:
        raise ValueError(f"override {text!r} is not of the form key=value")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


# ------------------------- subcommands -------------------------

def _cmd_study(args) -> int:
    with open(args.config) as fh:
        config_dict = json.load(fh)
    for item in args.set or []:
        key, value = _parse_override(item)
        config_dict[key] = value
    overrides = {}
    if args.outputs is not None:
        overrides["outputs"] = args.outputs
    elif "outputs" not in config_dict:
        overrides["outputs"] = _default_outdir()
    if args.workers is not None:
        overrides["workers"] = args.workers
    config = StudyConfig.from_dict(config_dict, **overrides)
    report = run_study(config)
    n_failed = sum(1 for r in report.records if r["error"] is not None)
    print(json.dumps({"records": len(report.records), "failed": n_failed,
                      "outputs": str(config.outputs)}, sort_keys=True))
    return 0


def _cmd_estimate(args) -> int:
    sample = _read_values_csv(args.input)
    config = PipelineConfig(
        U=args.u, V=args.v if args.v is not None else args.u,
        T=args.t, epsilon=args.epsilon, weight_kind=args.weight_kind,
        grid_count=args.grid_count, modulus_floor=args.modulus_floor,
        x_lo=args.x_lo, x_hi=args.x_hi, x_count=args.x_count,
    )
    result = full_pipeline(sample, config)
    out = {"triplet": result.triplet.to_dict(), "kernel_backend": _kernels.BACKEND}

    if args.decompose:
        p_hat = args.fix_p if args.fix_p is not None else result.triplet.p_hat
        sigma2_hat = (args.fix_sigma2 if args.fix_sigma2 is not None
                      else result.triplet.sigma2)
        est = decompose(sample, p_hat, sigma2_hat, bandwidth_c=args.bandwidth_c)
        mix = {"p_hat": est.p_hat, "sigma2_hat": est.sigma2_hat, "h": est.h,
               "g_circ_plus_mass": float(np.trapezoid(
                   est.g_circ_plus.values, dx=est.g_circ_plus.x_grid.spacing))}
        if args.curves_out:
            out_dir = Path(args.curves_out)
            out_dir.mkdir(parents=True, exist_ok=True)
            density_curve_to_csv(est.g_hat, out_dir / "g_hat.csv")
            density_curve_to_csv(est.g_circ_plus, out_dir / "g_circ_plus.csv")
            density_curve_to_csv(result.s, out_dir / "jump_density.csv")
            mix["files"] = {"g_hat": str(out_dir / "g_hat.csv"),
                            "g_circ_plus": str(out_dir / "g_circ_plus.csv"),
                            "jump_density": str(out_dir / "jump_density.csv")}
        out["mixture"] = mix
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def _cmd_plot(args) -> int:
    from .plots import emit_plots

    report = load_report(args.report)
    paths = emit_plots(report, args.kind, args.out or _default_outdir())
    print(json.dumps({"files": [str(p) for p in paths]}, sort_keys=True))
    return 0


def _cmd_oracle(args) -> int:
    if args.model_json:
        model = model_from_dict(json.loads(args.model_json))
    else:
        with open(args.model_file) as fh:
            model = model_from_dict(json.load(fh))
    out = Path(args.out or _default_outdir())
    out.mkdir(parents=True, exist_ok=True)

    u_grid = UniformGrid(0.0, args.u_max, args.grid_count)
    x_grid = UniformGrid(args.x_lo, args.x_hi, args.x_count)
    written = {}

    complex_series_to_csv(exact_cf(model, u_grid), out / "exact_cf.csv")
    written["exact_cf"] = str(out / "exact_cf.csv")
    density_curve_to_csv(exact_density(model, x_grid), out / "density.csv")
    written["density"] = str(out / "density.csv")

    truth = exact_triplet(model)
    info = {"gamma_star": truth.gamma_star, "sigma2": truth.sigma2,
            "lambda_star": truth.lambda_star, "p": truth.p}

    try:
        density_curve_to_csv(exact_g_circ(model, x_grid), out / "g_circ.csv")
        written["g_circ"] = str(out / "g_circ.csv")
    except QidInferError:
        pass
    try:
        cfg = NuTildeSeriesConfig()
        density_curve_to_csv(nu_tilde_density(model, x_grid, cfg),
                             out / "nu_tilde.csv")
        written["nu_tilde"] = str(out / "nu_tilde.csv")
        info["nu_tilde_terms"] = nu_tilde_term_count(truth.p, cfg)
    except QidInferError as exc:
        info["nu_tilde_unavailable"] = f"{type(exc).__name__}: {exc}"

    with open(out / "triplet.json", "w") as fh:
        json.dump(info, fh, sort_keys=True, indent=2)
        fh.write("\n")
    written["triplet"] = str(out / "triplet.json")
    print(json.dumps({"files": written}, sort_keys=True, indent=2))
    return 0


# ------------------------- argument parsing -------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qidinfer",
        description="Spectral calibration and mixture decontamination "
                    "for quasi-infinitely divisible laws.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_study = sub.add_parser("study", help="run a Monte-Carlo study")
    p_study.add_argument("--config", required=True, help="JSON study config")
    p_study.add_argument("--set", action="append", metavar="KEY=VALUE",
                         help="override a config key (value parsed as JSON)")
    p_study.add_argument("--outputs", default=None, help="output directory")
    p_study.add_argument("--workers", type=int, default=None)
    p_study.set_defaults(func=_cmd_study)

    p_est = sub.add_parser("estimate", help="estimate from a CSV of values")
    p_est.add_argument("input", help="one real value per line")
    p_est.add_argument("--u", type=float, default=8.0)
    p_est.add_argument("--v", type=float, default=None)
    p_est.add_argument("--t", type=float, default=None)
    p_est.add_argument("--epsilon", type=float, default=0.5)
    p_est.add_argument("--weight-kind", default="indicator",
                       choices=("indicator", "smooth_bump"))
    p_est.add_argument("--grid-count", type=int, default=4096)
    p_est.add_argument("--modulus-floor", type=float, default=1e-6)
    p_est.add_argument("--x-lo", type=float, default=-10.0)
    p_est.add_argument("--x-hi", type=float, default=10.0)
    p_est.add_argument("--x-count", type=int, default=2001)
    p_est.add_argument("--decompose", action="store_true",
                       help="also run the kernel decontamination")
    p_est.add_argument("--fix-p", type=float, default=None,
                       help="inject this p instead of the estimate (ablation)")
    p_est.add_argument("--fix-sigma2", type=float, default=None,
                       help="inject this variance instead of the estimate")
    p_est.add_argument("--bandwidth-c", type=float, default=1.0 / 30.0)
    p_est.add_argument("--curves-out", default=None,
                       help="directory for curve CSVs")
    p_est.set_defaults(func=_cmd_estimate)

    p_plot = sub.add_parser("plot", help="render figures from a report")
    p_plot.add_argument("report", help="study output directory")
    p_plot.add_argument("--kind", required=True,
                        choices=("boxplot", "density-overlay", "cf-overlay"))
    p_plot.add_argument("--out", default=None)
    p_plot.set_defaults(func=_cmd_plot)

    p_or = sub.add_parser("oracle", help="write exact model curves")
    group = p_or.add_mutually_exclusive_group(required=True)
    group.add_argument("--model-file", help="JSON file with a model spec")
    group.add_argument("--model-json", help="inline JSON model spec")
    p_or.add_argument("--u-max", type=float, default=8.0)
    p_or.add_argument("--grid-count", type=int, default=1025)
    p_or.add_argument("--x-lo", type=float, default=-10.0)
    p_or.add_argument("--x-hi", type=float, default=10.0)
    p_or.add_argument("--x-count", type=int, default=2001)
    p_or.add_argument("--out", default=None)
    p_or.set_defaults(func=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QidInferError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
