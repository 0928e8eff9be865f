"""Static figure emission from stored study reports.

Plot emission is deliberately decoupled from compute: it reads a persisted
report (plus light recomputation for the curve overlays, which is cheap and
seeded) and writes self-contained SVG files next to the underlying CSV data.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .charfn import distinguished_log, ecf_on_grid, exact_log_cf  # noqa: E402
from .core import KernelSpec, UniformGrid, bandwidth_rule  # noqa: E402
from .errors import EmptyReport, QidInferError  # noqa: E402
from .mixture import decontaminate, kde, positive_part  # noqa: E402
from .models import exact_g_circ, sample_model  # noqa: E402
from .study import StudyReport  # noqa: E402

__all__ = ["PLOT_KINDS", "emit_plots"]

PLOT_KINDS = ("boxplot", "density-overlay", "cf-overlay")


def _write_csv(path: Path, header: List[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _boxplots(report: StudyReport, out: Path) -> List[Path]:
    records = [r for r in report.records if r["error"] is None]
    n_values = sorted({r["n"] for r in records})
    has_em = any(r["em"] for r in records)
    made = []
    for key, em_key, label in (("p_hat", "p_hat", "normal component weight"),
                               ("sigma2", "sigma1_sq_hat", "normal component variance")):
        fig, ax = plt.subplots(figsize=(6, 4))
        data, positions, colors = [], [], []
        for i, n in enumerate(n_values):
            ours = [r[key] for r in records if r["n"] == n]
            data.append(ours)
            positions.append(i * (3 if has_em else 1.5) + 1)
            colors.append("tab:green")
            if has_em:
                ems = [r["em"][em_key] for r in records if r["n"] == n and r["em"]]
                data.append(ems)
                positions.append(i * 3 + 2)
                colors.append("tab:blue")
        boxes = ax.boxplot(data, positions=positions, widths=0.7, patch_artist=True)
        for patch, color in zip(boxes["boxes"], colors):
            patch.set_facecolor(color)
        step = 3 if has_em else 1.5
        ax.set_xticks([i * step + (1.5 if has_em else 1) for i in range(len(n_values))])
        ax.set_xticklabels([str(n) for n in n_values])
        ax.set_xlabel("sample size n")
        ax.set_ylabel(label)
        if has_em:
            ax.set_title("spectral (green) vs EM (blue)")
        fig.tight_layout()
        path = out / f"boxplot_{key}.svg"
        fig.savefig(path)
        plt.close(fig)
        made.append(path)
        _write_csv(out / f"boxplot_{key}.csv", ["n", "estimate", "em_estimate"],
                   [[r["n"], r[key], r["em"][em_key] if r["em"] else ""]
                    for r in records])
    return made


def _density_overlays(report: StudyReport, out: Path) -> List[Path]:
    cfg = report.config
    grid = UniformGrid(cfg.x_lo, cfg.x_hi, cfg.x_count)
    oracle = exact_g_circ(cfg.model, grid)
    made = []
    for n in sorted({r["n"] for r in report.records}):
        rec = next((r for r in report.records
                    if r["n"] == n and r["error"] is None and r["p_hat"] is not None), None)
        if rec is None:
            continue
        sample = sample_model(cfg.model, n, rec["seed"])
        h = bandwidth_rule(n, cfg.bandwidth_c)
        g_hat = kde(sample, KernelSpec(), h, grid)
        try:
            curve = positive_part(decontaminate(g_hat, rec["p_hat"], rec["sigma2"]))
        except (QidInferError, ValueError):
            continue
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(grid.values, oracle.values, color="tab:orange", label="true contaminant")
        ax.plot(grid.values, curve.values, color="tab:green", label="estimate")
        ax.set_xlabel("x")
        ax.set_ylabel("density")
        ax.set_title(f"n = {n}")
        ax.legend()
        fig.tight_layout()
        path = out / f"density_overlay_n{n}.svg"
        fig.savefig(path)
        plt.close(fig)
        made.append(path)
        _write_csv(out / f"density_overlay_n{n}.csv", ["x", "true", "estimate"],
                   zip(grid.values, oracle.values, curve.values))
    return made


def _cf_overlay(report: StudyReport, out: Path, n_curves: int = 20) -> List[Path]:
    cfg = report.config
    n = min(r["n"] for r in report.records)
    u_max = max(cfg.U, cfg.V)
    grid = UniformGrid(0.0, u_max, 1024)
    exact = exact_log_cf(cfg.model, grid)
    fig, ax = plt.subplots(figsize=(6, 4))
    rows = [list(grid.values), list(exact.real_part)]
    shown = 0
    for rec in report.records:
        if rec["n"] != n or shown >= n_curves:
            continue
        sample = sample_model(cfg.model, n, rec["seed"])
        try:
            logcf = distinguished_log(ecf_on_grid(sample, grid),
                                      modulus_floor=cfg.modulus_floor)
        except QidInferError:
            continue
        ax.plot(grid.values, logcf.real_part, color="0.7", linewidth=0.7)
        rows.append(list(logcf.real_part))
        shown += 1
    ax.plot(grid.values, exact.real_part, color="tab:orange", linewidth=1.8,
            label="exact")
    ax.set_xlabel("u")
    ax.set_ylabel("Re log cf")
    ax.set_title(f"{shown} empirical realizations, n = {n}")
    ax.legend()
    fig.tight_layout()
    path = out / "cf_overlay.svg"
    fig.savefig(path)
    plt.close(fig)
    _write_csv(out / "cf_overlay.csv",
               ["u", "exact"] + [f"run{i}" for i in range(shown)],
               zip(*rows))
    return [path]


def emit_plots(report: StudyReport, kind: str, out_dir) -> List[Path]:
    """Write the figures of the requested kind; returns the created paths."""
    if not report.records:
        raise EmptyReport("study report holds no records")
    if kind not in PLOT_KINDS:
        raise ValueError(f"kind must be one of {PLOT_KINDS}, got {kind!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if kind == "boxplot":
        return _boxplots(report, out)
    if kind == "density-overlay":
        return _density_overlays(report, out)
    return _cf_overlay(report, out)
