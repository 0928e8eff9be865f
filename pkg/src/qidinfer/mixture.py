"""Kernel-based decontamination of the Gaussian mixture.

Given estimates (p_hat, sigma2_hat) of the normal component, the contaminant
density is recovered by a linear transform of the kernel density estimate,

    g_circ_n(x) = (g_n(x) - p_hat * normal_pdf(x; sigma2_hat)) / (1 - p_hat),

followed by the positive-part trim max(g_circ_n, 0). The trim never hurts:
against any non-negative target the positive part is node-wise at least as
close, which the study harness records and checks with zero tolerance.

The positive-part estimate is generally not a density (its integral can
differ from 1); following the estimator's definition it is NOT renormalized.
``renormalize`` exists for exploratory use only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core import (DensityCurve, KernelSpec, Sample, UniformGrid,
                   bandwidth_rule, l2_distance)
from .errors import NonPositiveBandwidth, PTooCloseToOne

__all__ = [
    "MixtureEstimate",
    "kde",
    "decontaminate",
    "positive_part",
    "l2_distance",
    "default_x_grid",
    "decompose",
    "renormalize",
]


@dataclass(frozen=True)
class MixtureEstimate:
    """Semiparametric decomposition: parameters plus the estimated curves."""

    p_hat: float
    sigma2_hat: float
    g_hat: DensityCurve
    g_circ_plus: DensityCurve
    h: float


def kde(sample: Sample, kernel: KernelSpec, h: float,
        x_grid: UniformGrid) -> DensityCurve:
    """Kernel density estimate (1/(n h)) sum_j K((X_j - x)/h) on the grid."""
    sample.require_nonempty()
    if not h > 0:
        raise NonPositiveBandwidth(f"bandwidth must be positive, got {h}")
    assert kernel.kind == "epanechnikov"
    x_sorted = np.sort(sample.values)
    vals = _kernels.kde_epanechnikov(x_sorted, h, x_grid.values)
    return DensityCurve(x_grid, vals)


def decontaminate(g_hat: DensityCurve, p_hat: float, sigma2_hat: float,
                  p_ceiling: float = 0.99) -> DensityCurve:
    """Linear removal of the estimated normal component.

    Refuses p_hat >= p_ceiling: the (1 - p_hat)^-1 amplification makes the
    transform numerically meaningless when the normal component explains
    nearly everything.
    """
    if p_hat >= p_ceiling:
        raise PTooCloseToOne(
            f"p_hat={p_hat:g} >= {p_ceiling:g}; contaminant weight too small "
            "to recover")
    if not sigma2_hat > 0:
        raise ValueError(f"sigma2_hat must be positive, got {sigma2_hat}")
    x = g_hat.x_grid.values
    phi = np.exp(-0.5 * x * x / sigma2_hat) / math.sqrt(2.0 * math.pi * sigma2_hat)
    vals = (g_hat.values - p_hat * phi) / (1.0 - p_hat)
    return DensityCurve(g_hat.x_grid, vals)


def positive_part(curve: DensityCurve) -> DensityCurve:
    """Node-wise maximum with zero."""
    return DensityCurve(curve.x_grid, np.maximum(curve.values, 0.0))


def default_x_grid(sample: Sample, sigma_hat: float, h: float,
                   count: int = 2001, pad_factor: float = 4.0) -> UniformGrid:
    """Sample range padded by pad_factor * max(sigma_hat, h)."""
    sample.require_nonempty()
    pad = pad_factor * max(sigma_hat, h)
    lo = float(np.min(sample.values)) - pad
    hi = float(np.max(sample.values)) + pad
    return UniformGrid(lo, hi, count)


def decompose(sample: Sample, p_hat: float, sigma2_hat: float,
              h: Optional[float] = None,
              x_grid: Optional[UniformGrid] = None,
              bandwidth_c: float = 1.0 / 30.0,
              kernel: KernelSpec = KernelSpec()) -> MixtureEstimate:
    """KDE, decontamination and positive part in one call.

    ``p_hat`` and ``sigma2_hat`` normally come from the spectral triplet;
    passing oracle values instead isolates the nonparametric error
    (ablation mode).
    """
    if h is None:
        h = bandwidth_rule(sample.n, bandwidth_c)
    if x_grid is None:
        x_grid = default_x_grid(sample, math.sqrt(max(sigma2_hat, 0.0)), h)
    g_hat = kde(sample, kernel, h, x_grid)
    g_circ = decontaminate(g_hat, p_hat, sigma2_hat)
    return MixtureEstimate(p_hat=float(p_hat), sigma2_hat=float(sigma2_hat),
                           g_hat=g_hat, g_circ_plus=positive_part(g_circ), h=float(h))


def renormalize(curve: DensityCurve) -> DensityCurve:
    """Scale a non-negative curve to unit integral (exploratory only)."""
    total = float(np.trapezoid(curve.values, dx=curve.x_grid.spacing))
    if total <= 0:
        raise ValueError("cannot renormalize a curve with non-positive mass")
    return DensityCurve(curve.x_grid, curve.values / total)
