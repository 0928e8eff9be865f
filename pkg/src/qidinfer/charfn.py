"""Characteristic functions on a frequency grid.

Covers the empirical characteristic function, exact characteristic functions
of the simulation models, the distinguished (continuous-branch) logarithm
anchored at u = 0, and the diagnostics used to judge whether the empirical
curve can be trusted up to the chosen cutoff.

Phase unwrapping uses adjacent-node increments taken in (-pi, pi]; the
default grid density (4096 nodes per [0, U] segment) keeps the per-step
phase change far below pi for every supported model, so the unwrapped branch
is the continuous one.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .core import Sample, UniformGrid
from .errors import (EmptySample, GridMismatch, LengthMismatch, MissingAnchor,
                     NearZeroModulus, UnsupportedModel)
from .models import (ModelSpec, PureNormal, UnsupportedSpec, contaminant_cf,
                     main_variance, main_weight)

__all__ = [
    "ComplexSeries",
    "LogCfSeries",
    "CfDiagnostics",
    "HValidity",
    "ecf_on_grid",
    "distinguished_log",
    "exact_cf",
    "exact_log_cf",
    "event_diagnostics",
    "h_validity_check",
    "complex_series_to_csv",
]


@dataclass(frozen=True)
class ComplexSeries:
    """Complex values on a uniform frequency grid."""

    grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.count,):
            raise LengthMismatch(
                f"series has {vals.shape} values for a {self.grid.count}-node grid")
        if not np.all(np.isfinite(vals)):
            raise ValueError("series contains non-finite values")
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class LogCfSeries:
    """Distinguished logarithm: log-modulus plus the continuous argument."""

    grid: UniformGrid
    real_part: np.ndarray = field(repr=False)
    imag_part: np.ndarray = field(repr=False)

    def __post_init__(self):
        re = np.asarray(self.real_part, dtype=float)
        im = np.asarray(self.imag_part, dtype=float)
        if re.shape != (self.grid.count,) or im.shape != (self.grid.count,):
            raise LengthMismatch("log-cf parts do not match the grid")
        object.__setattr__(self, "real_part", re)
        object.__setattr__(self, "imag_part", im)


@dataclass(frozen=True)
class CfDiagnostics:
    min_modulus: float
    u_max: float
    max_relative_deviation: Optional[float] = None


@dataclass(frozen=True)
class HValidity:
    """Necessary-condition check for H(u) being a characteristic function."""

    max_abs_H: float
    H_at_zero: complex
    passes_necessary: bool


def ecf_on_grid(sample: Sample, grid: UniformGrid) -> ComplexSeries:
    """phi_n(u_k) = (1/n) sum_j exp(i u_k X_j); exactly 1 at u = 0."""
    sample.require_nonempty()
    sums = _kernels.ecf_sums(sample.values, grid.start, grid.spacing, grid.count)
    return ComplexSeries(grid, sums / sample.n)


def distinguished_log(cf: ComplexSeries, modulus_floor: float = 1e-6) -> LogCfSeries:
    """Continuous branch of log(cf), anchored to 0 at u = 0.

    Raises NearZeroModulus as soon as any node modulus falls to the floor:
    a silent clamp would bias the variance estimate invisibly, so a small
    modulus is an error, not a value.
    """
    u = cf.grid.values
    anchor = np.flatnonzero(u == 0.0)
    if anchor.size == 0:
        raise MissingAnchor("frequency grid must contain u = 0")
    modulus = np.abs(cf.values)
    k = int(np.argmin(modulus))
    if modulus[k] <= modulus_floor:
        raise NearZeroModulus(u[k], modulus[k], modulus_floor)
    phase = np.unwrap(np.angle(cf.values))
    phase = phase - phase[anchor[0]]
    return LogCfSeries(cf.grid, np.log(modulus), phase)


def exact_cf(model: ModelSpec, grid: UniformGrid) -> ComplexSeries:
    """Closed-form characteristic function of a simulation model."""
    u = grid.values
    if isinstance(model, PureNormal):
        vals = np.exp(-0.5 * model.sigma_sq * u ** 2) + 0j
        return ComplexSeries(grid, vals)
    try:
        circ = contaminant_cf(model, u)
    except UnsupportedSpec as exc:
        raise UnsupportedModel(str(exc)) from None
    p = main_weight(model)
    main = np.exp(-0.5 * main_variance(model) * u ** 2)
    return ComplexSeries(grid, p * main + (1.0 - p) * circ)


def exact_log_cf(model: ModelSpec, grid: UniformGrid,
                 modulus_floor: float = 1e-300) -> LogCfSeries:
    """Distinguished log of the exact cf (noiseless pipeline input)."""
    return distinguished_log(exact_cf(model, grid), modulus_floor=modulus_floor)


def event_diagnostics(ecf: ComplexSeries,
                      exact: Optional[ComplexSeries] = None) -> CfDiagnostics:
    """Minimum modulus over the grid and, when the exact cf is available
    (simulation only), the sup of |phi_n - phi| / |phi|."""
    max_rel = None
    if exact is not None:
        if exact.grid != ecf.grid:
            raise GridMismatch("empirical and exact series use different grids")
        max_rel = float(np.max(np.abs(ecf.values - exact.values) / np.abs(exact.values)))
    return CfDiagnostics(
        min_modulus=float(np.min(np.abs(ecf.values))),
        u_max=float(ecf.grid.stop),
        max_relative_deviation=max_rel,
    )


def h_validity_check(phi_circ: ComplexSeries, sigma2: float,
                     tol: float = 1e-9) -> HValidity:
    """Necessary conditions for H(u) = phi_circ(u) exp(u^2 sigma2 / 2) to
    be a characteristic function: |H| <= 1 everywhere and H(0) = 1.

    Full positive-definiteness is not checked (ill-posed on a grid); a pass
    here is necessary, not sufficient.
    """
    if sigma2 < 0:
        raise ValueError(f"sigma2 must be non-negative, got {sigma2}")
    u = phi_circ.grid.values
    h = phi_circ.values * np.exp(0.5 * sigma2 * u ** 2)
    max_abs = float(np.max(np.abs(h)))
    anchor = np.flatnonzero(u == 0.0)
    at_zero = complex(h[anchor[0]]) if anchor.size else complex(h[int(np.argmin(np.abs(u)))])
    passes = max_abs <= 1.0 + tol and abs(at_zero - 1.0) <= tol
    return HValidity(max_abs_H=max_abs, H_at_zero=at_zero, passes_necessary=bool(passes))


def complex_series_to_csv(series: ComplexSeries, path) -> None:
    """CSV with columns u, re, im."""
    u = series.grid.values
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["u", "re", "im"])
        for k in range(series.grid.count):
            writer.writerow([repr(float(u[k])),
                             repr(float(series.values[k].real)),
                             repr(float(series.values[k].imag))])
