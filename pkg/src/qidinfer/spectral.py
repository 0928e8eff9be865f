"""The four-step spectral pipeline.

1. Empirical characteristic function on a uniform frequency grid.
2. Weighted least squares on Re log(cf_n) over [eps U, U] -> (sigma2, lambda*).
3. Weighted least squares on Im log(cf_n) over [eps V, V] -> gamma*.
4. Tapered inverse Fourier transform of

       psi(u) = log(cf_n(u)) - i gamma* u + sigma2 u^2/2 + lambda*

   which estimates the signed jump density s with integral lambda*.

One ECF evaluation on [0, max(U, V, T)] serves all steps; band selection is
by weight support, never by interpolation. The inversion exploits Hermitian
symmetry of psi (real samples), so only the half-axis [0, T] is integrated:

    s_n(x) = (1/pi) * int_0^T Re[ exp(-iux) psi(u) w_s(u/T) ] du.

The taper w_s is a flat-top cosine: identically 1 on |v| <= a and a cosine
roll-off to 0 at |v| = 1. It is even, continuous, supported on [-1, 1] and
has w_s(0) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .charfn import (CfDiagnostics, LogCfSeries, distinguished_log, ecf_on_grid,
                     event_diagnostics)
from .core import DensityCurve, Sample, UniformGrid, trapezoid_weights
from .errors import BadCutoff
from .weights import (BaseWeight, build_base_weight, gamma_normal_equation,
                      sigma_lambda_normal_equations)

__all__ = [
    "TripletEstimate",
    "InversionConfig",
    "PipelineConfig",
    "PipelineResult",
    "flat_top_taper",
    "estimate_triplet",
    "invert_log_cf",
    "estimate_jump_density",
    "full_pipeline",
    "density_curve_to_csv",
]

DEFAULT_GRID_COUNT = 4096
DEFAULT_MODULUS_FLOOR = 1e-6


@dataclass(frozen=True)
class TripletEstimate:
    """Estimated triplet with clamped values, raw values and provenance."""

    gamma_star: float
    sigma2: float
    lambda_star: float
    p_hat: float
    sigma2_raw: float
    lambda_star_raw: float
    diagnostics: CfDiagnostics
    U: float
    V: float
    epsilon: float
    weight_kind: str
    grid_count: int
    T: Optional[float] = None
    n: Optional[int] = None
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        return {
            "gamma_star": self.gamma_star,
            "sigma2": self.sigma2,
            "lambda_star": self.lambda_star,
            "p_hat": self.p_hat,
            "sigma2_raw": self.sigma2_raw,
            "lambda_star_raw": self.lambda_star_raw,
            "min_modulus": self.diagnostics.min_modulus,
            "U": self.U,
            "V": self.V,
            "epsilon": self.epsilon,
            "weight_kind": self.weight_kind,
            "grid_count": self.grid_count,
            "T": self.T,
            "n": self.n,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class InversionConfig:
    """Cutoff, taper shape and output grid for the density inversion."""

    T: float
    x_grid: UniformGrid
    taper_flat_fraction: float = 0.8

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"cutoff must be positive, got {self.T}")
        if not 0.0 < self.taper_flat_fraction < 1.0:
            raise ValueError("taper flat fraction must lie in (0, 1)")


def flat_top_taper(v, flat_fraction: float = 0.8) -> np.ndarray:
    """1 on |v| <= a, cosine roll-off on a < |v| <= 1, 0 outside."""
    v = np.abs(np.asarray(v, dtype=float))
    a = flat_fraction
    out = np.zeros_like(v)
    out[v <= a] = 1.0
    roll = (v > a) & (v <= 1.0)
    out[roll] = 0.5 * (1.0 + np.cos(math.pi * (v[roll] - a) / (1.0 - a)))
    return out


def _clamped_triplet(sigma2_raw: float, lambda_raw: float, gamma: float,
                     diagnostics: CfDiagnostics, w: BaseWeight, U: float, V: float,
                     grid_count: int, sample: Optional[Sample]) -> TripletEstimate:
    sigma2 = max(sigma2_raw, 0.0)
    lam = max(lambda_raw, 0.0)
    return TripletEstimate(
        gamma_star=float(gamma),
        sigma2=float(sigma2),
        lambda_star=float(lam),
        p_hat=float(math.exp(-lam)),
        sigma2_raw=float(sigma2_raw),
        lambda_star_raw=float(lambda_raw),
        diagnostics=diagnostics,
        U=float(U),
        V=float(V),
        epsilon=w.epsilon,
        weight_kind=w.kind,
        grid_count=int(grid_count),
        n=None if sample is None else sample.n,
        seed=None if sample is None else sample.seed,
    )


def triplet_from_log_cf(logcf: LogCfSeries, w: BaseWeight, U: float, V: float,
                        diagnostics: Optional[CfDiagnostics] = None) -> TripletEstimate:
    """Steps 2-3 on an already-computed distinguished logarithm."""
    sigma2_raw, lambda_raw = sigma_lambda_normal_equations(logcf, w, U)
    gamma = gamma_normal_equation(logcf, w, V)
    if diagnostics is None:
        diagnostics = CfDiagnostics(min_modulus=float(np.exp(np.min(logcf.real_part))),
                                    u_max=float(logcf.grid.stop))
    return _clamped_triplet(sigma2_raw, lambda_raw, gamma, diagnostics,
                            w, U, V, logcf.grid.count, None)


def estimate_triplet(sample: Sample, w: BaseWeight, U: float, V: float,
                     grid_count: int = DEFAULT_GRID_COUNT,
                     modulus_floor: float = DEFAULT_MODULUS_FLOOR) -> TripletEstimate:
    """Steps 1-3 plus the plug-in p_hat = exp(-lambda*_n)."""
    sample.require_nonempty()
    grid = UniformGrid(0.0, max(U, V), grid_count)
    ecf = ecf_on_grid(sample, grid)
    logcf = distinguished_log(ecf, modulus_floor=modulus_floor)
    sigma2_raw, lambda_raw = sigma_lambda_normal_equations(logcf, w, U)
    gamma = gamma_normal_equation(logcf, w, V)
    return _clamped_triplet(sigma2_raw, lambda_raw, gamma,
                            event_diagnostics(ecf), w, U, V, grid_count, sample)


def invert_log_cf(logcf: LogCfSeries, gamma_star: float, sigma2: float,
                  lambda_star: float, inv: InversionConfig) -> DensityCurve:
    """Step 4 on an already-computed distinguished logarithm.

    The frequency grid must start at 0 and reach the cutoff; the taper
    vanishes beyond T, so a longer grid integrates the same function.
    """
    grid = logcf.grid
    if inv.T > grid.stop * (1.0 + 1e-12):
        raise BadCutoff(f"cutoff T={inv.T:g} exceeds the grid maximum {grid.stop:g}")
    u = grid.values
    psi_re = logcf.real_part + 0.5 * sigma2 * u * u + lambda_star
    psi_im = logcf.imag_part - gamma_star * u
    taper = flat_top_taper(u / inv.T, inv.taper_flat_fraction)
    coeff = trapezoid_weights(grid) * taper * (psi_re + 1j * psi_im)
    vals = _kernels.fourier_cos_sin(grid.start, grid.spacing, coeff,
                                    inv.x_grid.values) / math.pi
    return DensityCurve(inv.x_grid, vals)


def estimate_jump_density(sample: Sample, triplet: TripletEstimate,
                          inv: InversionConfig,
                          grid_count: int = DEFAULT_GRID_COUNT,
                          modulus_floor: float = DEFAULT_MODULUS_FLOOR) -> DensityCurve:
    """Step 4 from scratch: re-evaluates the ECF up to the cutoff."""
    trusted = max(triplet.U, triplet.V)
    if inv.T > trusted * (1.0 + 1e-12):
        raise BadCutoff(f"cutoff T={inv.T:g} exceeds the trusted band {trusted:g}")
    sample.require_nonempty()
    grid = UniformGrid(0.0, inv.T, grid_count)
    logcf = distinguished_log(ecf_on_grid(sample, grid), modulus_floor=modulus_floor)
    return invert_log_cf(logcf, triplet.gamma_star, triplet.sigma2,
                         triplet.lambda_star, inv)


@dataclass(frozen=True)
class PipelineConfig:
    """Estimator knobs shared by the CLI and the study harness."""

    U: float = 8.0
    V: float = 8.0
    T: Optional[float] = None  # None -> U
    epsilon: float = 0.5
    weight_kind: str = "indicator"
    grid_count: int = DEFAULT_GRID_COUNT
    taper_flat_fraction: float = 0.8
    modulus_floor: float = DEFAULT_MODULUS_FLOOR
    x_lo: float = -10.0
    x_hi: float = 10.0
    x_count: int = 2001

    @property
    def cutoff(self) -> float:
        return self.U if self.T is None else self.T

    def x_grid(self) -> UniformGrid:
        return UniformGrid(self.x_lo, self.x_hi, self.x_count)

    def inversion(self) -> InversionConfig:
        return InversionConfig(T=self.cutoff, x_grid=self.x_grid(),
                               taper_flat_fraction=self.taper_flat_fraction)


@dataclass(frozen=True)
class PipelineResult:
    triplet: TripletEstimate
    s: DensityCurve


def full_pipeline(sample: Sample, config: PipelineConfig) -> PipelineResult:
    """All four steps with a single shared ECF evaluation."""
    sample.require_nonempty()
    cutoff = config.cutoff
    if cutoff > max(config.U, config.V) * (1.0 + 1e-12):
        raise BadCutoff(f"cutoff T={cutoff:g} exceeds the trusted band "
                        f"{max(config.U, config.V):g}")
    grid = UniformGrid(0.0, max(config.U, config.V, cutoff), config.grid_count)
    ecf = ecf_on_grid(sample, grid)
    logcf = distinguished_log(ecf, modulus_floor=config.modulus_floor)
    w = build_base_weight(config.epsilon, config.weight_kind)
    sigma2_raw, lambda_raw = sigma_lambda_normal_equations(logcf, w, config.U)
    gamma = gamma_normal_equation(logcf, w, config.V)
    triplet = _clamped_triplet(sigma2_raw, lambda_raw, gamma,
                               event_diagnostics(ecf), w, config.U, config.V,
                               config.grid_count, sample)
    triplet = replace(triplet, T=cutoff)
    s = invert_log_cf(logcf, triplet.gamma_star, triplet.sigma2,
                      triplet.lambda_star, config.inversion())
    return PipelineResult(triplet=triplet, s=s)


def density_curve_to_csv(curve: DensityCurve, path) -> None:
    """CSV with columns x, value."""
    import csv

    x = curve.x_grid.values
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "value"])
        for k in range(curve.x_grid.count):
            writer.writerow([repr(float(x[k])), repr(float(curve.values[k]))])
