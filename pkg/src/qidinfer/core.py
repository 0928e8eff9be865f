"""Shared numeric primitives: uniform grids, trapezoid quadrature, the
Epanechnikov kernel and the bandwidth rule.

Everything downstream (characteristic functions, weight families, Fourier
inversion, KDE) is built on endpoint-inclusive uniform grids and plain
trapezoid quadrature; the integrands are smooth on the truncated domains, so
determinism and testability win over higher-order schemes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import EmptySample, GridMismatch, LengthMismatch, NonPositiveN

__all__ = [
    "UniformGrid",
    "Sample",
    "KernelSpec",
    "DensityCurve",
    "trapezoid_integrate",
    "trapezoid_weights",
    "epanechnikov",
    "bandwidth_rule",
    "l2_distance",
]


@dataclass(frozen=True)
class UniformGrid:
    """Endpoint-inclusive uniform grid with ``count`` nodes on [start, stop]."""

    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError(f"grid needs at least 2 nodes, got {self.count}")
        if not self.stop > self.start:
            raise ValueError(f"need stop > start, got [{self.start}, {self.stop}]")

    @property
    def spacing(self) -> float:
        return (self.stop - self.start) / (self.count - 1)

    @property
    def values(self) -> np.ndarray:
        return self.start + self.spacing * np.arange(self.count)

    def __len__(self) -> int:
        return self.count


@dataclass(frozen=True)
class Sample:
    """A finite sequence of real observations with provenance."""

    values: np.ndarray
    seed: Optional[int] = None
    model_tag: Optional[str] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1:
            raise ValueError("sample values must be one-dimensional")
        if vals.size and not np.all(np.isfinite(vals)):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def require_nonempty(self) -> None:
        if self.n == 0:
            raise EmptySample("operation needs a non-empty sample")


@dataclass(frozen=True)
class KernelSpec:
    """Smoothing kernel; only the Epanechnikov kernel is supported."""

    kind: str = "epanechnikov"
    support_radius: float = 1.0

    def __post_init__(self):
        if self.kind != "epanechnikov":
            raise ValueError(f"unsupported kernel kind {self.kind!r}")


@dataclass(frozen=True)
class DensityCurve:
    """Real function values on a uniform x-grid."""

    x_grid: UniformGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.x_grid.count,):
            raise LengthMismatch(
                f"curve has {vals.shape} values for a {self.x_grid.count}-node grid"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve contains non-finite values")
        object.__setattr__(self, "values", vals)


def trapezoid_integrate(f_values: Sequence, grid: UniformGrid):
    """Trapezoid-rule integral of nodal values over the grid.

    Exact for affine integrands; linear in ``f_values``; preserves the dtype
    (complex in, complex out).
    """
    f = np.asarray(f_values)
    if f.shape != (grid.count,):
        raise LengthMismatch(f"{f.shape[0] if f.ndim else 0} values for {grid.count} nodes")
    # span * weighted mean rather than dx * weighted sum: constants come out
    # exact even when the spacing is not representable
    s = 0.5 * (f[0] + f[-1]) + f[1:-1].sum()
    out = s * (grid.stop - grid.start) / (grid.count - 1)
    return complex(out) if np.iscomplexobj(f) else float(out)


def trapezoid_weights(grid: UniformGrid) -> np.ndarray:
    """Quadrature weights c_k with sum(c_k * f_k) == trapezoid integral."""
    c = np.full(grid.count, grid.spacing)
    c[0] *= 0.5
    c[-1] *= 0.5
    return c


def epanechnikov(u):
    """K(u) = (3/4)(1 - u^2) on |u| <= 1, zero outside."""
    u = np.asarray(u, dtype=float)
    out = np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)
    return float(out) if out.ndim == 0 else out


def bandwidth_rule(n: int, c: float = 1.0 / 30.0) -> float:
    """h = c * n^(-1/5); the constant defaults to 1/30."""
    if n < 1:
        raise NonPositiveN(f"sample size must be >= 1, got {n}")
    if c <= 0:
        raise ValueError(f"bandwidth constant must be positive, got {c}")
    return c * float(n) ** (-0.2)


def l2_distance(a: DensityCurve, b: DensityCurve) -> float:
    """sqrt of the trapezoid approximation of the integral of (a - b)^2.

    Both curves must live on the same grid. The squared differences are
    formed node-wise before summation, which keeps the positive-part
    dominance inequality exact in floating point.
    """
    if a.x_grid != b.x_grid:
        raise GridMismatch("curves live on different grids")
    diff = a.values - b.values
    return float(np.sqrt(np.trapezoid(diff * diff, dx=a.x_grid.spacing)))
