"""Weight families for the spectral least-squares calibration.

A base weight w lives on [eps, 1] and is rescaled to the band [eps U, U] as
w_U(u) = w(u/U) / U. The variance/mass pair minimizes

    integral over u of  w_U(u) [ y(u) + a u^2/2 + b ]^2 du,

with y = Re log(cf_n), which is a 2x2 linear system in (a, b) built from the
moments m0 = int w_U, m2 = int w_U u^2/2, m4 = int w_U u^4/4. The drift fit
is the one-parameter analogue against Im log(cf_n).

Solving the normal equations is algebraically identical to integrating
against the derived weight families

    w_sigma2(u) = w_U(u) (m2 - (u^2/2) m0) / D,      D = m0 m4 - m2^2,
    w_lambda(u) = w_U(u) ((u^2/2) m2 - m4) / D,
    w_gamma(u)  = u w_V(u) / int w_V u^2,

whose defining moment identities (int w_sigma2 = 0, int (-u^2/2) w_sigma2 = 1,
int (-w_lambda) = 1, int (u^2/2) w_lambda = 0, int u w_gamma = 1) make the
fit exact on any input that is itself of the form -a u^2/2 - b.

All integrals here are the same trapezoid sums the estimators use, so the
identities hold at machine precision by construction and the recovery of
quadratic inputs is exact independent of grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charfn import LogCfSeries
from .core import UniformGrid, trapezoid_weights
from .errors import BadEpsilon, GridTooCoarse, SingularSystem

__all__ = [
    "BaseWeight",
    "WeightMoments",
    "build_base_weight",
    "weight_on_grid",
    "weight_moments",
    "sigma_lambda_normal_equations",
    "gamma_normal_equation",
    "derived_families",
    "derived_weight_identities",
    "sigma2_weight_printed_form",
]

WEIGHT_KINDS = ("indicator", "smooth_bump")

_MIN_BAND_NODES = 16


@dataclass(frozen=True)
class BaseWeight:
    """Non-negative weight supported on [epsilon, 1]."""

    epsilon: float
    kind: str = "indicator"

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise BadEpsilon(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.kind not in WEIGHT_KINDS:
            raise ValueError(f"weight kind must be one of {WEIGHT_KINDS}, got {self.kind!r}")

    def __call__(self, v) -> np.ndarray:
        """Evaluate w on the unit-scale argument v."""
        v = np.asarray(v, dtype=float)
        inside = (v >= self.epsilon) & (v <= 1.0)
        if self.kind == "indicator":
            return inside.astype(float)
        # infinitely smooth bump: exp(-1/(1-t^2)) on the rescaled band
        t = (2.0 * v - (1.0 + self.epsilon)) / (1.0 - self.epsilon)
        out = np.zeros_like(v)
        core = inside & (np.abs(t) < 1.0)
        out[core] = np.exp(-1.0 / (1.0 - t[core] ** 2))
        return out


def build_base_weight(epsilon: float, kind: str = "indicator") -> BaseWeight:
    return BaseWeight(epsilon=epsilon, kind=kind)


@dataclass(frozen=True)
class WeightMoments:
    """m0 = int w, m2 = int w u^2/2, m4 = int w u^4/4, mg = int w u^2."""

    m0: float
    m2: float
    m4: float
    mg: float

    @property
    def det(self) -> float:
        return self.m0 * self.m4 - self.m2 ** 2


def weight_on_grid(w: BaseWeight, U: float, grid: UniformGrid) -> np.ndarray:
    """Band-rescaled weight w_U(u) = w(u/U)/U on the grid nodes."""
    if U <= 0:
        raise ValueError(f"band cutoff must be positive, got {U}")
    return w(grid.values / U) / U


def _check_band(w: BaseWeight, U: float, grid: UniformGrid, wu: np.ndarray) -> None:
    if grid.stop < U * (1.0 - 1e-12) or grid.start > w.epsilon * U * (1.0 + 1e-12):
        raise GridTooCoarse(
            f"grid [{grid.start:g}, {grid.stop:g}] does not cover the band "
            f"[{w.epsilon * U:g}, {U:g}]")
    if int(np.count_nonzero(wu)) < _MIN_BAND_NODES:
        raise GridTooCoarse(
            f"only {np.count_nonzero(wu)} grid nodes carry weight in "
            f"[{w.epsilon * U:g}, {U:g}]; need at least {_MIN_BAND_NODES}")


def weight_moments(w: BaseWeight, U: float, grid: UniformGrid) -> WeightMoments:
    """Trapezoid moments of w_U on the grid the estimator actually uses."""
    u = grid.values
    c = trapezoid_weights(grid)
    wu = weight_on_grid(w, U, grid)
    cw = c * wu
    u2 = u * u
    return WeightMoments(
        m0=float(np.sum(cw)),
        m2=float(np.sum(cw * u2) / 2.0),
        m4=float(np.sum(cw * u2 * u2) / 4.0),
        mg=float(np.sum(cw * u2)),
    )


def sigma_lambda_normal_equations(logcf: LogCfSeries, w: BaseWeight, U: float):
    """Minimizer (sigma2, lambda_star) of the weighted quadratic misfit of
    Re log(cf_n) against -sigma2 u^2/2 - lambda_star over the band [eps U, U].
    """
    grid = logcf.grid
    u = grid.values
    wu = weight_on_grid(w, U, grid)
    _check_band(w, U, grid, wu)
    c = trapezoid_weights(grid)
    cw = c * wu
    u2h = 0.5 * u * u
    m0 = float(np.sum(cw))
    m2 = float(np.sum(cw * u2h))
    m4 = float(np.sum(cw * u2h * u2h))
    det = m0 * m4 - m2 ** 2
    if not (det > 0.0) or not math.isfinite(det):
        raise SingularSystem(f"normal-equation determinant {det:g} is not positive")
    y = logcf.real_part
    d0 = float(np.sum(cw * y))
    d2 = float(np.sum(cw * u2h * y))
    sigma2 = (m2 * d0 - m0 * d2) / det
    lambda_star = (m2 * d2 - m4 * d0) / det
    return sigma2, lambda_star


def gamma_normal_equation(logcf: LogCfSeries, w: BaseWeight, V: float) -> float:
    """Slope of Im log(cf_n) against u in the weighted band [eps V, V]."""
    grid = logcf.grid
    u = grid.values
    wv = weight_on_grid(w, V, grid)
    _check_band(w, V, grid, wv)
    c = trapezoid_weights(grid)
    cw = c * wv
    mg = float(np.sum(cw * u * u))
    if not (mg > 0.0) or not math.isfinite(mg):
        raise SingularSystem(f"gamma normalizer {mg:g} is not positive")
    return float(np.sum(cw * u * logcf.imag_part) / mg)


def derived_families(w: BaseWeight, U: float, grid: UniformGrid):
    """Materialize (w_sigma2, w_lambda, w_gamma) node-wise on the grid."""
    u = grid.values
    wu = weight_on_grid(w, U, grid)
    mom = weight_moments(w, U, grid)
    det = mom.det
    if not (det > 0.0 and mom.mg > 0.0):
        raise SingularSystem(f"degenerate weight moments: det={det:g}, mg={mom.mg:g}")
    u2h = 0.5 * u * u
    w_sigma2 = wu * (mom.m2 - u2h * mom.m0) / det
    w_lambda = wu * (u2h * mom.m2 - mom.m4) / det
    w_gamma = wu * u / mom.mg
    return w_sigma2, w_lambda, w_gamma


def derived_weight_identities(w: BaseWeight, U: float,
                              grid: UniformGrid | None = None) -> dict:
    """Numerically evaluate the five defining moment identities.

    Returns {"check_sigma": (int w_s2, int -u^2/2 w_s2),
             "check_lambda": (int -w_l, int u^2/2 w_l),
             "check_gamma": int u w_g}
    with targets (0, 1), (1, 0) and 1.
    """
    if grid is None:
        grid = UniformGrid(0.0, U, 4096)
    u = grid.values
    c = trapezoid_weights(grid)
    w_sigma2, w_lambda, w_gamma = derived_families(w, U, grid)
    u2h = 0.5 * u * u
    return {
        "check_sigma": (float(np.sum(c * w_sigma2)),
                        float(np.sum(c * (-u2h) * w_sigma2))),
        "check_lambda": (float(np.sum(c * (-w_lambda))),
                         float(np.sum(c * u2h * w_lambda))),
        "check_gamma": float(np.sum(c * u * w_gamma)),
    }


def sigma2_weight_printed_form(w: BaseWeight, U: float, grid: UniformGrid) -> np.ndarray:
    """Alternative closed form of the variance-extraction family,

        2 w_U(u) (u^2 A - B) / (B^2 - C A),

    with A = int w_U, B = int w_U u^2, C = int w_U u^4. Kept only as a
    cross-check against the normal-equation representation.
    """
    u = grid.values
    c = trapezoid_weights(grid)
    wu = weight_on_grid(w, U, grid)
    cw = c * wu
    a = float(np.sum(cw))
    b = float(np.sum(cw * u * u))
    c4 = float(np.sum(cw * u ** 4))
    denom = b * b - c4 * a
    if denom == 0.0:
        raise SingularSystem("printed-form denominator vanished")
    return 2.0 * wu * (u * u * a - b) / denom
