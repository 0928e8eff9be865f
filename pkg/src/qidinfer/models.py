"""Simulation models: seedable samplers and analytic oracles.

Four model families are supported:

* ``PureNormal(sigma_sq)`` -- N(0, sigma_sq); triplet (0, sigma_sq, 0).
* ``TwoNormalMixture(p, sigma1_sq, sigma2_sq)`` -- p N(0, s1) + (1-p) N(0, s2)
  with p > 1/2 and s1 < s2.
* ``BartSimpsonModified(delta, sigma1, sigma2)`` -- the claw-shaped density
  (0.5+delta) N(0, sigma1^2) + (0.5-delta)/5 * sum_j N((j/2)-1, sigma2^2).
* ``StudentPlusNormalMixture(p, dof, sigma1_sq, sigma2_sq)`` -- the
  contaminant is Student-t(dof) convolved with N(0, sigma2_sq).

Each mixture ``mu = p N(0, s1) + (1-p) mu_circ`` factors through the latent
characteristic function H(u) = cf_circ(u) * exp(s1 u^2 / 2); all oracles
below (total characteristic function, signed jump density, ground-truth
triplet) are expressed through H.

Sampling uses NumPy's counter-based Philox bit generator: a run is fully
determined by its integer seed, and distinct seeds give independent streams,
which makes Monte-Carlo sweeps bit-reproducible across schedules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special, stats

from .core import DensityCurve, Sample, UniformGrid
from .errors import BadSpec, SeriesNotConverged, UnsupportedSpec

__all__ = [
    "PureNormal",
    "TwoNormalMixture",
    "BartSimpsonModified",
    "StudentPlusNormalMixture",
    "ModelSpec",
    "NuTildeSeriesConfig",
    "TripletTruth",
    "sample_model",
    "exact_density",
    "exact_g_circ",
    "nu_tilde_density",
    "nu_tilde_term_count",
    "exact_triplet",
    "h_function",
    "contaminant_cf",
    "main_weight",
    "main_variance",
    "model_to_dict",
    "model_from_dict",
]

_BART_MEANS = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


# ------------------------- model specifications -------------------------

@dataclass(frozen=True)
class PureNormal:
    sigma_sq: float

    def __post_init__(self):
        if not self.sigma_sq > 0:
            raise BadSpec(f"sigma_sq must be positive, got {self.sigma_sq}")


@dataclass(frozen=True)
class TwoNormalMixture:
    p: float
    sigma1_sq: float
    sigma2_sq: float

    def __post_init__(self):
        if not 0.5 < self.p < 1.0:
            raise BadSpec(f"need 1/2 < p < 1, got p={self.p}")
        if not 0.0 < self.sigma1_sq < self.sigma2_sq:
            raise BadSpec(
                f"need 0 < sigma1_sq < sigma2_sq, got {self.sigma1_sq}, {self.sigma2_sq}"
            )


@dataclass(frozen=True)
class BartSimpsonModified:
    """Claw density with main weight 0.5 + delta; delta > 0 keeps it QID."""

    delta: float
    sigma1: float
    sigma2: float

    def __post_init__(self):
        if not self.delta > 0:
            raise BadSpec(f"delta must be positive, got {self.delta}")
        if not 0.0 < self.sigma1 < self.sigma2:
            raise BadSpec(f"need 0 < sigma1 < sigma2, got {self.sigma1}, {self.sigma2}")

    @property
    def p(self) -> float:
        return 0.5 + self.delta


@dataclass(frozen=True)
class StudentPlusNormalMixture:
    p: float
    dof: int
    sigma1_sq: float
    sigma2_sq: float

    def __post_init__(self):
        if not 0.5 < self.p < 1.0:
            raise BadSpec(f"need 1/2 < p < 1, got p={self.p}")
        if int(self.dof) != self.dof or self.dof < 3:
            raise BadSpec(f"dof must be an integer >= 3, got {self.dof}")
        if not 0.0 < self.sigma1_sq < self.sigma2_sq:
            raise BadSpec(
                f"need 0 < sigma1_sq < sigma2_sq, got {self.sigma1_sq}, {self.sigma2_sq}"
            )


ModelSpec = Union[PureNormal, TwoNormalMixture, BartSimpsonModified,
                  StudentPlusNormalMixture]


def main_weight(spec: ModelSpec) -> float:
    """Weight p of the centered normal main component."""
    if isinstance(spec, PureNormal):
        return 1.0
    if isinstance(spec, BartSimpsonModified):
        return spec.p
    return spec.p


def main_variance(spec: ModelSpec) -> float:
    if isinstance(spec, PureNormal):
        return spec.sigma_sq
    if isinstance(spec, BartSimpsonModified):
        return spec.sigma1 ** 2
    return spec.sigma1_sq


# ------------------------- sampling -------------------------

def sample_model(spec: ModelSpec, n: int, seed: int) -> Sample:
    """Draw n i.i.d. observations; deterministic given (spec, n, seed).

    The mixture draw is latent-component first, then the component value.
    Student-t variates are formed as Z0 / sqrt((Z1^2+...+Zd^2)/d) from the
    same stream, so no rejection loop ever consumes a variable number of
    draws.
    """
    if n < 0:
        raise BadSpec(f"sample size must be non-negative, got {n}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    tag = model_tag(spec)
    if n == 0:
        return Sample(np.empty(0), seed=seed, model_tag=tag)

    if isinstance(spec, PureNormal):
        x = math.sqrt(spec.sigma_sq) * rng.standard_normal(n)
        return Sample(x, seed=seed, model_tag=tag)

    main = rng.random(n) < main_weight(spec)
    z = rng.standard_normal(n)
    if isinstance(spec, TwoNormalMixture):
        scale = np.where(main, math.sqrt(spec.sigma1_sq), math.sqrt(spec.sigma2_sq))
        x = scale * z
    elif isinstance(spec, BartSimpsonModified):
        comp = rng.integers(0, 5, size=n)
        x = np.where(main, spec.sigma1 * z, _BART_MEANS[comp] + spec.sigma2 * z)
    else:  # StudentPlusNormalMixture
        d = int(spec.dof)
        chi = (rng.standard_normal((n, d)) ** 2).sum(axis=1)
        t = rng.standard_normal(n) / np.sqrt(chi / d)
        w = rng.standard_normal(n)
        contam = t + math.sqrt(spec.sigma2_sq) * w
        x = np.where(main, math.sqrt(spec.sigma1_sq) * z, contam)
    return Sample(x, seed=seed, model_tag=tag)


# ------------------------- latent characteristic function -------------------------

def _student_t_cf(u: np.ndarray, dof: int) -> np.ndarray:
    """Characteristic function of the standard Student-t law.

    General dof via the Bessel-K form; dof = 3 has the elementary expression
    (1 + sqrt(3)|u|) exp(-sqrt(3)|u|).
    """
    a = np.sqrt(float(dof)) * np.abs(u)
    if dof == 3:
        return (1.0 + a) * np.exp(-a)
    half = dof / 2.0
    out = np.ones_like(a)
    nz = a > 0
    out[nz] = (special.kv(half, a[nz]) * a[nz] ** half
               / (special.gamma(half) * 2.0 ** (half - 1.0)))
    return out


def contaminant_cf(spec: ModelSpec, u: np.ndarray) -> np.ndarray:
    """Characteristic function of the contaminant component mu_circ."""
    u = np.asarray(u, dtype=float)
    if isinstance(spec, TwoNormalMixture):
        return np.exp(-0.5 * spec.sigma2_sq * u ** 2) + 0j
    if isinstance(spec, BartSimpsonModified):
        osc = (1.0 + 2.0 * np.cos(0.5 * u) + 2.0 * np.cos(u)) / 5.0
        return osc * np.exp(-0.5 * spec.sigma2 ** 2 * u ** 2) + 0j
    if isinstance(spec, StudentPlusNormalMixture):
        return (_student_t_cf(u, int(spec.dof))
                * np.exp(-0.5 * spec.sigma2_sq * u ** 2)) + 0j
    raise UnsupportedSpec(f"{type(spec).__name__} has no contaminant component")


def h_function(spec: ModelSpec, u: np.ndarray) -> np.ndarray:
    """H(u) = cf_circ(u) * exp(u^2 sigma^2 / 2), the latent measure's cf.

    For the two-normal mixture this is the Gaussian cf of
    N(0, sigma2_sq - sigma1_sq).
    """
    u = np.asarray(u, dtype=float)
    s1 = main_variance(spec)
    if isinstance(spec, TwoNormalMixture):
        return np.exp(-0.5 * (spec.sigma2_sq - s1) * u ** 2) + 0j
    if isinstance(spec, BartSimpsonModified):
        osc = (1.0 + 2.0 * np.cos(0.5 * u) + 2.0 * np.cos(u)) / 5.0
        return osc * np.exp(-0.5 * (spec.sigma2 ** 2 - s1) * u ** 2) + 0j
    if isinstance(spec, StudentPlusNormalMixture):
        return (_student_t_cf(u, int(spec.dof))
                * np.exp(-0.5 * (spec.sigma2_sq - s1) * u ** 2)) + 0j
    raise UnsupportedSpec(f"{type(spec).__name__} has no latent measure")


# ------------------------- densities -------------------------

def _normal_pdf(x: np.ndarray, variance: float) -> np.ndarray:
    return np.exp(-0.5 * x * x / variance) / math.sqrt(2.0 * math.pi * variance)


def exact_g_circ(spec: ModelSpec, x_grid: UniformGrid) -> DensityCurve:
    """Density of the contaminant component alone.

    The Student-plus-normal case is computed by high-resolution numerical
    convolution of the t density with the normal density (oracle-grade:
    the integrand is analytic and decays like a Gaussian in the dummy
    variable, so the trapezoid rule converges spectrally).
    """
    x = x_grid.values
    if isinstance(spec, TwoNormalMixture):
        return DensityCurve(x_grid, _normal_pdf(x, spec.sigma2_sq))
    if isinstance(spec, BartSimpsonModified):
        v = spec.sigma2 ** 2
        vals = np.zeros_like(x)
        for m in _BART_MEANS:
            vals += _normal_pdf(x - m, v)
        return DensityCurve(x_grid, vals / 5.0)
    if isinstance(spec, StudentPlusNormalMixture):
        sigma2 = math.sqrt(spec.sigma2_sq)
        y = np.linspace(-8.5 * sigma2, 8.5 * sigma2, 2049)
        t_pdf = stats.t(df=int(spec.dof)).pdf
        integrand = t_pdf(x[:, None] - y[None, :]) * _normal_pdf(y, spec.sigma2_sq)
        vals = np.trapezoid(integrand, y, axis=1)
        return DensityCurve(x_grid, vals)
    raise UnsupportedSpec(f"{type(spec).__name__} has no contaminant component")


def exact_density(spec: ModelSpec, x_grid: UniformGrid) -> DensityCurve:
    """Density of the full model on the grid."""
    x = x_grid.values
    if isinstance(spec, PureNormal):
        return DensityCurve(x_grid, _normal_pdf(x, spec.sigma_sq))
    p = main_weight(spec)
    main = _normal_pdf(x, main_variance(spec))
    circ = exact_g_circ(spec, x_grid).values
    return DensityCurve(x_grid, p * main + (1.0 - p) * circ)


# ------------------------- signed jump density -------------------------

@dataclass(frozen=True)
class NuTildeSeriesConfig:
    """Truncation policy for the alternating convolution-power series."""

    max_terms: int = 60
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.max_terms < 1 or not self.tail_tol > 0:
            raise ValueError("need max_terms >= 1 and tail_tol > 0")


def nu_tilde_term_count(p: float, cfg: NuTildeSeriesConfig | None = None) -> int:
    """Number of series terms kept before the total-variation bound q^m/m
    drops below the tail tolerance (q = (1-p)/p)."""
    cfg = cfg or NuTildeSeriesConfig()
    q = (1.0 - p) / p
    for m in range(1, cfg.max_terms + 1):
        if q ** m / m < cfg.tail_tol:
            return m - 1
    raise SeriesNotConverged(cfg.max_terms,
                             q ** cfg.max_terms / cfg.max_terms, cfg.tail_tol)


def nu_tilde_density(spec: ModelSpec, x_grid: UniformGrid,
                     cfg: NuTildeSeriesConfig | None = None) -> DensityCurve:
    """Signed jump density as the truncated alternating Gaussian series.

    Only models with a Gaussian latent measure qualify (the two-normal
    mixture: term m is a centered normal with variance m*(s2-s1) and signed
    weight (-1)^(m+1) q^m / m). The total mass of the full series is -log p.
    """
    cfg = cfg or NuTildeSeriesConfig()
    if not isinstance(spec, TwoNormalMixture):
        raise UnsupportedSpec(
            f"the series needs a Gaussian latent measure; {type(spec).__name__} "
            "does not have one")
    terms = nu_tilde_term_count(spec.p, cfg)
    q = (1.0 - spec.p) / spec.p
    delta = spec.sigma2_sq - spec.sigma1_sq
    x = x_grid.values
    vals = np.zeros_like(x)
    for m in range(1, terms + 1):
        weight = ((-1.0) ** (m + 1)) * q ** m / m
        vals += weight * _normal_pdf(x, m * delta)
    return DensityCurve(x_grid, vals)


@dataclass(frozen=True)
class TripletTruth:
    gamma_star: float
    sigma2: float
    lambda_star: float
    p: float


def exact_triplet(spec: ModelSpec) -> TripletTruth:
    """Ground-truth characteristic triplet (and normal weight p).

    The drift term vanishes for every supported mixture: the log-cf equals
    -s1 u^2/2 + log(1 + q H(u)) - log(1/p) with no linear term in u.
    """
    if isinstance(spec, PureNormal):
        return TripletTruth(0.0, spec.sigma_sq, 0.0, 1.0)
    if isinstance(spec, (TwoNormalMixture, BartSimpsonModified,
                         StudentPlusNormalMixture)):
        p = main_weight(spec)
        return TripletTruth(0.0, main_variance(spec), -math.log(p), p)
    raise UnsupportedSpec(f"no triplet oracle for {type(spec).__name__}")


# ------------------------- (de)serialization -------------------------

_VARIANTS = {
    "pure_normal": PureNormal,
    "two_normal_mixture": TwoNormalMixture,
    "bart_simpson_modified": BartSimpsonModified,
    "student_plus_normal_mixture": StudentPlusNormalMixture,
}
_TAGS = {cls: tag for tag, cls in _VARIANTS.items()}


def model_tag(spec: ModelSpec) -> str:
    return _TAGS[type(spec)]


def model_to_dict(spec: ModelSpec) -> dict:
    out = {"variant": model_tag(spec)}
    for name in spec.__dataclass_fields__:
        value = getattr(spec, name)
        out[name] = int(value) if name == "dof" else float(value)
    return out


def model_from_dict(d: dict) -> ModelSpec:
    d = dict(d)
    try:
        cls = _VARIANTS[d.pop("variant")]
    except KeyError as exc:
        raise BadSpec(f"unknown model variant {exc}") from None
    try:
        return cls(**d)
    except TypeError as exc:
        raise BadSpec(str(exc)) from None
