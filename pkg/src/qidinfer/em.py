"""EM baseline for the two-component zero-mean normal variance mixture.

Standard E/M iteration on (p, s1, s2) with zero means hard-coded; stops when
the log-likelihood improvement falls below the tolerance or the iteration
cap is reached. Components are reported in canonical order (smaller variance
first) with p attached to the smaller-variance component, so permuting the
initialization cannot change the result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import Sample
from .errors import DegenerateComponent

__all__ = ["EmConfig", "EmResult", "em_fit"]

_VAR_FLOOR = 1e-12


@dataclass(frozen=True)
class EmConfig:
    max_iters: int = 200
    loglik_tol: float = 1e-6
    # None -> deterministic moment-based initialization; otherwise (p0, s1, s2)
    init: Optional[Tuple[float, float, float]] = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if not self.loglik_tol > 0:
            raise ValueError(f"loglik_tol must be positive, got {self.loglik_tol}")


@dataclass(frozen=True)
class EmResult:
    p_hat: float
    sigma1_sq_hat: float
    sigma2_sq_hat: float
    loglik_trace: np.ndarray
    iterations: int
    converged: bool


def _moment_init(x: np.ndarray) -> Tuple[float, float, float]:
    """Split by |x| at its median; component variances from each half."""
    a = np.abs(x)
    med = float(np.median(a))
    low = x[a <= med]
    high = x[a > med]
    s1 = float(np.mean(low ** 2)) if low.size else _VAR_FLOOR
    s2 = float(np.mean(high ** 2)) if high.size else _VAR_FLOOR
    return 0.5, max(s1, _VAR_FLOOR), max(s2, _VAR_FLOOR)


def _log_density_parts(x2: np.ndarray, p: float, s1: float, s2: float):
    la = np.log(p) - 0.5 * (np.log(2.0 * np.pi * s1) + x2 / s1)
    lb = np.log1p(-p) - 0.5 * (np.log(2.0 * np.pi * s2) + x2 / s2)
    return la, lb


def em_fit(sample: Sample, cfg: EmConfig = EmConfig()) -> EmResult:
    """Fit p N(0, s1) + (1-p) N(0, s2) by expectation-maximization."""
    if sample.n < 10:
        raise ValueError(f"EM needs at least 10 observations, got {sample.n}")
    x = sample.values
    x2 = x * x
    n = x.size

    if cfg.init is None:
        p, s1, s2 = _moment_init(x)
    else:
        p, s1, s2 = cfg.init
        if not (0.0 < p < 1.0 and s1 > 0 and s2 > 0):
            raise ValueError(f"bad fixed initialization {cfg.init}")

    trace = []
    converged = False
    iterations = 0
    prev_ll = -np.inf
    for _ in range(cfg.max_iters):
        # E-step via log-sum-exp; responsibilities sum to 1 by construction
        la, lb = _log_density_parts(x2, p, s1, s2)
        m = np.maximum(la, lb)
        ea = np.exp(la - m)
        eb = np.exp(lb - m)
        denom = ea + eb
        r = ea / denom
        ll = float(np.sum(m + np.log(denom)))

        # M-step
        r_sum = float(np.sum(r))
        q_sum = n - r_sum
        if r_sum <= _VAR_FLOOR * n or q_sum <= _VAR_FLOOR * n:
            raise DegenerateComponent("a component lost all responsibility mass")
        s1 = float(np.sum(r * x2) / r_sum)
        s2 = float(np.sum((1.0 - r) * x2) / q_sum)
        if s1 < _VAR_FLOOR or s2 < _VAR_FLOOR:
            raise DegenerateComponent(
                f"variance update collapsed: s1={s1:.3e}, s2={s2:.3e}")
        p = r_sum / n

        trace.append(ll)
        iterations += 1
        if ll - prev_ll < cfg.loglik_tol and np.isfinite(prev_ll):
            converged = True
            break
        prev_ll = ll

    if s1 > s2:
        s1, s2 = s2, s1
        p = 1.0 - p
    return EmResult(p_hat=float(p), sigma1_sq_hat=s1, sigma2_sq_hat=s2,
                    loglik_trace=np.asarray(trace), iterations=iterations,
                    converged=converged)
