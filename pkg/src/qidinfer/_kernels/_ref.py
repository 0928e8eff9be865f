"""NumPy reference implementation of the hot kernels.

Semantics must match ``_speedups.pyx`` exactly up to floating-point
round-off; the compiled module is preferred at import time when available.
All three kernels are O(n * m) inner loops that dominate Monte-Carlo
runtime, hence the dedicated backend layer.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

# Block size for the chunked outer products; keeps peak memory near 64 MB.
_BLOCK = 1024


def ecf_sums(x: np.ndarray, u0: float, du: float, count: int) -> np.ndarray:
    """sum_j exp(i * u_k * x_j) on the uniform grid u_k = u0 + k * du.

    Returns the complex sums (not yet divided by n). The exponentials are
    advanced along the grid by the recurrence w <- w * exp(i du x), vectorized
    over the sample and refreshed with a direct evaluation every 512 steps to
    bound the accumulated rounding error.
    """
    x = np.ascontiguousarray(x, dtype=float)
    acc = np.empty(count, dtype=complex)
    z = np.exp(1j * du * x)
    w = np.exp(1j * u0 * x)
    for k in range(count):
        if k % 512 == 0 and k > 0:
            w = np.exp(1j * (u0 + du * k) * x)
        acc[k] = w.sum()
        w *= z
    return acc


def kde_epanechnikov(x_sorted: np.ndarray, h: float, grid: np.ndarray) -> np.ndarray:
    """(1/(n h)) * sum_j K((x_j - g) / h) with the Epanechnikov kernel.

    ``x_sorted`` must be ascending. Differences are formed before squaring,
    so every output is non-negative in floating point.
    """
    x = np.ascontiguousarray(x_sorted, dtype=float)
    n = x.size
    out = np.empty(grid.size, dtype=float)
    scale = 0.75 / (n * h)
    lo_idx = np.searchsorted(x, grid - h, side="left")
    hi_idx = np.searchsorted(x, grid + h, side="right")
    for m in range(grid.size):
        window = x[lo_idx[m]:hi_idx[m]]
        if window.size == 0:
            out[m] = 0.0
            continue
        t = (window - grid[m]) / h
        out[m] = scale * np.sum(1.0 - t * t)
    return out


def fourier_cos_sin(u0: float, du: float, coeff: np.ndarray,
                    x: np.ndarray) -> np.ndarray:
    """sum_k [cos(u_k x) Re(c_k) + sin(u_k x) Im(c_k)] for each x.

    ``coeff`` already carries quadrature weights and tapering; the caller
    applies the final 1/pi factor.
    """
    coeff = np.ascontiguousarray(coeff, dtype=complex)
    u = u0 + du * np.arange(coeff.size)
    re = coeff.real
    im = coeff.imag
    out = np.empty(x.size, dtype=float)
    for lo in range(0, x.size, _BLOCK):
        xb = x[lo:lo + _BLOCK]
        phase = np.multiply.outer(xb, u)
        out[lo:lo + _BLOCK] = np.cos(phase) @ re + np.sin(phase) @ im
    return out
