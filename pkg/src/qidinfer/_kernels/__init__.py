"""Hot-kernel backend selection.

The compiled Cython module is used when importable; otherwise the NumPy
reference implementation takes over. Force a backend with
``QIDINFER_KERNELS=compiled|numpy`` (useful for the benchmark and for
debugging round-off discrepancies).
"""

from __future__ import annotations

import os

import numpy as np

from . import _ref

_forced = os.environ.get("QIDINFER_KERNELS", "").strip().lower()

if _forced == "numpy":
    _impl = _ref
elif _forced == "compiled":
    from . import _speedups as _impl  # hard failure if forced but missing
else:
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _ref

BACKEND: str = _impl.BACKEND


def backend_name() -> str:
    return BACKEND


def available_backends():
    names = ["numpy"]
    try:
        from . import _speedups  # noqa: F401
        names.insert(0, "compiled")
    except ImportError:
        pass
    return names


def ecf_sums(x: np.ndarray, u0: float, du: float, count: int) -> np.ndarray:
    """Unnormalized empirical characteristic sums on a uniform grid."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = _impl.ecf_sums(x, float(u0), float(du), int(count))
    # u = 0 carries no information: the sum is exactly n there
    u = u0 + du * np.arange(count)
    out[u == 0.0] = float(x.size)
    return out


def kde_epanechnikov(x_sorted: np.ndarray, h: float, grid: np.ndarray) -> np.ndarray:
    x_sorted = np.ascontiguousarray(x_sorted, dtype=np.float64)
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    return _impl.kde_epanechnikov(x_sorted, float(h), grid)


def fourier_cos_sin(u0: float, du: float, coeff: np.ndarray, x: np.ndarray) -> np.ndarray:
    coeff = np.ascontiguousarray(coeff, dtype=np.complex128)
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _impl.fourier_cos_sin(float(u0), float(du), coeff, x)
