# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the NumPy kernels in ``_ref.py``.

The complex exponentials along a uniform frequency grid are generated by the
recurrence w <- w * exp(i * du * x), refreshed with a direct evaluation every
``_REFRESH`` steps so the accumulated rounding error stays below ~1e-13.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

BACKEND = "compiled"

cdef int _REFRESH = 512


def ecf_sums(cnp.ndarray[cnp.float64_t, ndim=1] x, double u0, double du, int count):
    """sum_j exp(i * u_k * x_j) on the uniform grid u_k = u0 + k * du.

    Samples are processed in blocks of independent recurrence chains so the
    inner loop vectorizes; each chain is refreshed with direct cos/sin every
    ``_REFRESH`` grid steps to bound the rounding drift.
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc_re = np.zeros(count, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acc_im = np.zeros(count, dtype=np.float64)
    cdef double wr[64]
    cdef double wi[64]
    cdef double zr[64]
    cdef double zi[64]
    cdef int block = 64
    cdef Py_ssize_t j0, b, nb, j
    cdef int k, k0, kend
    cdef double xj, tr, phase, sr, si
    for j0 in range(0, n, block):
        nb = n - j0
        if nb > block:
            nb = block
        for b in range(nb):
            xj = x[j0 + b]
            zr[b] = cos(du * xj)
            zi[b] = sin(du * xj)
        k0 = 0
        while k0 < count:
            kend = k0 + _REFRESH
            if kend > count:
                kend = count
            for b in range(nb):
                phase = (u0 + du * k0) * x[j0 + b]
                wr[b] = cos(phase)
                wi[b] = sin(phase)
            for k in range(k0, kend):
                sr = 0.0
                si = 0.0
                for b in range(nb):
                    sr += wr[b]
                    si += wi[b]
                    tr = wr[b] * zr[b] - wi[b] * zi[b]
                    wi[b] = wr[b] * zi[b] + wi[b] * zr[b]
                    wr[b] = tr
                acc_re[k] += sr
                acc_im[k] += si
            k0 = kend
    cdef cnp.ndarray out = acc_re + 1j * acc_im
    return out


def kde_epanechnikov(cnp.ndarray[cnp.float64_t, ndim=1] x_sorted, double h,
                     cnp.ndarray[cnp.float64_t, ndim=1] grid):
    """(1/(n h)) * sum_j K((x_j - g) / h), Epanechnikov kernel, sorted input."""
    cdef Py_ssize_t n = x_sorted.shape[0]
    cdef Py_ssize_t m = grid.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(m, dtype=np.float64)
    cdef double scale = 0.75 / (n * h)
    cdef Py_ssize_t i, j, lo, hi
    cdef double g, t, s
    lo = 0
    hi = 0
    for i in range(m):
        g = grid[i]
        # windows are monotone in g only for an ascending grid; recompute
        # from scratch is avoided by the two moving pointers
        while lo < n and x_sorted[lo] < g - h:
            lo += 1
        if hi < lo:
            hi = lo
        while hi < n and x_sorted[hi] <= g + h:
            hi += 1
        s = 0.0
        for j in range(lo, hi):
            t = (x_sorted[j] - g) / h
            s += 1.0 - t * t
        out[i] = scale * s
    return out


def fourier_cos_sin(double u0, double du, cnp.ndarray[cnp.complex128_t, ndim=1] coeff,
                    cnp.ndarray[cnp.float64_t, ndim=1] x):
    """sum_k [cos(u_k x) Re(c_k) + sin(u_k x) Im(c_k)] for each x."""
    cdef Py_ssize_t m = coeff.shape[0]
    cdef Py_ssize_t nx = x.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(nx, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cre = np.ascontiguousarray(coeff.real)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cim = np.ascontiguousarray(coeff.imag)
    cdef Py_ssize_t i, k
    cdef int fresh
    cdef double xi, wr, wi, zr, zi, tr, s, phase
    for i in range(nx):
        xi = x[i]
        zr = cos(du * xi)
        zi = sin(du * xi)
        phase = u0 * xi
        wr = cos(phase)
        wi = sin(phase)
        fresh = _REFRESH
        s = 0.0
        for k in range(m):
            if fresh == 0:
                phase = (u0 + du * k) * xi
                wr = cos(phase)
                wi = sin(phase)
                fresh = _REFRESH
            fresh -= 1
            s += wr * cre[k] + wi * cim[k]
            tr = wr * zr - wi * zi
            wi = wr * zi + wi * zr
            wr = tr
        out[i] = s
    return out
