import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qidinfer.core import (DensityCurve, KernelSpec, Sample, UniformGrid,
                           bandwidth_rule, epanechnikov, l2_distance,
                           trapezoid_integrate)
from qidinfer.errors import GridMismatch, LengthMismatch, NonPositiveN


class TestUniformGrid:
    def test_basic(self):
        g = UniformGrid(0.0, 1.0, 101)
        assert g.spacing == pytest.approx(0.01)
        assert g.values[0] == 0.0
        assert g.values[-1] == pytest.approx(1.0)
        assert len(g) == 101

    def test_invalid(self):
        with pytest.raises(ValueError):
            UniformGrid(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            UniformGrid(1.0, 1.0, 10)


class TestTrapezoid:
    def test_constant_exact(self):
        g = UniformGrid(0.0, 1.0, 101)
        assert trapezoid_integrate(np.ones(101), g) == 1.0

    def test_linear_exact(self):
        g = UniformGrid(0.0, 1.0, 101)
        assert trapezoid_integrate(g.values, g) == pytest.approx(0.5, abs=1e-15)

    def test_quadratic(self):
        g = UniformGrid(0.0, 1.0, 1001)
        # oracle: closed-form antiderivative u^3/3 on [0, 1]
        assert trapezoid_integrate(g.values**2, g) == pytest.approx(1.0 / 3.0, abs=1e-6)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            trapezoid_integrate(np.ones(5), UniformGrid(0.0, 1.0, 6))

    def test_complex_linearity(self):
        g = UniformGrid(0.0, 2.0, 257)
        f = np.exp(1j * g.values)
        val = trapezoid_integrate(f, g)
        assert isinstance(val, complex)
        assert val.real == pytest.approx(trapezoid_integrate(f.real, g))
        assert val.imag == pytest.approx(trapezoid_integrate(f.imag, g))

    @given(a=st.floats(-5, 5), b=st.floats(-5, 5),
           count=st.integers(2, 50))
    def test_affine_exact_any_grid(self, a, b, count):
        g = UniformGrid(-1.0, 3.0, count)
        exact = a * (3.0**2 - (-1.0) ** 2) / 2.0 + b * 4.0
        assert trapezoid_integrate(a * g.values + b, g) == pytest.approx(exact, abs=1e-9)


class TestEpanechnikov:
    def test_peak(self):
        assert epanechnikov(0.0) == 0.75

    def test_support_boundary(self):
        assert epanechnikov(1.0) == 0.0
        assert epanechnikov(-1.0) == 0.0
        assert epanechnikov(1.5) == 0.0

    def test_moment_integrals(self):
        g = UniformGrid(-1.0, 1.0, 2001)
        k = epanechnikov(g.values)
        # closed-form polynomial integrals: int K^2 = 3/5, int u^2 K = 1/5
        assert trapezoid_integrate(k * k, g) == pytest.approx(0.6, abs=1e-6)
        assert trapezoid_integrate(g.values**2 * k, g) == pytest.approx(0.2, abs=1e-6)
        assert trapezoid_integrate(k, g) == pytest.approx(1.0, abs=1e-6)

    @given(st.floats(-3, 3))
    def test_even(self, u):
        assert epanechnikov(u) == epanechnikov(-u)

    def test_nonnegative_vectorized(self):
        u = np.linspace(-2, 2, 101)
        assert np.all(epanechnikov(u) >= 0)


class TestBandwidthRule:
    def test_n_one(self):
        assert bandwidth_rule(1) == pytest.approx(1.0 / 30.0)

    def test_large_n(self):
        assert bandwidth_rule(100000) == pytest.approx((1.0 / 30.0) * 0.1)

    def test_thousand(self):
        assert bandwidth_rule(1000) == pytest.approx((1.0 / 30.0) * 1000 ** (-0.2))

    def test_strictly_decreasing(self):
        hs = [bandwidth_rule(n) for n in (1, 10, 100, 1000, 10**6)]
        assert all(a > b for a, b in zip(hs, hs[1:]))

    def test_bad_n(self):
        with pytest.raises(NonPositiveN):
            bandwidth_rule(0)


class TestSample:
    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Sample(np.array([1.0, np.inf]))

    def test_empty_allowed(self):
        assert Sample(np.empty(0)).n == 0


class TestKernelSpec:
    def test_only_epanechnikov(self):
        with pytest.raises(ValueError):
            KernelSpec(kind="gaussian")


class TestL2Distance:
    def test_identical(self):
        g = UniformGrid(0.0, 1.0, 11)
        c = DensityCurve(g, np.ones(11))
        assert l2_distance(c, c) == 0.0

    def test_unit_gap(self):
        g = UniformGrid(0.0, 1.0, 101)
        a = DensityCurve(g, np.ones(101))
        b = DensityCurve(g, np.zeros(101))
        assert l2_distance(a, b) == pytest.approx(1.0)

    def test_grid_mismatch(self):
        a = DensityCurve(UniformGrid(0.0, 1.0, 11), np.ones(11))
        b = DensityCurve(UniformGrid(0.0, 2.0, 11), np.ones(11))
        with pytest.raises(GridMismatch):
            l2_distance(a, b)

    def test_gaussian_pair_matches_fine_quadrature(self):
        def phi(x, v):
            return np.exp(-0.5 * x * x / v) / np.sqrt(2 * np.pi * v)

        g = UniformGrid(-8.0, 8.0, 4001)
        a = DensityCurve(g, phi(g.values, 1.0))
        b = DensityCurve(g, phi(g.values, 1.1))
        # independent high-resolution quadrature of the same integral
        fine = np.linspace(-8, 8, 400001)
        oracle = np.sqrt(np.trapezoid((phi(fine, 1.0) - phi(fine, 1.1)) ** 2, fine))
        assert l2_distance(a, b) == pytest.approx(oracle, abs=1e-8)
