import numpy as np
import pytest
from scipy.integrate import quad

from qidinfer.charfn import LogCfSeries, exact_log_cf
from qidinfer.core import UniformGrid, trapezoid_weights
from qidinfer.errors import BadEpsilon, GridTooCoarse
from qidinfer.models import TwoNormalMixture
from qidinfer.weights import (BaseWeight, build_base_weight, derived_families,
                              derived_weight_identities, gamma_normal_equation,
                              sigma2_weight_printed_form,
                              sigma_lambda_normal_equations, weight_moments,
                              weight_on_grid)

LAMBDA_TRUE = 0.2876820724


def make_logcf(grid, re=None, im=None):
    z = np.zeros(grid.count)
    return LogCfSeries(grid, z if re is None else re, z if im is None else im)


class TestBaseWeight:
    def test_indicator_support(self):
        w = build_base_weight(0.5, "indicator")
        assert w(0.75) == 1.0
        assert w(0.25) == 0.0
        assert w(1.0) == 1.0

    def test_smooth_bump_vanishes_at_ends(self):
        w = build_base_weight(0.5, "smooth_bump")
        v = np.linspace(0.5, 1.0, 101)
        vals = w(v)
        assert vals[0] == 0.0 and vals[-1] == 0.0
        assert np.all(vals[1:-1] > 0)
        # numerically flat near the endpoints (all derivatives vanish)
        assert w(0.5 + 1e-4) < 1e-300 or w(0.5 + 1e-4) < w(0.75) * 1e-10

    def test_bad_epsilon(self):
        with pytest.raises(BadEpsilon):
            build_base_weight(0.0)
        with pytest.raises(BadEpsilon):
            build_base_weight(1.0)


class TestMoments:
    def test_indicator_half_moments(self):
        # fine grid so the indicator-jump quadrature error is negligible
        grid = UniformGrid(0.0, 1.0, 65537)
        m = weight_moments(build_base_weight(0.5), 1.0, grid)
        assert m.m0 == pytest.approx(0.5, abs=1e-4)
        assert m.m2 == pytest.approx(7.0 / 48.0, abs=1e-4)
        assert m.m4 == pytest.approx((1.0 - 0.03125) / 20.0, abs=1e-4)
        assert m.det > 0

    def test_cauchy_schwarz_strict(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        for kind in ("indicator", "smooth_bump"):
            m = weight_moments(build_base_weight(0.25, kind), 8.0, grid)
            assert m.det > 0


class TestSigmaLambda:
    def test_exact_quadratic_recovery(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        y = -0.5 * 0.1 * grid.values**2 - LAMBDA_TRUE
        s2, lam = sigma_lambda_normal_equations(
            make_logcf(grid, re=y), build_base_weight(0.5), 8.0)
        assert s2 == pytest.approx(0.1, abs=1e-10)
        assert lam == pytest.approx(LAMBDA_TRUE, abs=1e-10)

    def test_zero_data(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        s2, lam = sigma_lambda_normal_equations(
            make_logcf(grid), build_base_weight(0.5), 8.0)
        assert s2 == 0.0 and lam == 0.0

    def test_noiseless_mixture_bias_small(self):
        # exact log-cf in, so the only error is the jump-transform leakage
        grid = UniformGrid(0.0, 8.0, 4096)
        logcf = exact_log_cf(TwoNormalMixture(0.75, 0.1, 0.5), grid)
        s2, lam = sigma_lambda_normal_equations(logcf, build_base_weight(0.5), 8.0)
        assert abs(s2 - 0.1) < 1e-2
        assert abs(lam - LAMBDA_TRUE) < 5e-2

    def test_grid_too_coarse(self):
        grid = UniformGrid(0.0, 2.0, 4096)
        with pytest.raises(GridTooCoarse):
            sigma_lambda_normal_equations(make_logcf(grid),
                                          build_base_weight(0.5), 8.0)

    def test_positive_scaling_invariance(self):
        class Scaled:
            def __init__(self, base, factor):
                self.base, self.factor = base, factor
                self.epsilon, self.kind = base.epsilon, base.kind

            def __call__(self, v):
                return self.factor * self.base(v)

        grid = UniformGrid(0.0, 8.0, 4096)
        logcf = exact_log_cf(TwoNormalMixture(0.75, 0.1, 0.5), grid)
        base = build_base_weight(0.5, "smooth_bump")
        ref = sigma_lambda_normal_equations(logcf, base, 8.0)
        scaled = sigma_lambda_normal_equations(logcf, Scaled(base, 7.25), 8.0)
        assert scaled[0] == pytest.approx(ref[0], rel=1e-12)
        assert scaled[1] == pytest.approx(ref[1], rel=1e-12)


class TestGamma:
    def test_linear_trend(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        g = gamma_normal_equation(make_logcf(grid, im=5.0 * grid.values),
                                  build_base_weight(0.5), 8.0)
        assert g == pytest.approx(5.0, abs=1e-10)

    def test_symmetric_zero(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        g = gamma_normal_equation(make_logcf(grid), build_base_weight(0.5), 8.0)
        assert g == 0.0

    def test_tail_perturbation_bias_shrinks(self):
        w = build_base_weight(0.5)
        biases = []
        for V in (4.0, 8.0, 16.0):
            grid = UniformGrid(0.0, V, 4096)
            u = grid.values
            im = 2.0 * u + np.sinc(u / np.pi)  # sin(u)/u
            got = gamma_normal_equation(make_logcf(grid, im=im), w, V)
            # independent quadrature of the weighted projection of sin(u)/u
            num = quad(lambda t: t * np.sin(t) / t, 0.5 * V, V, limit=200)[0]
            den = quad(lambda t: t * t, 0.5 * V, V)[0]
            assert got - 2.0 == pytest.approx(num / den, rel=5e-3)
            biases.append(abs(got - 2.0))
        assert biases[0] > biases[1] > biases[2]


class TestDerivedFamilies:
    @pytest.mark.parametrize("kind", ["indicator", "smooth_bump"])
    @pytest.mark.parametrize("epsilon", [0.25, 0.5])
    @pytest.mark.parametrize("U", [1.0, 8.0])
    def test_moment_identities(self, kind, epsilon, U):
        checks = derived_weight_identities(build_base_weight(epsilon, kind), U)
        s0, s1 = checks["check_sigma"]
        l0, l1 = checks["check_lambda"]
        assert abs(s0) < 1e-8 and abs(s1 - 1.0) < 1e-8
        assert abs(l0 - 1.0) < 1e-8 and abs(l1) < 1e-8
        assert abs(checks["check_gamma"] - 1.0) < 1e-8

    def test_scaling_laws(self):
        # w_sigma2 scales as U^-3, w_lambda as U^-1, w_gamma as U^-2
        w = build_base_weight(0.5, "smooth_bump")
        count = 2049
        big_U = 8.0
        fam_unit = derived_families(w, 1.0, UniformGrid(0.0, 1.0, count))
        fam_big = derived_families(w, big_U, UniformGrid(0.0, big_U, count))
        for (unit, big), power in zip(zip(fam_unit, fam_big), (3.0, 1.0, 2.0)):
            np.testing.assert_allclose(big, unit / big_U**power,
                                       rtol=1e-10, atol=1e-14)

    def test_printed_form_matches_normal_equations(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        w = build_base_weight(0.5)
        y = -0.5 * 0.37 * grid.values**2 - 0.11
        s2, _ = sigma_lambda_normal_equations(make_logcf(grid, re=y), w, 8.0)
        kernel = sigma2_weight_printed_form(w, 8.0, grid)
        via_kernel = float(np.sum(trapezoid_weights(grid) * kernel * y))
        assert via_kernel == pytest.approx(s2, abs=1e-8)

    def test_family_vs_normal_equation_estimates(self):
        grid = UniformGrid(0.0, 8.0, 4096)
        w = build_base_weight(0.5)
        rng = np.random.Generator(np.random.Philox(key=11))
        y = -0.05 * grid.values**2 - 0.3 + 0.01 * rng.standard_normal(grid.count)
        s2, lam = sigma_lambda_normal_equations(make_logcf(grid, re=y), w, 8.0)
        w_s2, w_lam, _ = derived_families(w, 8.0, grid)
        c = trapezoid_weights(grid)
        assert float(np.sum(c * w_s2 * y)) == pytest.approx(s2, rel=1e-10)
        assert float(np.sum(c * w_lam * y)) == pytest.approx(lam, rel=1e-10)


def test_weight_on_grid_band():
    grid = UniformGrid(0.0, 8.0, 4096)
    wu = weight_on_grid(build_base_weight(0.5), 8.0, grid)
    u = grid.values
    assert np.all(wu[(u >= 4.0) & (u <= 8.0)] == 1.0 / 8.0)
    assert np.all(wu[u < 4.0] == 0.0)
