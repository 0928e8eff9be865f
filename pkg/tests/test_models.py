import math

import numpy as np
import pytest
from scipy.integrate import quad

from qidinfer.charfn import ecf_on_grid, exact_cf, h_validity_check
from qidinfer.core import UniformGrid, trapezoid_integrate
from qidinfer.errors import BadSpec, SeriesNotConverged, UnsupportedSpec
from qidinfer.models import (BartSimpsonModified, NuTildeSeriesConfig, PureNormal,
                             StudentPlusNormalMixture, TwoNormalMixture,
                             exact_density, exact_g_circ, exact_triplet,
                             main_variance, main_weight, model_from_dict,
                             model_to_dict, nu_tilde_density, nu_tilde_term_count,
                             sample_model)

MIX = TwoNormalMixture(0.75, 0.1, 0.5)
BART = BartSimpsonModified(0.001, 0.05, 0.1)
STUDENT = StudentPlusNormalMixture(0.75, 3, 0.2, 0.5)
ALL_MIXTURES = [MIX, BART, STUDENT]


class TestSpecValidation:
    def test_two_normal_constraints(self):
        with pytest.raises(BadSpec):
            TwoNormalMixture(0.4, 0.1, 0.5)
        with pytest.raises(BadSpec):
            TwoNormalMixture(0.75, 0.5, 0.1)

    def test_bart_constraints(self):
        with pytest.raises(BadSpec):
            BartSimpsonModified(0.0, 0.05, 0.1)
        with pytest.raises(BadSpec):
            BartSimpsonModified(0.001, 0.1, 0.05)

    def test_student_constraints(self):
        with pytest.raises(BadSpec):
            StudentPlusNormalMixture(0.75, 2, 0.2, 0.5)
        with pytest.raises(BadSpec):
            StudentPlusNormalMixture(0.75, 3, 0.5, 0.2)

    def test_roundtrip_serialization(self):
        for spec in [PureNormal(0.3)] + ALL_MIXTURES:
            assert model_from_dict(model_to_dict(spec)) == spec

    def test_unknown_variant(self):
        with pytest.raises(BadSpec):
            model_from_dict({"variant": "cauchy"})


class TestSampling:
    def test_empty(self):
        s = sample_model(MIX, 0, seed=1)
        assert s.n == 0

    def test_deterministic(self):
        a = sample_model(STUDENT, 1000, seed=99)
        b = sample_model(STUDENT, 1000, seed=99)
        np.testing.assert_array_equal(a.values, b.values)
        c = sample_model(STUDENT, 1000, seed=100)
        assert not np.array_equal(a.values, c.values)

    def test_pure_normal_variance(self):
        n = 10**5
        s = sample_model(PureNormal(0.3), n, seed=3)
        assert abs(np.var(s.values) - 0.3) < 3.0 * math.sqrt(2.0 / n) * 0.3

    def test_mixture_second_moment(self):
        n = 10**5
        s = sample_model(MIX, n, seed=4)
        # closed form: 0.75 * 0.1 + 0.25 * 0.5 = 0.2
        assert np.var(s.values) == pytest.approx(0.2, abs=6e-3)

    def test_bart_range(self):
        s = sample_model(BART, 10**4, seed=5)
        # means live on {-1,...,1} with sd 0.1 contaminant, 0.05 main
        assert np.max(np.abs(s.values)) < 2.0
        assert np.var(s.values) == pytest.approx(
            BART.p * 0.0025 + (1 - BART.p) * (0.01 + 0.5), abs=2e-2)


class TestDensities:
    def test_pure_normal_mode(self):
        g = UniformGrid(-1.0, 1.0, 201)
        d = exact_density(PureNormal(0.3), g)
        assert d.values[100] == pytest.approx(1.0 / math.sqrt(2 * math.pi * 0.3))

    def test_bart_five_spikes(self):
        g = UniformGrid(-1.5, 1.5, 3001)
        d = exact_density(BART, g)
        v = d.values
        peaks = [g.values[i] for i in range(1, 3000)
                 if v[i] > v[i - 1] and v[i] > v[i + 1]]
        assert len(peaks) == 5
        np.testing.assert_allclose(sorted(peaks), [-1.0, -0.5, 0.0, 0.5, 1.0],
                                   atol=0.02)

    def test_mixture_density_integrates_to_one(self):
        g = UniformGrid(-6.0, 6.0, 4001)
        d = exact_density(MIX, g)
        assert trapezoid_integrate(d.values, g) == pytest.approx(1.0, abs=1e-8)

    def test_mixture_identity(self):
        # full density == p * N(0, s1) + (1-p) * contaminant, node-wise
        g = UniformGrid(-5.0, 5.0, 1001)
        for spec in ALL_MIXTURES:
            d = exact_density(spec, g).values
            circ = exact_g_circ(spec, g).values
            p = main_weight(spec)
            s1 = main_variance(spec)
            phi = np.exp(-0.5 * g.values**2 / s1) / math.sqrt(2 * math.pi * s1)
            np.testing.assert_allclose(d, p * phi + (1 - p) * circ, atol=1e-12)

    def test_g_circ_two_normal(self):
        g = UniformGrid(-4.0, 4.0, 801)
        circ = exact_g_circ(MIX, g)
        expected = np.exp(-g.values**2) / math.sqrt(math.pi)  # N(0, 0.5)
        np.testing.assert_allclose(circ.values, expected, rtol=1e-12)

    def test_g_circ_student_symmetric_unimodal(self):
        g = UniformGrid(-8.0, 8.0, 1601)
        circ = exact_g_circ(STUDENT, g)
        np.testing.assert_allclose(circ.values, circ.values[::-1], atol=1e-10)
        mid = np.argmax(circ.values)
        assert g.values[mid] == pytest.approx(0.0, abs=1e-9)
        assert np.all(np.diff(circ.values[:mid]) > -1e-12)

    def test_g_circ_student_integrates_to_one(self):
        g = UniformGrid(-60.0, 60.0, 12001)
        circ = exact_g_circ(STUDENT, g)
        # t(3) tails decay like x^-4; the window truncation loss is ~1e-5
        assert trapezoid_integrate(circ.values, g) == pytest.approx(1.0, abs=1e-4)

    def test_g_circ_unsupported(self):
        with pytest.raises(UnsupportedSpec):
            exact_g_circ(PureNormal(0.3), UniformGrid(-1, 1, 11))


class TestNuTilde:
    def test_total_mass(self):
        g = UniformGrid(-35.0, 35.0, 7001)
        curve = nu_tilde_density(MIX, g)
        assert trapezoid_integrate(curve.values, g) == pytest.approx(
            math.log(4.0 / 3.0), abs=1e-9)
        assert math.log(4.0 / 3.0) == pytest.approx(0.287682, abs=1e-6)

    def test_matches_manual_series(self):
        g = UniformGrid(-20.0, 20.0, 2001)
        cfg = NuTildeSeriesConfig()
        curve = nu_tilde_density(MIX, g, cfg)
        terms = nu_tilde_term_count(0.75, cfg)
        x = g.values
        manual = np.zeros_like(x)
        for m in range(1, terms + 1):
            v = m * 0.4
            weight = (-1.0) ** (m + 1) * (1.0 / 3.0) ** m / m
            manual += weight * np.exp(-0.5 * x * x / v) / math.sqrt(2 * math.pi * v)
        np.testing.assert_allclose(curve.values, manual, rtol=1e-10, atol=1e-15)
        # third term weight is (1/3)^3 / 3 = 1/81
        assert (1.0 / 3.0) ** 3 / 3.0 == pytest.approx(1.0 / 81.0)

    def test_weight_near_one_vanishes(self):
        g = UniformGrid(-5.0, 5.0, 101)
        curve = nu_tilde_density(TwoNormalMixture(1.0 - 1e-13, 0.1, 0.5), g)
        np.testing.assert_array_equal(curve.values, 0.0)

    def test_series_not_converged_near_half(self):
        with pytest.raises(SeriesNotConverged):
            nu_tilde_density(TwoNormalMixture(0.501, 0.0025, 0.01),
                             UniformGrid(-5, 5, 101))

    def test_unsupported_latent_measure(self):
        with pytest.raises(UnsupportedSpec):
            nu_tilde_density(BART, UniformGrid(-5, 5, 101))


class TestTriplet:
    def test_pure_normal(self):
        t = exact_triplet(PureNormal(0.3))
        assert (t.gamma_star, t.sigma2, t.lambda_star, t.p) == (0.0, 0.3, 0.0, 1.0)

    def test_two_normal(self):
        t = exact_triplet(MIX)
        assert t.sigma2 == 0.1
        assert t.lambda_star == pytest.approx(-math.log(0.75))
        assert t.p == 0.75
        assert t.gamma_star == 0.0

    def test_bart(self):
        t = exact_triplet(BART)
        assert t.sigma2 == pytest.approx(0.0025)
        assert t.lambda_star == pytest.approx(-math.log(0.501))
        assert t.p == pytest.approx(0.501)


class TestCfAgainstSamples:
    @pytest.mark.parametrize("spec", [PureNormal(0.3)] + ALL_MIXTURES,
                             ids=["normal", "two_normal", "bart", "student"])
    def test_ecf_matches_exact_cf(self, spec):
        n = 10**6
        grid = UniformGrid(0.0, 8.0, 257)
        sample = sample_model(spec, n, seed=2024)
        emp = ecf_on_grid(sample, grid)
        ex = exact_cf(spec, grid)
        assert np.max(np.abs(emp.values - ex.values)) < 5.0 / math.sqrt(n)

    def test_student_cf_general_dof_against_quadrature(self):
        from qidinfer.models import _student_t_cf
        from scipy import stats

        dist = stats.t(df=5)
        for u in (0.5, 1.7, 3.0):
            oracle = quad(lambda x: math.cos(u * x) * dist.pdf(x),
                          0, 300, limit=400)[0] * 2.0
            assert _student_t_cf(np.array([u]), 5)[0] == pytest.approx(
                oracle, abs=1e-6)


def test_bart_h_necessary_condition_holds():
    # the modified-claw latent measure passes the |H| <= 1 screen
    g = UniformGrid(0.0, 50.0, 4096)
    from qidinfer.models import contaminant_cf
    from qidinfer.charfn import ComplexSeries

    series = ComplexSeries(g, contaminant_cf(BART, g.values))
    res = h_validity_check(series, sigma2=0.0025)
    assert res.passes_necessary
