import numpy as np
import pytest

from wigner_qbm.correlation import (
    DrudeCorrelation,
    autocorrelation,
    drude_green_pair,
    green_from_antisymmetric,
)
from wigner_qbm.errors import PoleDegeneracyError
from wigner_qbm.model import DampingSpec, SystemParams, make_green_pair

from reference import brute_correlation, brute_moments, fd_first, fd_second

P = SystemParams(beta=0.2)
DRUDE = DampingSpec(kind="drude", gamma=0.3, omega_c=50.0)


def table(params=P, damping=DRUDE, tmax=10.0):
    return autocorrelation(np.linspace(0.0, tmax, 21), params, damping)


class TestMoments:
    def test_against_brute_quadrature(self):
        corr = DrudeCorrelation(P, DRUDE)
        q2, p2 = brute_moments(P, DRUDE)
        assert corr.q2_eq == pytest.approx(q2, rel=1e-8)
        assert corr.p2_eq == pytest.approx(p2, rel=1e-8)

    def test_mass_convention_against_brute_quadrature(self):
        params = SystemParams(m=2.0, beta=0.7)
        corr = DrudeCorrelation(params, DRUDE)
        q2, p2 = brute_moments(params, DRUDE)
        assert corr.q2_eq == pytest.approx(q2, rel=1e-8)
        assert corr.p2_eq == pytest.approx(p2, rel=1e-8)

    def test_classical_equipartition(self):
        params = SystemParams(beta=0.05)
        corr = DrudeCorrelation(params, DRUDE)
        assert corr.q2_eq == pytest.approx(1.0 / 0.05, rel=0.01)

    def test_momentum_variance_grows_with_cutoff(self):
        p2 = [DrudeCorrelation(P, DampingSpec(kind="drude", gamma=0.3,
                                              omega_c=wc)).p2_eq
              for wc in (10.0, 50.0, 250.0)]
        assert p2[0] < p2[1] < p2[2]

    def test_ground_state_limit(self):
        params = SystemParams(beta=60.0)
        damping = DampingSpec(kind="drude", gamma=1e-4, omega_c=50.0)
        corr = DrudeCorrelation(params, damping)
        assert corr.q2_eq == pytest.approx(0.5, rel=1e-3)
        assert corr.p2_eq == pytest.approx(0.5, rel=1e-2)


class TestCorrelationFunctions:
    def test_against_brute_quadrature(self):
        corr = DrudeCorrelation(P, DRUDE)
        for t in (0.3, 1.0, 5.0):
            s_ref, a_ref = brute_correlation(t, P, DRUDE)
            assert float(corr.S(t)) == pytest.approx(s_ref, rel=1e-8)
            assert float(corr.A(t)) == pytest.approx(a_ref, rel=1e-8)

    def test_free_oscillator_limit(self):
        damping = DampingSpec(kind="drude", gamma=1e-8, omega_c=50.0)
        corr = DrudeCorrelation(P, damping)
        t = 1.3
        q2_free = 0.5 / np.tanh(0.1)
        assert float(corr.S(t)) == pytest.approx(q2_free * np.cos(t), rel=1e-6)
        assert float(corr.A(t)) == pytest.approx(-0.5 * np.sin(t), rel=1e-6)

    def test_antisymmetric_part_temperature_independent(self):
        hot = DrudeCorrelation(SystemParams(beta=0.2), DRUDE)
        cold = DrudeCorrelation(SystemParams(beta=5.0), DRUDE)
        ts = np.linspace(0.1, 8.0, 17)
        assert np.max(np.abs(hot.A(ts) - cold.A(ts))) < 1e-10

    def test_analytic_derivatives(self):
        corr = DrudeCorrelation(P, DRUDE)
        t0, h = 1.7, 1e-3
        s = lambda x: float(corr.S(x))
        assert float(corr.S(t0, 1)) == pytest.approx(fd_first(s, t0, h), rel=1e-8)
        assert float(corr.S(t0, 2)) == pytest.approx(fd_second(s, t0, h), rel=1e-6)


class TestTable:
    def test_construction_invariants(self):
        tab = table()
        m, hbar = P.m, P.hbar
        assert tab.S[0] == pytest.approx(tab.q2_eq, rel=1e-8)
        assert -(m**2) * tab.S_ddot[0] == pytest.approx(tab.p2_eq, rel=1e-8)
        assert abs(tab.A[0]) < 1e-14
        assert tab.A_dot[0] == pytest.approx(-hbar / (2 * m), rel=1e-12)

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            autocorrelation(np.array([0.5, 1.0]), P, DRUDE)
        with pytest.raises(ValueError):
            autocorrelation(np.array([0.0, 2.0, 1.0]), P, DRUDE)

    def test_requires_drude(self):
        with pytest.raises(ValueError):
            autocorrelation(np.linspace(0, 1, 5), P, DampingSpec(gamma=0.3))


class TestGreenRecovery:
    def test_commutator_normalization(self):
        tab = table()
        g, gd = green_from_antisymmetric(tab, P)
        assert abs(g[0]) < 1e-14
        assert gd[0] == pytest.approx(1.0, rel=1e-12)

    def test_free_limit_quarter_period(self):
        damping = DampingSpec(kind="drude", gamma=1e-8, omega_c=50.0)
        tab = autocorrelation(np.array([0.0, np.pi / 2]), P, damping)
        g, _ = green_from_antisymmetric(tab, P)
        assert g[1] == pytest.approx(1.0, rel=1e-6)

    def test_cutoff_extrapolation_to_strict_ohmic(self):
        strict = make_green_pair(P, DampingSpec(gamma=0.3))
        ts = np.linspace(0.0, 6.0, 13)
        devs = []
        for wc in (50.0, 500.0):
            gp = drude_green_pair(P, DampingSpec(kind="drude", gamma=0.3,
                                                 omega_c=wc))
            devs.append(np.max(np.abs(gp.g_plus(ts) - strict.g_plus(ts))))
        # O(1/wc) deviation: a tenfold cutoff increase shrinks it ~tenfold
        assert devs[0] < 0.02
        assert devs[1] < 0.2 * devs[0]

    def test_drude_green_solves_its_own_caustic_guard(self):
        gp = drude_green_pair(P, DRUDE)
        assert not gp.is_near_caustic(1.0)


class TestDegeneracy:
    def test_double_response_pole_detected(self):
        # roots {-1, -1, -3}: wc = 5, w0^2 = 3/5, gamma = (7 - w0^2)/wc
        w0 = np.sqrt(0.6)
        gamma = (7.0 - 0.6) / 5.0
        params = SystemParams(omega0=w0, beta=0.2)
        damping = DampingSpec(kind="drude", gamma=gamma, omega_c=5.0)
        with pytest.raises(PoleDegeneracyError):
            with pytest.warns(UserWarning):
                DrudeCorrelation(params, damping)
