import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wigner_qbm.errors import CausticError
from wigner_qbm.model import (
    CRITICAL,
    OVERDAMPED,
    UNDERDAMPED,
    DampingSpec,
    PhasePoint,
    SystemParams,
    caustics,
    classical_map,
    make_green_pair,
)

from reference import fd_second, ode_damped_flow, ode_green

P = SystemParams()


def green(gamma):
    return make_green_pair(P, DampingSpec(gamma=gamma))


class TestGreenPair:
    def test_undamped_quarter_period(self):
        assert float(green(0.0).g_plus(np.pi / 2)) == pytest.approx(1.0, abs=1e-15)

    def test_critical_limit(self):
        g = green(2.0)
        assert g.regime == CRITICAL
        assert float(g.g_plus(1.0)) == pytest.approx(np.exp(-1.0), rel=1e-14)

    def test_against_ode_integration(self):
        g = green(0.3)
        ts = np.array([0.5, 1.0, 2.0, 5.0])
        ref_g, ref_gd = ode_green(0.3, 1.0, ts)
        assert g.g_plus(ts) == pytest.approx(ref_g, rel=1e-10)
        assert g.g_plus_dot(ts) == pytest.approx(ref_gd, rel=1e-10)

    def test_anti_damped_branch(self):
        g = green(0.3)
        ts = np.array([0.5, 2.0])
        ref_g, ref_gd = ode_green(0.3, 1.0, ts, anti=True)
        assert g.g_minus(ts) == pytest.approx(ref_g, rel=1e-10)
        assert g.g_minus_dot(ts) == pytest.approx(ref_gd, rel=1e-10)

    def test_initial_conditions_exact(self):
        for gamma in (0.0, 0.3, 2.0, 3.0):
            g = green(gamma)
            assert float(g.g_plus(0.0)) == 0.0
            assert float(g.g_minus(0.0)) == 0.0
            assert float(g.g_plus_dot(0.0)) == 1.0
            assert float(g.g_minus_dot(0.0)) == 1.0

    @settings(max_examples=40, deadline=None)
    @given(gamma=st.floats(0.0, 3.5), t=st.floats(0.01, 8.0))
    def test_ode_residual_finite_differences(self, gamma, t):
        g = green(gamma)
        h = 2e-3
        for gp, gpd, sign in ((g.g_plus, g.g_plus_dot, 1.0),
                              (g.g_minus, g.g_minus_dot, -1.0)):
            def f(x):
                return float(gp(x))
            res = fd_second(f, t + 2 * h, h) + sign * gamma * float(gpd(t + 2 * h)) \
                + float(gp(t + 2 * h))
            scale = max(abs(float(gp(t + 2 * h))), 1.0)
            assert abs(res) < 1e-8 * scale

    def test_regime_continuity_at_critical(self):
        lo = make_green_pair(P, DampingSpec(gamma=2.0 * (1 - 1e-6)))
        hi = make_green_pair(P, DampingSpec(gamma=2.0 * (1 + 1e-6)))
        for t in (0.3, 1.0, 4.0):
            a, b = float(lo.g_plus(t)), float(hi.g_plus(t))
            assert abs(a - b) <= 1e-4 * max(abs(a), abs(b))


class TestCaustics:
    def test_undamped_zeros_of_sine(self):
        cs = caustics(green(0.0), 10.0)
        assert cs.times == pytest.approx(np.pi * np.arange(1, 4), rel=1e-14)

    def test_overdamped_empty(self):
        assert caustics(green(3.0), 10.0).times.size == 0

    def test_underdamped_scaled_period(self):
        g = green(0.3)
        wd = np.sqrt(1 - 0.0225)
        cs = caustics(g, 7.0)
        assert cs.times == pytest.approx(np.pi / wd * np.arange(1, 3), rel=1e-14)

    def test_exclusion_window(self):
        g = green(0.3)
        cs = caustics(g, 10.0)
        assert cs.excludes(float(cs.times[0]) + 1e-8)
        assert not cs.excludes(1.0)


class TestClassicalMap:
    def test_undamped_rotation(self):
        t = 0.7
        m = classical_map(t, P, green(0.0))
        c, s = np.cos(t), np.sin(t)
        assert m == pytest.approx(np.array([[c, -s], [s, c]]), abs=1e-14)

    def test_initial_slip_exact(self):
        m = classical_map(0.0, P, green(0.3))
        r = m @ np.array([2.0, 1.5])
        assert r[0] == 2.0 - 0.3 * 1.5
        assert r[1] == 1.5

    def test_against_slipped_ode_flow(self):
        gamma, t = 0.3, 1.0
        m = classical_map(t, P, green(gamma))
        p0, q0 = 0.8, -1.1
        ref = ode_damped_flow(gamma, 1.0, 1.0, t, p0 - gamma * q0, q0)
        got = m @ np.array([p0, q0])
        assert got == pytest.approx(np.array(ref), rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(gamma=st.floats(0.0, 3.0), t=st.floats(0.05, 6.0))
    def test_determinant_is_contraction_factor(self, gamma, t):
        g = green(gamma)
        if g.is_near_caustic(t):
            return
        det = np.linalg.det(classical_map(t, P, g))
        assert det == pytest.approx(np.exp(-gamma * t), rel=1e-9)

    def test_caustic_rejected(self):
        g = green(0.3)
        t_caustic = np.pi / g.omega_d_or_kappa
        with pytest.raises(CausticError):
            classical_map(t_caustic, P, g)


class TestValidation:
    def test_positive_params_required(self):
        with pytest.raises(ValueError):
            SystemParams(m=-1.0)
        with pytest.raises(ValueError):
            SystemParams(beta=0.0)

    def test_negative_gamma_rejected(self):
        with pytest.raises(ValueError):
            DampingSpec(gamma=-0.1)

    def test_drude_needs_cutoff(self):
        with pytest.raises(ValueError):
            DampingSpec(kind="drude", gamma=0.3)

    def test_nonfinite_phase_point(self):
        with pytest.raises(ValueError):
            PhasePoint(p=np.nan, q=0.0)

    def test_drude_green_redirect(self):
        with pytest.raises(ValueError):
            make_green_pair(P, DampingSpec(kind="drude", gamma=0.3, omega_c=50.0))

    def test_overdamped_regime_tag(self):
        assert green(3.0).regime == OVERDAMPED
        assert green(0.3).regime == UNDERDAMPED
