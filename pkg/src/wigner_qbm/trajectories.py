"""Stationary trajectory pairs of the propagating-function saddle point.

The sum coordinate q = (q+ + q-)/2 obeys the damped classical equation,
the difference qt = q+ - q- the anti-damped one, so a pair is fixed by
boundary data (q', qt') at s = 0 and (q'', qt'') at s = t:

    q(s)  = q'  G-(t-s)/G-(t) + q''  G+(s)/G+(t)
    qt(s) = qt' G+(t-s)/G+(t) + qt'' G-(s)/G-(t).

Pairs are closed-form evaluators; sampling is the caller's choice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CausticError, FitWindowError
from .model import OVERDAMPED, UNDERDAMPED, GreenPair, PhasePoint

# guard for fit windows that collapse onto a near-zero of the separation
_SEP_FLOOR = 1e-12


@dataclass(frozen=True)
class TrajectoryPair:
    green: GreenPair
    q_prime: float
    qt_prime: float
    q_dprime: float
    qt_dprime: float
    t_final: float

    def _check_s(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(s > self.t_final * (1 + 1e-12)):
            raise ValueError("s must lie in [0, t_final]")
        return s

    def q(self, s):
        s = self._check_s(s)
        g = self.green
        t = self.t_final
        return (self.q_prime * g.g_minus(t - s) / g.g_minus(t)
                + self.q_dprime * g.g_plus(s) / g.g_plus(t))

    def q_dot(self, s):
        s = self._check_s(s)
        g = self.green
        t = self.t_final
        return (-self.q_prime * g.g_minus_dot(t - s) / g.g_minus(t)
                + self.q_dprime * g.g_plus_dot(s) / g.g_plus(t))

    def qt(self, s):
        s = self._check_s(s)
        g = self.green
        t = self.t_final
        return (self.qt_prime * g.g_plus(t - s) / g.g_plus(t)
                + self.qt_dprime * g.g_minus(s) / g.g_minus(t))

    def qt_dot(self, s):
        s = self._check_s(s)
        g = self.green
        t = self.t_final
        return (-self.qt_prime * g.g_plus_dot(t - s) / g.g_plus(t)
                + self.qt_dprime * g.g_minus_dot(s) / g.g_minus(t))

    def q_plus(self, s):
        return self.q(s) + 0.5 * self.qt(s)

    def q_minus(self, s):
        return self.q(s) - 0.5 * self.qt(s)

    def p_plus(self, s):
        return self.green.params.m * (self.q_dot(s) + 0.5 * self.qt_dot(s))

    def p_minus(self, s):
        return self.green.params.m * (self.q_dot(s) - 0.5 * self.qt_dot(s))


def stationary_pair(qp: float, qtp: float, qpp: float, qtpp: float,
                    t: float, green: GreenPair) -> TrajectoryPair:
    """Pair with q(0) = qp, qt(0) = qtp, q(t) = qpp, qt(t) = qtpp."""
    if t <= 0:
        raise ValueError("t must be positive")
    if green.is_near_caustic(t):
        raise CausticError(f"t = {t} lies within the caustic exclusion window")
    return TrajectoryPair(green=green, q_prime=qp, qt_prime=qtp,
                          q_dprime=qpp, qt_dprime=qtpp, t_final=t)


def phase_space_lift(pair: TrajectoryPair, s):
    """(r+, r-, r_sum) at time s; r_sum = (r+ + r-)/2 follows the damped
    classical flow."""
    p_pl = float(pair.p_plus(s))
    p_mi = float(pair.p_minus(s))
    q_pl = float(pair.q_plus(s))
    q_mi = float(pair.q_minus(s))
    r_plus = PhasePoint(p=p_pl, q=q_pl)
    r_minus = PhasePoint(p=p_mi, q=q_mi)
    r_sum = PhasePoint(p=0.5 * (p_pl + p_mi), q=0.5 * (q_pl + q_mi))
    return r_plus, r_minus, r_sum


def pair_invariant(pair: TrajectoryPair, s):
    """First integral of the coupled pair dynamics:
    q' qt - q qt' + gamma q qt, constant along any stationary pair."""
    gamma = pair.green.gamma
    return (pair.q_dot(s) * pair.qt(s) - pair.q(s) * pair.qt_dot(s)
            + gamma * pair.q(s) * pair.qt(s))


def separation_rate(pair: TrajectoryPair, n_samples: int = 4001) -> float:
    """Least-squares growth rate of the |r+ - r-| envelope; gamma/2 for an
    underdamped pair, gamma/2 + kappa when overdamped."""
    t = pair.t_final
    gamma = pair.green.gamma
    if gamma > 0 and t < 5.0 / gamma:
        raise FitWindowError("window shorter than 5/gamma gives a meaningless fit")
    s = np.linspace(0.0, t, n_samples)
    sep = np.hypot(pair.p_plus(s) - pair.p_minus(s), pair.q_plus(s) - pair.q_minus(s))
    scale = float(np.max(sep))
    if scale == 0.0:
        raise FitWindowError("identical trajectories have no separation to fit")
    if pair.green.regime == UNDERDAMPED:
        # envelope through interior local maxima of |r+ - r-|
        interior = (sep[1:-1] >= sep[:-2]) & (sep[1:-1] >= sep[2:])
        idx = np.flatnonzero(interior) + 1
        if idx.size < 3:
            raise FitWindowError("fewer than 3 envelope peaks in the window")
        if np.any(sep[idx] < _SEP_FLOOR * scale):
            raise FitWindowError("envelope touches a near-zero inside the window")
        x, y = s[idx], np.log(sep[idx])
    else:
        # no oscillation: fit the tail directly
        mask = s > 0.5 * t
        if np.any(sep[mask] < _SEP_FLOOR * scale):
            raise FitWindowError("separation touches a near-zero inside the window")
        x, y = s[mask], np.log(sep[mask])
    slope = np.polyfit(x, y, 1)[0]
    return float(slope)
