"""Thermal position autocorrelation C(t) = S(t) + i A(t) for Drude damping.

Everything here is evaluated by residue decomposition.  The Laplace-domain
response of the damped oscillator with Drude friction gamma_hat(z) =
gamma wc / (z + wc) is

    Ghat(z) = (z + wc) / (z^3 + wc z^2 + (w0^2 + gamma wc) z + w0^2 wc),

a rational function with three stable poles z_j and residues r_j.  For
t >= 0 the symmetrized and antisymmetrized correlation functions read

    S(t) = -(hbar/2m) sum_j r_j cot(hbar beta z_j / 2) exp(z_j t)
           + (1/m beta) sum_{n>=1} [Ghat(nu_n) - Ghat(-nu_n)] exp(-nu_n t)

    A(t) = -(hbar/2m) sum_j r_j exp(z_j t),

with nu_n = 2 pi n/(hbar beta).  Time derivatives multiply each pole term
by its rate; no numerical differentiation is performed anywhere.  The
antisymmetric part carries no temperature dependence and recovers the
Green function through G+(t) = -(2m/hbar) A(t) for t >= 0.

Equilibrium second moments: <q^2> = S(0) and <p^2> = -m^2 S''(0).  The
Matsubara sum for S''(0) converges like 1/n^3; its tail (and the 1/n^5
tail of S(0)) is added in closed form through Hurwitz zeta functions,
using Ghat(nu) - Ghat(-nu) = 2 gamma wc^2 / nu^5 + O(1/nu^7).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import ConvergenceError, PoleDegeneracyError
from .model import DRUDE_OHMIC, DampingSpec, SystemParams

_MATS_CAP = 2_000_000


class DrudeGreenPair:
    """G+ and derivatives for Drude damping, from the response-pole sum.

    There is no elementary G- companion here: the anti-damped boundary
    machinery is specific to strict Ohmic friction.
    """

    def __init__(self, params: SystemParams, poles: np.ndarray, residues: np.ndarray):
        self.params = params
        self._z = poles
        self._r = residues

    def _sum(self, t, order: int):
        t = np.asarray(t, dtype=float)
        w = self._r * self._z**order
        return np.real(np.exp(np.multiply.outer(t, self._z)) @ w)

    def g_plus(self, t):
        return self._sum(t, 0)

    def g_plus_dot(self, t):
        return self._sum(t, 1)

    def g_plus_ddot(self, t):
        return self._sum(t, 2)

    def is_near_caustic(self, t: float, eps_c: float | None = None) -> bool:
        if eps_c is None:
            eps_c = 1e-6 / self.params.omega0
        if t <= 10.0 * eps_c:
            return False
        return bool(abs(self.g_plus(t)) < eps_c * abs(self.g_plus_dot(t)))


class DrudeCorrelation:
    """Pole data and evaluators for S, A and their derivatives."""

    def __init__(self, params: SystemParams, damping: DampingSpec,
                 n_matsubara: int | None = None):
        if damping.kind != DRUDE_OHMIC:
            raise ValueError("the autocorrelation machinery requires Drude damping")
        damping.warn_if_soft_cutoff(params)
        self.params = params
        self.damping = damping
        m, hbar, beta = params.m, params.hbar, params.beta
        w0, gamma, wc = params.omega0, damping.gamma, damping.omega_c

        poly = np.array([1.0, wc, w0**2 + gamma * wc, w0**2 * wc])
        z = np.roots(poly)
        scale = max(abs(z).max(), w0)
        # an exact double root splits by ~sqrt(eps) under the companion
        # eigensolve, so the guard must trip well above 1e-10
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(z[i] - z[j]) < 1e-7 * scale:
                    raise PoleDegeneracyError(
                        "two response poles coincide (within root-finding "
                        "accuracy); perturb gamma or omega_c slightly"
                    )
        r = np.array([
            (z[j] + wc) / np.prod([z[j] - z[k] for k in range(3) if k != j])
            for j in range(3)
        ])
        self._z = z
        self._r = r
        self._cot = 1.0 / np.tan(0.5 * hbar * beta * z)

        self._nu1 = 2.0 * math.pi / (hbar * beta)
        n = self._choose_order(n_matsubara)
        self.n_matsubara = n
        nu = self._nu1 * np.arange(1, n + 1)
        den_p = np.polyval(poly, nu)
        den_m = np.polyval(poly, -nu)
        bad = np.abs(den_m) < 1e-10 * nu**3
        if np.any(bad):
            raise PoleDegeneracyError(
                "a Matsubara frequency coincides with a response pole; "
                "perturb beta or omega_c slightly"
            )
        self._nu = nu
        self._dG = (nu + wc) / den_p - (-nu + wc) / den_m

        # moments with Hurwitz-zeta tail corrections of the 1/nu^5 asymptote
        a5 = 2.0 * gamma * wc**2
        tail_w = a5 / self._nu1**5 * float(zeta(5, n + 1))
        tail_w2 = a5 / self._nu1**3 * float(zeta(3, n + 1))
        pole_s0 = -(hbar / (2 * m)) * np.sum(r * self._cot)
        pole_s2 = -(hbar / (2 * m)) * np.sum(r * z**2 * self._cot)
        self.q2_eq = float(np.real(pole_s0) + (np.sum(self._dG) + tail_w) / (m * beta))
        self.p2_eq = float(-(m**2) * (
            np.real(pole_s2) + (np.sum(self._nu**2 * self._dG) + tail_w2) / (m * beta)
        ))

    def _choose_order(self, n_matsubara):
        if n_matsubara is not None:
            if n_matsubara < 1:
                raise ValueError("Matsubara order must be >= 1")
            return int(n_matsubara)
        # the zeta tail corrections assume the 1/nu^5 asymptote holds past
        # nu_n ~ wc; 8192 terms keep the *uncorrected* S''(0) sum within
        # ~1e-9 of the corrected moment, so S and the stored moments agree
        n = max(8192, int(16.0 * self.damping.omega_c / self._nu1) + 1)
        if n > _MATS_CAP:
            raise ConvergenceError(
                f"required Matsubara order {n} exceeds the cap {_MATS_CAP}"
            )
        return n

    def _pole_part(self, t, order: int):
        w = self._r * self._z**order * self._cot
        val = np.exp(np.multiply.outer(np.asarray(t, float), self._z)) @ w
        return -(self.params.hbar / (2 * self.params.m)) * np.real(val)

    def _mats_part(self, t, order: int):
        t = np.asarray(t, dtype=float)
        x = np.minimum(np.multiply.outer(t, self._nu), 745.0)
        w = (-self._nu) ** order * self._dG
        return (np.exp(-x) @ w) / (self.params.m * self.params.beta)

    def S(self, t, deriv: int = 0):
        """Symmetrized correlation <{q(t), q(0)}>/2 or its time derivatives."""
        if np.any(np.asarray(t) < 0):
            raise ValueError("S is evaluated for t >= 0 (it is even in t)")
        return self._pole_part(t, deriv) + self._mats_part(t, deriv)

    def A(self, t, deriv: int = 0):
        """Antisymmetrized correlation (imaginary part of C) for t >= 0."""
        if np.any(np.asarray(t) < 0):
            raise ValueError("A is evaluated for t >= 0 (it is odd in t)")
        t = np.asarray(t, dtype=float)
        w = self._r * self._z**deriv
        val = np.exp(np.multiply.outer(t, self._z)) @ w
        return -(self.params.hbar / (2 * self.params.m)) * np.real(val)

    def green_pair(self) -> DrudeGreenPair:
        return DrudeGreenPair(self.params, self._z, self._r)


@dataclass(frozen=True)
class CorrelationTable:
    """Sampled S, A and derivatives on a time grid plus equilibrium moments."""

    t: np.ndarray
    S: np.ndarray
    S_dot: np.ndarray
    S_ddot: np.ndarray
    A: np.ndarray
    A_dot: np.ndarray
    q2_eq: float
    p2_eq: float
    source: DrudeCorrelation = field(repr=False)

    def covers(self, t: float) -> bool:
        return 0.0 <= t <= float(self.t[-1]) * (1.0 + 1e-12)


def autocorrelation(tgrid, params: SystemParams, damping: DampingSpec,
                    n_matsubara: int | None = None) -> CorrelationTable:
    """Sample the thermal autocorrelation machinery on a grid.

    The grid must be strictly increasing and start at 0.
    """
    t = np.asarray(tgrid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ValueError("tgrid must be a 1-d array")
    if t[0] != 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0)):
        raise ValueError("tgrid must be strictly increasing from 0")
    corr = DrudeCorrelation(params, damping, n_matsubara=n_matsubara)
    return CorrelationTable(
        t=t,
        S=corr.S(t),
        S_dot=corr.S(t, 1),
        S_ddot=corr.S(t, 2),
        A=corr.A(t),
        A_dot=corr.A(t, 1),
        q2_eq=corr.q2_eq,
        p2_eq=corr.p2_eq,
        source=corr,
    )


def green_from_antisymmetric(table: CorrelationTable, params: SystemParams):
    """Sampled G+ and G+' recovered from the antisymmetric correlation,
    G+(t) = -(2m/hbar) A(t) for t >= 0."""
    f = -2.0 * params.m / params.hbar
    return f * table.A, f * table.A_dot


def drude_green_pair(params: SystemParams, damping: DampingSpec) -> DrudeGreenPair:
    """Evaluator for the Drude G+ family (response-pole representation)."""
    return DrudeCorrelation(params, damping, n_matsubara=64).green_pair()
