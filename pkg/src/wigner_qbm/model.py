"""Physical parameters and the classical side of the damped oscillator.

Conventions used throughout the package:

* phase-space vectors are ordered ``r = (p, q)``;
* ``G+(t)`` solves ``x'' + gamma x' + omega0^2 x = 0`` with ``G+(0) = 0``,
  ``G+'(0) = 1`` (the damped Green function), and ``G-(t)`` solves the
  anti-damped equation ``x'' - gamma x' + omega0^2 x = 0`` with the same
  initial data.  In the underdamped regime

      G+-(t) = exp(-+ gamma t / 2) sin(omega_d t) / omega_d,
      omega_d^2 = omega0^2 - gamma^2 / 4.

The overdamped regime is the analytic continuation sin -> sinh with
kappa^2 = gamma^2/4 - omega0^2; at critical damping G+- = t exp(-+ gamma t/2).
All three regimes are evaluated through a single series-guarded kernel, so
G+- is continuous across gamma = 2 omega0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import CausticError

UNDERDAMPED = "underdamped"
CRITICAL = "critical"
OVERDAMPED = "overdamped"

STRICT_OHMIC = "ohmic"
DRUDE_OHMIC = "drude"

# series switch for |omega_d t| (or |kappa t|) below this value
_SERIES_CUT = 1e-4
# default caustic exclusion half-width, in units of 1/omega0
_EPS_CAUSTIC = 1e-6


def _require_positive(**fields):
    for name, value in fields.items():
        if not np.isfinite(value) or value <= 0.0:
            raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class SystemParams:
    """Mass, frequency, Planck constant and inverse temperature.

    Defaults are natural units m = hbar = omega0 = 1, beta in 1/(hbar omega0).
    """

    m: float = 1.0
    omega0: float = 1.0
    hbar: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        _require_positive(m=self.m, omega0=self.omega0, hbar=self.hbar, beta=self.beta)


@dataclass(frozen=True)
class DampingSpec:
    """Spectral-density model: strict Ohmic I(w) = m gamma w, or Drude-cutoff
    Ohmic I(w) = m gamma w wc^2 / (w^2 + wc^2)."""

    kind: str = STRICT_OHMIC
    gamma: float = 0.0
    omega_c: float | None = None

    def __post_init__(self):
        if self.kind not in (STRICT_OHMIC, DRUDE_OHMIC):
            raise ValueError(f"unknown damping kind {self.kind!r}")
        if not np.isfinite(self.gamma) or self.gamma < 0.0:
            raise ValueError(f"gamma must be >= 0 and finite, got {self.gamma!r}")
        if self.kind == DRUDE_OHMIC:
            if self.omega_c is None:
                raise ValueError("Drude damping requires omega_c")
            _require_positive(omega_c=self.omega_c)

    def warn_if_soft_cutoff(self, params: SystemParams):
        if self.kind == DRUDE_OHMIC and self.omega_c < 10.0 * params.omega0:
            warnings.warn(
                f"omega_c = {self.omega_c} is below the recommended 10*omega0;"
                " cutoff artifacts may be visible",
                stacklevel=3,
            )


@dataclass(frozen=True)
class PhasePoint:
    p: float
    q: float

    def __post_init__(self):
        if not (np.isfinite(self.p) and np.isfinite(self.q)):
            raise ValueError("phase-space components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.p, self.q], dtype=float)


def _f_kernel(u):
    """sin(sqrt(u))/sqrt(u), continued to sinh for u < 0, series near 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_CUT**2
    pos = (~small) & (u > 0)
    neg = (~small) & (u < 0)
    us = u[small]
    out[small] = 1.0 - us / 6.0 + us * us / 120.0 - us**3 / 5040.0
    sp = np.sqrt(u[pos])
    out[pos] = np.sin(sp) / sp
    sn = np.sqrt(-u[neg])
    out[neg] = np.sinh(sn) / sn
    return out


def _g_kernel(u):
    """cos(sqrt(u)), continued to cosh for u < 0, series near 0."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    small = np.abs(u) < _SERIES_CUT**2
    pos = (~small) & (u > 0)
    neg = (~small) & (u < 0)
    us = u[small]
    out[small] = 1.0 - us / 2.0 + us * us / 24.0 - us**3 / 720.0
    out[pos] = np.cos(np.sqrt(u[pos]))
    out[neg] = np.cosh(np.sqrt(-u[neg]))
    return out


@dataclass(frozen=True)
class GreenPair:
    """Evaluators for G+, G- and their time derivatives (strict Ohmic).

    ``regime`` is one of ``underdamped`` / ``critical`` / ``overdamped``;
    ``omega_d_or_kappa`` holds omega_d (underdamped), kappa (overdamped)
    or 0 (critical).
    """

    params: SystemParams
    gamma: float
    regime: str
    omega_d_or_kappa: float
    # omega_d^2 with sign: positive underdamped, negative overdamped
    wd2: float = field(repr=False, default=0.0)

    def _fg(self, t):
        t = np.asarray(t, dtype=float)
        u = self.wd2 * t * t
        return t * _f_kernel(u), _g_kernel(u)

    def g_plus(self, t):
        tf, _ = self._fg(t)
        return np.exp(-0.5 * self.gamma * np.asarray(t, dtype=float)) * tf

    def g_minus(self, t):
        tf, _ = self._fg(t)
        return np.exp(0.5 * self.gamma * np.asarray(t, dtype=float)) * tf

    def g_plus_dot(self, t):
        tf, g = self._fg(t)
        return np.exp(-0.5 * self.gamma * np.asarray(t, dtype=float)) * (
            g - 0.5 * self.gamma * tf
        )

    def g_minus_dot(self, t):
        tf, g = self._fg(t)
        return np.exp(0.5 * self.gamma * np.asarray(t, dtype=float)) * (
            g + 0.5 * self.gamma * tf
        )

    def g_plus_ddot(self, t):
        return -self.gamma * self.g_plus_dot(t) - self.params.omega0**2 * self.g_plus(t)

    def g_minus_ddot(self, t):
        return self.gamma * self.g_minus_dot(t) - self.params.omega0**2 * self.g_minus(t)

    def caustic_times(self, horizon: float) -> np.ndarray:
        """Zeros of G+ in (0, horizon]."""
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.regime != UNDERDAMPED:
            return np.array([])
        period = math.pi / self.omega_d_or_kappa
        n = int(math.floor(horizon / period))
        return period * np.arange(1, n + 1)

    def is_near_caustic(self, t: float, eps_c: float | None = None) -> bool:
        """True when t is within eps_c of a zero of G+ (t = 0 excluded)."""
        if eps_c is None:
            eps_c = _EPS_CAUSTIC / self.params.omega0
        if t <= 10.0 * eps_c:
            return False
        # |G+| < eps_c |G+'| is the time-distance condition near a simple zero
        return bool(abs(self.g_plus(t)) < eps_c * abs(self.g_plus_dot(t)))


@dataclass(frozen=True)
class CausticSet:
    """Ordered zeros of G+ within a horizon plus the exclusion half-width."""

    times: np.ndarray
    eps_c: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size and np.any(np.diff(t) <= 0):
            raise ValueError("caustic times must be strictly increasing")

    def nearest_distance(self, t: float) -> float:
        if self.times.size == 0:
            return math.inf
        return float(np.min(np.abs(self.times - t)))

    def excludes(self, t: float) -> bool:
        return self.nearest_distance(t) < self.eps_c


def make_green_pair(params: SystemParams, damping: DampingSpec) -> GreenPair:
    """Build the strict-Ohmic Green pair for the given parameters.

    Raises for Drude damping: the Drude Green function is not of the
    exp(-gamma t/2) sin form and lives in :mod:`wigner_qbm.correlation`.
    """
    if damping.kind != STRICT_OHMIC:
        raise ValueError(
            "make_green_pair handles strict Ohmic damping only; "
            "use correlation.drude_green_pair for Drude damping"
        )
    gamma = float(damping.gamma)
    w0 = params.omega0
    wd2 = w0 * w0 - 0.25 * gamma * gamma
    if abs(wd2) < (w0 * 1e-12) ** 2:
        return GreenPair(params, gamma, CRITICAL, 0.0, 0.0)
    if wd2 > 0:
        return GreenPair(params, gamma, UNDERDAMPED, math.sqrt(wd2), wd2)
    return GreenPair(params, gamma, OVERDAMPED, math.sqrt(-wd2), wd2)


def caustics(green: GreenPair, horizon: float, eps_c: float | None = None) -> CausticSet:
    """All zeros of G+ in (0, horizon]."""
    if eps_c is None:
        eps_c = _EPS_CAUSTIC / green.params.omega0
    return CausticSet(times=green.caustic_times(horizon), eps_c=eps_c)


def classical_map(t: float, params: SystemParams, green) -> np.ndarray:
    """Linear map M(t) with r_cl(t) = M(t) r' for the damped flow with the
    factorizing-preparation momentum slip.

    In (p, q) ordering

        M = [[G+'(t),   m G+''(t)],
             [G+(t)/m,  G+'(t)  ]].

    The momentum-position entry equals the printed combination
    m [ (G+')^2/G+ - 1/G- ]; the second-derivative form is algebraically
    identical and stays finite at the caustics and at t = 0, where it
    reproduces the initial slip p(0+) = p' - m gamma q' exactly.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if not np.isfinite(t):
        raise ValueError("t must be finite")
    if green.is_near_caustic(t):
        raise CausticError(f"t = {t} lies within the caustic exclusion window")
    gp = float(green.g_plus(t))
    gpd = float(green.g_plus_dot(t))
    gpdd = float(green.g_plus_ddot(t))
    m = params.m
    return np.array([[gpd, m * gpdd], [gp / m, gpd]])
