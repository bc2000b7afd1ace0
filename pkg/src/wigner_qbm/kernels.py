"""Spectral density, friction kernel and the real noise kernel K'(t).

The noise kernel is the cosine transform of the spectral density weighted by
the thermal factor,

    K'(t) = int_0^inf dw/pi I(w) coth(beta hbar w / 2) cos(w t),

and is the symmetrized correlation function of the bath force divided by
hbar.  Two forms are provided:

``high-t``
    K'(t) = (2 m gamma / hbar beta) delta(t).  Only the strength is
    reported; the delta is never evaluated pointwise.

``drude``
    The exact kernel for Drude-cutoff Ohmic damping, evaluated by residues:

        K'(t) = (m gamma wc^2 / 2) cot(hbar beta wc / 2) exp(-wc t)
              + (2 m gamma wc^2 / hbar beta)
                sum_n nu_n / (nu_n^2 - wc^2) exp(-nu_n t),

    with bosonic Matsubara frequencies nu_n = 2 pi n / (hbar beta).  The
    1/nu_n part of the slowly converging sum is resummed into
    -(m gamma wc^2 / pi) log(1 - exp(-nu_1 t)), which carries the
    logarithmic short-time divergence; the wc^2/nu_n^3 part is resummed
    through the trilogarithm.  What remains converges like 1/n^5 uniformly
    in t and is truncated by an explicit tail bound.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceError, PoleDegeneracyError, StrictOhmicDeltaError
from .model import DRUDE_OHMIC, STRICT_OHMIC, DampingSpec, SystemParams

HIGH_T_DELTA = "high-t"
EXACT_DRUDE = "drude"

_ORDER_CAP = 100_000
_DEFAULT_TAIL_TOL = 1e-9

_ZETA3 = 1.2020569031595942854
_ZETA2 = 1.6449340668482264365


def _li3_exp(mu):
    """Li3(exp(-mu)) for mu > 0, vectorized.

    Direct power series for mu >= 1/2; for smaller mu the expansion
    Li3(e^-mu) = zeta(3) - zeta(2) mu + (3 - 2 ln mu) mu^2/4 + mu^3/12
                 - mu^4/288 + mu^6/86400 - ...
    (accurate to ~1e-13 at mu = 1/2).
    """
    mu = np.asarray(mu, dtype=float)
    out = np.empty_like(mu)
    small = mu < 0.5
    ms = mu[small]
    out[small] = (
        _ZETA3
        - _ZETA2 * ms
        + (3.0 - 2.0 * np.log(ms)) * ms**2 / 4.0
        + ms**3 / 12.0
        - ms**4 / 288.0
        + ms**6 / 86400.0
        - ms**8 / 10160640.0
    )
    q = np.exp(-mu[~small])
    n = np.arange(1, 36)
    out[~small] = (q[..., None] ** n / n**3).sum(axis=-1)
    return out


def spectral_density(omega, damping: DampingSpec, params: SystemParams):
    """I(w) for w >= 0.  Strict Ohmic: m gamma w; Drude: Lorentzian cutoff."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral_density is defined for omega >= 0")
    base = params.m * damping.gamma * omega
    if damping.kind == STRICT_OHMIC:
        return base
    wc = damping.omega_c
    return base * wc**2 / (omega**2 + wc**2)


def friction_kernel(t, damping: DampingSpec, params: SystemParams):
    """eta(t) = (2/pi) int dw I(w)/w cos(w t).

    Drude: m gamma wc exp(-wc t).  The strict-Ohmic kernel is the
    distribution 2 m gamma delta(t); requesting its pointwise value raises
    :class:`StrictOhmicDeltaError` (use :func:`friction_delta_strength`).
    """
    if damping.kind == STRICT_OHMIC:
        raise StrictOhmicDeltaError(
            "strict-Ohmic friction is 2*m*gamma*delta(t); it has no pointwise value"
        )
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("friction_kernel is defined for t >= 0")
    wc = damping.omega_c
    return params.m * damping.gamma * wc * np.exp(-wc * t)


def friction_delta_strength(damping: DampingSpec, params: SystemParams) -> float:
    """Weight of the delta in the strict-Ohmic friction kernel: 2 m gamma."""
    if damping.kind != STRICT_OHMIC:
        raise ValueError("delta strength is defined for strict Ohmic damping only")
    return 2.0 * params.m * damping.gamma


class NoiseKernel:
    """Real part of the noise correlation kernel.

    For ``kind == 'high-t'`` the kernel is a delta of weight ``strength``;
    calling the instance raises.  For ``kind == 'drude'`` the instance is
    callable on t != 0 (even in t) and ``matsubara_order`` reports the
    number of explicitly summed Matsubara terms.
    """

    def __init__(self, params: SystemParams, damping: DampingSpec, kind: str,
                 order: int | None = None, tail_tol: float = _DEFAULT_TAIL_TOL):
        if kind not in (HIGH_T_DELTA, EXACT_DRUDE):
            raise ValueError(f"unknown noise-kernel kind {kind!r}")
        self.params = params
        self.damping = damping
        self.kind = kind
        self.strength = None
        self.matsubara_order = None
        if kind == HIGH_T_DELTA:
            self.strength = 2.0 * params.m * damping.gamma / (params.hbar * params.beta)
            return

        if damping.kind != DRUDE_OHMIC:
            raise StrictOhmicDeltaError(
                "the exact strict-Ohmic noise kernel is UV divergent; "
                "use Drude damping or the high-t delta kernel"
            )
        damping.warn_if_soft_cutoff(params)
        m, hbar, beta = params.m, params.hbar, params.beta
        gamma, wc = damping.gamma, damping.omega_c
        self._nu1 = 2.0 * math.pi / (hbar * beta)

        # degeneracy guards: cot(hbar beta wc/2) pole, and nu_n == wc
        half = 0.5 * hbar * beta * wc
        if abs(math.sin(half)) < 1e-10:
            raise PoleDegeneracyError(
                "hbar*beta*omega_c/2 sits on a pole of cot; perturb omega_c or beta"
            )
        ratio = wc / self._nu1
        if abs(ratio - round(ratio)) < 1e-10 and round(ratio) >= 1:
            raise PoleDegeneracyError(
                "omega_c coincides with a Matsubara frequency; perturb omega_c or beta"
            )

        self._amp_pole = 0.5 * m * gamma * wc**2 / math.tan(half)
        self._wc = wc
        self._amp_log = m * gamma * wc**2 / math.pi
        self._pref = 2.0 * m * gamma * wc**2 / (hbar * beta)
        self._amp_li3 = self._pref * wc**2 / self._nu1**3

        scale = m * gamma * max(wc, self._nu1) ** 2 / math.pi
        tol_abs = tail_tol * scale
        if order is None:
            order = self._order_for_tolerance(tol_abs)
        else:
            if order < 1:
                raise ValueError("Matsubara order must be >= 1")
            tail = self._tail_bound(order)
            if tail > tol_abs:
                raise ConvergenceError(
                    f"Matsubara tail {tail:.3e} exceeds tolerance {tol_abs:.3e} "
                    f"at order {order}"
                )
        self.matsubara_order = int(order)
        n = np.arange(1, self.matsubara_order + 1)
        nu = self._nu1 * n
        # remainder after the log and Li3 resummations: wc^4/(nu^3 (nu^2 - wc^2))
        self._nu = nu
        self._coef = self._pref * wc**4 / (nu**3 * (nu**2 - wc**2))

    def _tail_bound(self, order: int) -> float:
        # beyond nu_n > 2 wc the summand wc^4/(nu_n^3 (nu_n^2 - wc^2)) is
        # below (4/3) wc^4/nu_n^5, giving a tail below wc^4/(3 nu1^5 N^4);
        # below that range no bound is attempted
        if order < int(2.0 * self._wc / self._nu1) + 1:
            return math.inf
        return self._pref * self._wc**4 / (3.0 * self._nu1**5 * order**4)

    def _order_for_tolerance(self, tol_abs: float) -> int:
        n = max(8, int(2.0 * self._wc / self._nu1) + 1)
        while n <= _ORDER_CAP:
            if self._tail_bound(n) < tol_abs:
                return n
            n *= 2
        raise ConvergenceError(
            f"Matsubara order cap {_ORDER_CAP} cannot reach tolerance {tol_abs:.3e}"
        )

    def __call__(self, t):
        if self.kind == HIGH_T_DELTA:
            raise StrictOhmicDeltaError(
                "the high-t kernel is a delta; use .strength, not a pointwise value"
            )
        t = np.abs(np.asarray(t, dtype=float))
        if np.any(t == 0.0):
            raise ValueError("the exact kernel diverges logarithmically at t = 0")
        shape = t.shape
        flat = np.atleast_1d(t).ravel()
        out = self._amp_pole * np.exp(-np.minimum(self._wc * flat, 745.0))
        out -= self._amp_log * np.log1p(-np.exp(-self._nu1 * flat))
        out += self._amp_li3 * _li3_exp(self._nu1 * flat)
        step = max(1, 2_000_000 // self._nu.size)
        for lo in range(0, flat.size, step):
            block = flat[lo:lo + step]
            x = np.minimum(np.multiply.outer(block, self._nu), 745.0)
            out[lo:lo + step] += np.exp(-x) @ self._coef
        return float(out[0]) if shape == () else out.reshape(shape)


def noise_kernel(params: SystemParams, damping: DampingSpec, kind: str,
                 order: int | None = None) -> NoiseKernel:
    """Factory for :class:`NoiseKernel`."""
    return NoiseKernel(params, damping, kind, order=order)


def noise_kernel_real(t, damping: DampingSpec, params: SystemParams,
                      order: int | None = None):
    """Pointwise K'(t) of the exact Drude kernel (t != 0, even in t)."""
    return NoiseKernel(params, damping, EXACT_DRUDE, order=order)(t)
