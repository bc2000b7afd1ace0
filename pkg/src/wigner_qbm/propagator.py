"""The Gaussian Wigner propagating function and its building blocks.

The propagating kernel for the damped oscillator with factorizing
preparation is a normalized Gaussian in the final phase-space point r''
centered on the damped classical trajectory M(t) r',

    G_W(r'', r', t) = [m |g| / (2 pi hbar sqrt(Lambda))]
                      * exp( -(1/2 hbar Lambda) d^T Sigma d ),

with d = r'' - M(t) r', g = G+'(t)/G+(t), Lambda = a c - b^2 and

    Sigma = [[a,            -m g (a+b)        ],
             [-m g (a+b),    m^2 g^2 (a+2b+c) ]].

The functions a, b, c derive from a single noise functional

    Psi(t, t') = int_0^t ds int_0^t' du K'(s-u)
                 [G+(t-s)/G+(t)] [G+(t'-u)/G+(t')]

through a = (G+')^2 Psi(t,t), b = G+' G+ dPsi/dt|_{t'->t},
c = (G+)^2 d^2Psi/dt dt'|_{t'->t}.  The t-derivatives are taken under the
integral sign; the boundary terms vanish because G+(0) = 0, which leaves
the three primitive integrals

    P   = II K'(s-u) G+(s)  G+(u)   ds du        a       = g^2 P
    I10 = II K'(s-u) G+'(s) G+(u)   ds du        a + b   = g I10
    I11 = II K'(s-u) G+'(s) G+'(u)  ds du        a+2b+c  = I11

(all over [0,t]^2).  In this form the bath-induced broadening of the
kernel is manifestly caustic-free:

    kernel_cov = hbar Lambda Sigma^{-1}
               = hbar [[I11, I10/m], [I10/m, P/m^2]].

Double integrals are reduced to one adaptive Gauss-Kronrod pass over the
time-difference variable x = s - u; the inner slice integral is smooth
and is evaluated by an adaptively refined Gauss-Legendre rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import (
    CausticError,
    DegenerateCovarianceError,
    GridMismatchError,
    QuadratureError,
    StrictOhmicDeltaError,
)
from .kernels import EXACT_DRUDE, HIGH_T_DELTA, NoiseKernel, friction_kernel
from .model import STRICT_OHMIC, DampingSpec, PhasePoint, SystemParams

_ABS_TOL = 1e-9


def _as_point(r) -> np.ndarray:
    if isinstance(r, PhasePoint):
        return r.as_array()
    r = np.asarray(r, dtype=float)
    if r.shape != (2,):
        raise ValueError("phase-space points are length-2 (p, q) vectors")
    return r


def _quad_1d(f, a, b, epsabs=_ABS_TOL, epsrel=1e-10, limit=500):
    val, err, info, *rest = quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
                                 limit=limit, full_output=True)
    if rest and err > max(epsabs, abs(val) * 1e-6):
        raise QuadratureError(
            f"adaptive quadrature stalled: estimated error {err:.3e} for value {val:.6e}"
        )
    return val


@lru_cache(maxsize=None)
def _leggauss(order: int):
    return np.polynomial.legendre.leggauss(order)


def _gauss_refined(f, a, b, epsabs, max_order=2048):
    """Gauss-Legendre with order doubling until two refinements agree."""
    if b <= a:
        return 0.0
    order = 32
    xg, wg = _leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    prev = half * np.dot(wg, f(mid + half * xg))
    while order <= max_order:
        order *= 2
        xg, wg = _leggauss(order)
        cur = half * np.dot(wg, f(mid + half * xg))
        if abs(cur - prev) < max(epsabs, 1e-13 * abs(cur)):
            return cur
        prev = cur
    raise QuadratureError("inner Gauss-Legendre refinement stalled")


def kernel_double_integral(noise: NoiseKernel, phi, psi_fn, t: float,
                           tprime: float | None = None,
                           symmetric: bool = False) -> float:
    """II_{[0,t] x [0,t']} K'(s-u) phi(s) psi(u) ds du.

    For the delta kernel this collapses to
    strength * int_0^min(t,t') phi psi; for the exact kernel the square is
    folded onto the difference variable x = s - u, whose integrand carries
    the (integrable) logarithmic singularity of K' at x = 0.
    """
    if tprime is None:
        tprime = t
    if t < 0 or tprime < 0:
        raise ValueError("integration horizons must be >= 0")
    if t == 0.0 or tprime == 0.0:
        return 0.0
    if noise.kind == HIGH_T_DELTA:
        lam = noise.strength
        if lam == 0.0:
            return 0.0
        upper = min(t, tprime)
        return lam * _quad_1d(lambda s: phi(s) * psi_fn(s), 0.0, upper,
                              epsabs=_ABS_TOL / max(lam, 1.0),
                              limit=max(200, int(30 * upper) + 50))

    inner_tol = 1e-3 * _ABS_TOL

    def slice_pos(x):
        hi = min(t, tprime + x)
        return _gauss_refined(lambda s: phi(s) * psi_fn(s - x), x, hi, inner_tol)

    def slice_neg(y):
        hi = min(t, tprime - y)
        return _gauss_refined(lambda s: phi(s) * psi_fn(s + y), 0.0, hi, inner_tol)

    pos = _quad_1d(lambda x: noise(x) * slice_pos(x), 0.0, t)
    if symmetric and t == tprime:
        return 2.0 * pos
    neg = _quad_1d(lambda y: noise(y) * slice_neg(y), 0.0, tprime)
    return pos + neg


def _require_off_caustic(green, t: float):
    if t <= 0:
        raise CausticError("the propagating function requires t > 0")
    if green.is_near_caustic(t):
        raise CausticError(f"t = {t} lies within the caustic exclusion window")


def psi(t: float, tprime: float, green, noise: NoiseKernel) -> float:
    """The noise functional Psi(t, t')."""
    _require_off_caustic(green, t)
    _require_off_caustic(green, tprime)
    gp_t = float(green.g_plus(t))
    gp_tp = float(green.g_plus(tprime))
    val = kernel_double_integral(
        noise,
        lambda s: green.g_plus(t - s),
        lambda u: green.g_plus(tprime - u),
        t, tprime,
        symmetric=(t == tprime),
    )
    return val / (gp_t * gp_tp)


def _primitive_integrals(t: float, green, noise: NoiseKernel):
    P = kernel_double_integral(noise, green.g_plus, green.g_plus, t, symmetric=True)
    I10 = kernel_double_integral(noise, green.g_plus_dot, green.g_plus, t)
    I11 = kernel_double_integral(noise, green.g_plus_dot, green.g_plus_dot, t,
                                 symmetric=True)
    return P, I10, I11


def abc_quadrature(t: float, green, noise: NoiseKernel):
    """(a, b, c) from the noise functional and its analytic t-derivatives."""
    _require_off_caustic(green, t)
    P, I10, I11 = _primitive_integrals(t, green, noise)
    g = float(green.g_plus_dot(t)) / float(green.g_plus(t))
    a = g * g * P
    b = g * I10 - a
    c = I11 - 2.0 * g * I10 + a
    return a, b, c


@dataclass(frozen=True)
class CovarianceData:
    """Broadening data of the propagating kernel at one time."""

    t: float
    a: float
    b: float
    c: float
    Lambda: float
    Sigma: np.ndarray
    kernel_cov: np.ndarray
    gdot_over_g: float = field(repr=False)
    params: SystemParams = field(repr=False)


def covariance_data(t: float, green, noise: NoiseKernel,
                    params: SystemParams) -> CovarianceData:
    """Assemble a, b, c, Lambda, Sigma and the kernel covariance at time t."""
    _require_off_caustic(green, t)
    P, I10, I11 = _primitive_integrals(t, green, noise)
    g = float(green.g_plus_dot(t)) / float(green.g_plus(t))
    a = g * g * P
    b = g * I10 - a
    c = I11 - 2.0 * g * I10 + a
    lam = a * c - b * b
    m, hbar = params.m, params.hbar
    sigma = np.array([
        [a, -m * g * (a + b)],
        [-m * g * (a + b), m * m * g * g * (a + 2 * b + c)],
    ])
    kcov = hbar * np.array([[I11, I10 / m], [I10 / m, P / (m * m)]])
    return CovarianceData(t=t, a=a, b=b, c=c, Lambda=lam, Sigma=sigma,
                          kernel_cov=kcov, gdot_over_g=g, params=params)


def abc_closed(t: float, table, green):
    """(a, b, c) from the thermal autocorrelation function (closed forms).

    Uses the equilibrium moments and S(t), S'(t), S''(t) of the table's
    source, with the m^2/hbar normalization."""
    if not table.covers(t):
        raise ValueError(f"correlation table does not cover t = {t}")
    _require_off_caustic(green, t)
    corr = table.source
    params = corr.params
    m, hbar = params.m, params.hbar
    q2, p2 = table.q2_eq, table.p2_eq
    S = float(corr.S(t))
    Sd = float(corr.S(t, 1))
    Sdd = float(corr.S(t, 2))
    gp = float(green.g_plus(t))
    gpd = float(green.g_plus_dot(t))
    g = gpd / gp
    pref = m * m / hbar
    bracket = q2 * (1.0 - S * S / q2**2)
    a = pref * g * g * (bracket + (p2 / m**2) * gp * gp + 2.0 * Sd * gp)
    b = -pref * g * (bracket * g + gpd * Sd - gp * Sdd + S * Sd / q2)
    c = pref * (q2 * g * g + p2 / m**2 - (Sd - g * S) ** 2 / q2)
    return a, b, c


def abc_asymptotic(t: float, table, green):
    """Long-time forms: a -> (m^2/hbar) g^2 <q^2>, b -> -a,
    c -> <p^2>/hbar + (m^2/hbar) g^2 <q^2>."""
    _require_off_caustic(green, t)
    params = table.source.params
    m, hbar = params.m, params.hbar
    g = float(green.g_plus_dot(t)) / float(green.g_plus(t))
    a = (m * m / hbar) * g * g * table.q2_eq
    return a, -a, table.p2_eq / hbar + a


@dataclass(frozen=True)
class GaussianWigner:
    """Normalized Gaussian Wigner function: mean phase-space point and
    2x2 symmetric positive-semidefinite covariance in (p, q) ordering."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = _as_point(self.mean)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (2, 2):
            raise ValueError("covariance must be 2x2")
        scale = max(np.abs(cov).max(), 1e-300)
        if abs(cov[0, 1] - cov[1, 0]) > 1e-9 * scale:
            raise ValueError("covariance must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-9 * scale:
            raise ValueError("covariance must be positive semidefinite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def mean_point(self) -> PhasePoint:
        return PhasePoint(p=float(self.mean[0]), q=float(self.mean[1]))

    def density(self, p, q):
        """Evaluate the normalized Gaussian at (p, q); broadcasts."""
        det = float(np.linalg.det(self.cov))
        if det <= 0:
            raise DegenerateCovarianceError("covariance is singular")
        inv = np.linalg.inv(self.cov)
        dp = np.asarray(p, dtype=float) - self.mean[0]
        dq = np.asarray(q, dtype=float) - self.mean[1]
        quad_form = inv[0, 0] * dp**2 + 2 * inv[0, 1] * dp * dq + inv[1, 1] * dq**2
        return np.exp(-0.5 * quad_form) / (2.0 * math.pi * math.sqrt(det))


def propagating_function(rpp, rp, t: float, cov: CovarianceData,
                         map_matrix: np.ndarray) -> float:
    """Value of the Gaussian propagating kernel G_W(r'', r', t)."""
    if cov.Lambda <= 0.0:
        raise DegenerateCovarianceError(
            f"Lambda = {cov.Lambda:.3e} <= 0: kernel is a delta (no bath broadening)"
        )
    rpp = _as_point(rpp)
    rp = _as_point(rp)
    d = rpp - map_matrix @ rp
    m, hbar = cov.params.m, cov.params.hbar
    pref = m * abs(cov.gdot_over_g) / (2.0 * math.pi * hbar * math.sqrt(cov.Lambda))
    expo = -float(d @ cov.Sigma @ d) / (2.0 * hbar * cov.Lambda)
    return pref * math.exp(expo)


def propagating_kernel(rp, t: float, cov: CovarianceData,
                       map_matrix: np.ndarray) -> GaussianWigner:
    """The kernel, seen as a Gaussian state in r'': mean M(t) r' and
    covariance hbar Lambda Sigma^{-1}."""
    rp = _as_point(rp)
    return GaussianWigner(mean=map_matrix @ rp, cov=cov.kernel_cov)


def thermal_wigner(r, table) -> float:
    """Thermal Wigner function with the equilibrium second moments."""
    return float(thermal_state(table).density(*_as_point(r)))


def thermal_state(table) -> GaussianWigner:
    q2, p2 = table.q2_eq, table.p2_eq
    if q2 <= 0 or p2 <= 0:
        raise ValueError("equilibrium moments must be positive")
    return GaussianWigner(mean=np.zeros(2), cov=np.diag([p2, q2]))


def fluctuation_prefactor(t: float, green, params: SystemParams) -> float:
    """Fluctuation prefactor of the position-space propagating function,
    m / (2 pi hbar |G+(t)|)."""
    _require_off_caustic(green, t)
    return params.m / (2.0 * math.pi * params.hbar * abs(float(green.g_plus(t))))


def action_exponents(qtp: float, qp: float, qtpp: float, qpp: float,
                     t: float, green, noise: NoiseKernel):
    """(S1, S2) of the propagating-function exponent.

    S1 is the bilinear system action along the stationary pair; S2 is the
    bath part, (i/2) II K'(s-u) qt(s) qt(u) evaluated on the stationary
    difference path

        qt(s) = qt' G+(t-s)/G+(t) + qt'' G-(s)/G-(t),

    which makes it the quadratic form
    (i/2) [Psi(t,t) qt'^2 + 2 X qt' qt'' + Y qt''^2].

    Arguments are ordered (qt', q', qt'', q'').
    """
    if not hasattr(green, "g_minus"):
        raise ValueError("action exponents require the strict-Ohmic Green pair")
    _require_off_caustic(green, t)
    m = green.params.m
    gp = float(green.g_plus(t))
    gm = float(green.g_minus(t))
    g = float(green.g_plus_dot(t)) / gp
    s1 = m * ((qp * qtp + qpp * qtpp) * g - qp * qtpp / gm - qpp * qtp / gp)

    psi_tt = psi(t, t, green, noise)
    x_raw = kernel_double_integral(
        noise, lambda s: green.g_plus(t - s), green.g_minus, t)
    y_raw = kernel_double_integral(noise, green.g_minus, green.g_minus, t,
                                   symmetric=True)
    x_n = x_raw / (gp * gm)
    y_n = y_raw / (gm * gm)
    s2 = 0.5j * (psi_tt * qtp**2 + 2.0 * x_n * qtp * qtpp + y_n * qtpp**2)
    return s1, s2


def influence_phase(s, q_plus, q_minus, noise: NoiseKernel,
                    damping: DampingSpec, params: SystemParams,
                    qdot_plus=None, qdot_minus=None,
                    include_initial_term: bool = False) -> complex:
    """Discretized influence-functional exponent Phi[q+, q-] on a grid.

    Trapezoidal in both time variables.  For the exact kernel the
    log-singular diagonal band is integrated against the trapezoid hat
    analytically.  The third (preparation) term is evaluated only when
    ``include_initial_term`` is set, and then with the friction-kernel
    weight eta(s) that dimensional consistency requires.
    """
    s = np.asarray(s, dtype=float)
    qp = np.asarray(q_plus, dtype=float)
    qm = np.asarray(q_minus, dtype=float)
    if s.ndim != 1 or s.size < 3:
        raise GridMismatchError("need a 1-d grid with at least 3 points")
    if qp.shape != s.shape or qm.shape != s.shape:
        raise GridMismatchError("paths must share the common time grid")
    h = np.diff(s)
    if np.any(h <= 0) or abs(h.max() - h.min()) > 1e-12 * h.max():
        raise GridMismatchError("grid must be uniform and increasing")
    h = float(h[0])
    if qdot_plus is None:
        qdot_plus = np.gradient(qp, s)
    if qdot_minus is None:
        qdot_minus = np.gradient(qm, s)
    qdot_plus = np.asarray(qdot_plus, dtype=float)
    qdot_minus = np.asarray(qdot_minus, dtype=float)
    if qdot_plus.shape != s.shape or qdot_minus.shape != s.shape:
        raise GridMismatchError("velocities must share the common time grid")

    qt = qp - qm
    vsum = qdot_plus + qdot_minus
    w = np.full(s.size, h)
    w[0] = w[-1] = 0.5 * h
    m, gamma = params.m, damping.gamma

    # first term: II_{u<s} K'(s-u) qt(s) qt(u)
    if noise.kind == HIGH_T_DELTA:
        term1 = 0.5 * noise.strength * float(np.trapezoid(qt * qt, s))
    else:
        # uniform grid: only n-1 distinct kernel values on the off-diagonals
        kvals = np.concatenate(([0.0], noise(h * np.arange(1, s.size))))
        idx = np.abs(np.arange(s.size)[:, None] - np.arange(s.size)[None, :])
        kmat = kvals[idx]
        wq = w * qt
        full = float(wq @ kmat @ wq)
        band = _quad_1d(lambda x: noise(x) * (1.0 - x / h), 1e-300, h,
                        epsabs=1e-12, limit=200)
        term1 = 0.5 * full + band * float(np.sum(w * qt * qt))

    # second term: (i/2) II_{u<s} eta(s-u) qt(s) [qdot+(u) + qdot-(u)]
    if damping.kind == STRICT_OHMIC:
        term2 = 0.5 * m * gamma * float(np.trapezoid(qt * vsum, s))
    else:
        acc = 0.0
        for i in range(1, s.size):
            eta_row = friction_kernel(s[i] - s[: i + 1], damping, params)
            acc += w[i] * qt[i] * float(np.trapezoid(eta_row * vsum[: i + 1], s[: i + 1]))
        term2 = 0.5 * acc

    # third term (preparation slip), eta-weighted
    term3 = 0.0
    if include_initial_term:
        qsum0 = qp[0] + qm[0]
        if damping.kind == STRICT_OHMIC:
            term3 = 0.5 * qsum0 * m * gamma * qt[0]
        else:
            eta = friction_kernel(s, damping, params)
            term3 = 0.5 * qsum0 * float(np.trapezoid(eta * qt, s))

    return complex(term1, term2 + term3)
