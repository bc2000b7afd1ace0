"""Independent reference computations used as test oracles.

Everything here deliberately avoids the code paths under test: Green
functions come from an ODE integrator, thermal quantities from direct
frequency-axis quadrature, and double integrals from fixed-order
Gauss-Legendre tensor rules.
"""

import numpy as np
from scipy.integrate import quad, solve_ivp


def ode_green(gamma, omega0, t_eval, anti=False):
    """(G, G') of x'' +- gamma x' + omega0^2 x = 0, x(0)=0, x'(0)=1."""
    sign = 1.0 if not anti else -1.0

    def rhs(_, y):
        return [y[1], -sign * gamma * y[1] - omega0**2 * y[0]]

    t_eval = np.atleast_1d(np.asarray(t_eval, dtype=float))
    sol = solve_ivp(rhs, (0.0, float(t_eval.max())), [0.0, 1.0],
                    t_eval=t_eval, rtol=1e-12, atol=1e-14, method="DOP853")
    return sol.y[0], sol.y[1]


def ode_damped_flow(gamma, omega0, m, t_final, p0, q0):
    """(p, q) at t_final for the damped classical equation started from
    (p0, q0) without any slip applied."""

    def rhs(_, y):
        p, q = y
        return [-gamma * p - m * omega0**2 * q, p / m]

    sol = solve_ivp(rhs, (0.0, t_final), [p0, q0], rtol=1e-12, atol=1e-14,
                    method="DOP853")
    return sol.y[0, -1], sol.y[1, -1]


def gl_1d(f, a, b, order):
    x, w = np.polynomial.legendre.leggauss(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * float(np.dot(w, f(mid + half * x)))


def gl_2d_square(f, t, tprime, order):
    """Tensor Gauss-Legendre of f(s, u) over [0,t] x [0,tprime]."""
    x, w = np.polynomial.legendre.leggauss(order)
    s = 0.5 * t * (x + 1.0)
    u = 0.5 * tprime * (x + 1.0)
    ss, uu = np.meshgrid(s, u, indexing="ij")
    vals = f(ss, uu)
    return 0.25 * t * tprime * float(w @ vals @ w)


def gl_2d_triangles(f, t, order):
    """Tensor Gauss-Legendre of f(s, u) over [0,t]^2, split along the
    diagonal (for kernels singular at s = u); f must broadcast."""
    x, w = np.polynomial.legendre.leggauss(order)
    s = 0.5 * t * (x + 1.0)
    ws = 0.5 * t * w
    # lower triangle u in (0, s): u = s*v
    v = 0.5 * (x + 1.0)
    wv = 0.5 * w
    ss = s[:, None]
    uu = ss * v[None, :]
    lower = float(ws @ (f(ss, uu) * ss) @ wv)
    upper = float(ws @ (f(uu, ss) * ss) @ wv)
    return lower + upper


def drude_chi_imag(omega, params, damping):
    """Imaginary part of the dynamic susceptibility for Drude damping."""
    m, w0 = params.m, params.omega0
    gamma, wc = damping.gamma, damping.omega_c
    gp = gamma * wc**2 / (wc**2 + omega**2)
    gpp = gamma * wc * omega / (wc**2 + omega**2)
    den = (w0**2 - omega**2 + omega * gpp) ** 2 + (omega * gp) ** 2
    return omega * gp / (m * den)


def brute_moments(params, damping):
    """<q^2>, <p^2> by direct frequency quadrature of the spectral formula."""
    hbar, beta, m = params.hbar, params.beta, params.m

    def fq(w):
        return (hbar / np.pi) * drude_chi_imag(w, params, damping) / np.tanh(
            0.5 * beta * hbar * w)

    def fp(w):
        return m**2 * w**2 * fq(w)

    w0 = params.omega0
    wc = damping.omega_c
    pieces = [(0.0, 0.5 * w0), (0.5 * w0, 2 * w0), (2 * w0, wc),
              (wc, 20 * wc), (20 * wc, 2000 * wc)]
    q2 = sum(quad(fq, a, b, limit=800, epsabs=1e-14, epsrel=1e-13)[0]
             for a, b in pieces)
    p2 = sum(quad(fp, a, b, limit=800, epsabs=1e-14, epsrel=1e-13)[0]
             for a, b in pieces)
    # the <p^2> integrand decays like 1/w^3; add the analytic tail
    tail_lo = 2000 * wc
    p2 += m * damping.gamma * wc**2 * hbar / (2 * np.pi * tail_lo**2)
    return q2, p2


def brute_correlation(t, params, damping):
    """S(t), A(t) by oscillatory-weight quadrature."""
    hbar, beta = params.hbar, params.beta
    wc = damping.omega_c

    def base(w):
        return (hbar / np.pi) * drude_chi_imag(w, params, damping)

    def coth_base(w):
        if w == 0.0:
            return (hbar / np.pi) * damping.gamma / (
                params.m * params.omega0**4) * 2.0 / (beta * hbar)
        return base(w) / np.tanh(0.5 * beta * hbar * w)

    pieces = [(0.0, 2.0 * params.omega0), (2.0 * params.omega0, 4 * wc),
              (4 * wc, 400 * wc)]
    if t == 0.0:
        s_val = sum(quad(coth_base, a, b, limit=800, epsabs=1e-13)[0]
                    for a, b in pieces)
        return s_val, 0.0
    s_val = sum(quad(coth_base, a, b, weight="cos", wvar=t, limit=2000,
                     epsabs=1e-13)[0] for a, b in pieces)
    a_val = -sum(quad(base, a, b, weight="sin", wvar=t, limit=2000,
                      epsabs=1e-13)[0] for a, b in pieces)
    return s_val, a_val


def fd_second(f, t, h):
    """4th-order central second derivative."""
    return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t)
            + 16 * f(t - h) - f(t - 2 * h)) / (12.0 * h * h)


def fd_first(f, t, h):
    """4th-order central first derivative."""
    return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12.0 * h)
