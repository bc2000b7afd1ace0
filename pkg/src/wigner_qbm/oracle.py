"""Exact microscopic cross-check on a discretized bath.

The Drude spectral density is discretized into N oscillators with an
equal-weight grid in the I(w)/w measure (cumulative arctan(w/wc)),
midpoint couplings

    c_j^2 = (2/pi) m_j w_j I(w_j) dw_j,

and the counter-term Sum_j c_j^2/(m_j w_j^2) taken from the discrete sum
so that the discretized Hamiltonian is exactly translation consistent.
The full (system + bath) Gaussian state is evolved with the exact linear
flow obtained by normal-mode diagonalization of the stiffness matrix;
there is no time-stepping error.  Tracing out the bath is block
extraction of the system rows of mean and covariance.

State-vector ordering is (p, P_1..P_N, q, Q_1..Q_N).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DiagonalizationError
from .kernels import spectral_density
from .model import DRUDE_OHMIC, DampingSpec, PhasePoint, SystemParams
from .propagator import GaussianWigner


@dataclass
class BathDiscretization:
    """N bath modes (frequency, coupling, mass) plus the counter-term."""

    omega: np.ndarray
    coupling: np.ndarray
    mass: np.ndarray
    counter_term: float
    _modes: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        if np.any(w <= 0) or np.any(np.diff(w) <= 0):
            raise ValueError("bath frequencies must be positive and strictly increasing")

    @property
    def n_modes(self) -> int:
        return self.omega.size

    def recurrence_time(self) -> float:
        """2 pi over the smallest mode spacing; comparisons with the
        continuum are only meaningful well below this."""
        return 2.0 * np.pi / float(np.diff(self.omega).min())


def discretize_bath(damping: DampingSpec, params: SystemParams, n_modes: int,
                    omega_max: float) -> BathDiscretization:
    """Equal-measure midpoint discretization of the Drude spectral density."""
    if damping.kind != DRUDE_OHMIC:
        raise ValueError("the microscopic oracle discretizes Drude baths only")
    if n_modes < 2:
        raise ValueError("need at least 2 bath modes")
    if omega_max < 5.0 * damping.omega_c:
        raise ValueError("omega_max must be at least 5 omega_c")
    damping.warn_if_soft_cutoff(params)
    wc = damping.omega_c
    theta = np.arctan(omega_max / wc)
    edges = wc * np.tan(np.linspace(0.0, theta, n_modes + 1))
    w = wc * np.tan((np.arange(n_modes) + 0.5) * theta / n_modes)
    dw = np.diff(edges)
    mass = np.ones(n_modes)
    c2 = (2.0 / np.pi) * mass * w * spectral_density(w, damping, params) * dw
    counter = float(np.sum(c2 / (mass * w**2)))
    return BathDiscretization(omega=w, coupling=np.sqrt(c2), mass=mass,
                              counter_term=counter)


@dataclass(frozen=True)
class FullGaussianState:
    """Gaussian state of system plus bath: mean (2N+2,), cov (2N+2, 2N+2)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        n = mean.size
        if cov.shape != (n, n) or n % 2 != 0:
            raise ValueError("mean and covariance sizes are inconsistent")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def n_bath(self) -> int:
        return self.mean.size // 2 - 1


def thermal_full_state(system: GaussianWigner, bath: BathDiscretization,
                       params: SystemParams) -> FullGaussianState:
    """Factorizing preparation: arbitrary system Gaussian times the thermal
    bath state at inverse temperature beta."""
    n = bath.n_modes + 1
    mean = np.zeros(2 * n)
    mean[0] = system.mean[0]
    mean[n] = system.mean[1]
    cov = np.zeros((2 * n, 2 * n))
    cov[0, 0] = system.cov[0, 0]
    cov[0, n] = cov[n, 0] = system.cov[0, 1]
    cov[n, n] = system.cov[1, 1]
    hbar, beta = params.hbar, params.beta
    th = 1.0 / np.tanh(0.5 * beta * hbar * bath.omega)
    qq = 0.5 * hbar / (bath.mass * bath.omega) * th
    pp = 0.5 * hbar * bath.mass * bath.omega * th
    for j in range(bath.n_modes):
        cov[1 + j, 1 + j] = pp[j]
        cov[n + 1 + j, n + 1 + j] = qq[j]
    return FullGaussianState(mean=mean, cov=cov)


def _normal_modes(bath: BathDiscretization, params: SystemParams):
    key = (params.m, params.omega0)
    if key in bath._modes:
        return bath._modes[key]
    n = bath.n_modes + 1
    v = np.zeros((n, n))
    v[0, 0] = params.m * params.omega0**2 + bath.counter_term
    v[0, 1:] = -bath.coupling
    v[1:, 0] = -bath.coupling
    v[np.arange(1, n), np.arange(1, n)] = bath.mass * bath.omega**2
    sqrt_m = np.sqrt(np.concatenate(([params.m], bath.mass)))
    vt = v / sqrt_m[:, None] / sqrt_m[None, :]
    lam, modes = np.linalg.eigh(vt)
    if lam.min() <= 0.0:
        raise DiagonalizationError(
            f"stiffness matrix is numerically indefinite (min eig {lam.min():.3e})"
        )
    result = (np.sqrt(lam), modes, sqrt_m)
    bath._modes[key] = result
    return result


def flow_matrix(bath: BathDiscretization, params: SystemParams, t: float) -> np.ndarray:
    """E(t) = exp(t A) of the linear Hamiltonian flow, via normal modes."""
    freq, modes, sqrt_m = _normal_modes(bath, params)
    n = freq.size
    cos = modes @ (np.cos(freq * t)[:, None] * modes.T)
    sin_over = modes @ ((np.sin(freq * t) / freq)[:, None] * modes.T)
    sin_times = modes @ ((np.sin(freq * t) * freq)[:, None] * modes.T)
    e = np.empty((2 * n, 2 * n))
    e[:n, :n] = sqrt_m[:, None] * cos / sqrt_m[None, :]
    e[:n, n:] = -(sqrt_m[:, None] * sin_times * sqrt_m[None, :])
    e[n:, :n] = sin_over / sqrt_m[:, None] / sqrt_m[None, :]
    e[n:, n:] = cos / sqrt_m[:, None] * sqrt_m[None, :]
    return e


def evolve_full(state: FullGaussianState, bath: BathDiscretization,
                params: SystemParams, t: float) -> FullGaussianState:
    """Exact evolution of the full Gaussian state to time t."""
    e = flow_matrix(bath, params, t)
    return FullGaussianState(mean=e @ state.mean, cov=e @ state.cov @ e.T)


def reduced_system_state(state: FullGaussianState) -> GaussianWigner:
    """Trace out the bath: extract the system (p, q) block."""
    n = state.n_bath + 1
    idx = np.array([0, n])
    return GaussianWigner(mean=state.mean[idx], cov=state.cov[np.ix_(idx, idx)])


def symplectic_form(n_pairs: int) -> np.ndarray:
    """J in (P_all, Q_all) ordering: [[0, -I], [I, 0]]."""
    j = np.zeros((2 * n_pairs, 2 * n_pairs))
    j[:n_pairs, n_pairs:] = -np.eye(n_pairs)
    j[n_pairs:, :n_pairs] = np.eye(n_pairs)
    return j
