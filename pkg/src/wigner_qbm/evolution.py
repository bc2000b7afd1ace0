"""Propagation of initial Wigner functions under the Gaussian kernel.

Gaussian states evolve exactly by moment propagation,

    mean' = M(t) mean,      cov' = M(t) cov M(t)^T + kernel_cov(t).

Arbitrary grid states evolve by direct dense quadrature against the
Gaussian kernel.  Composing two evolutions is exposed but is generally
not the same as a single step over the summed time: each application
assumes a factorizing (re-prepared) bath, so for the exact non-Markovian
kernel the semigroup property holds only approximately, and only deep in
the near-Markovian regime.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import UnderresolvedKernelError
from .propagator import CovarianceData, GaussianWigner

_ENV_THREADS = "WIGNER_QBM_THREADS"


def worker_count() -> int:
    raw = os.environ.get(_ENV_THREADS, "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


@dataclass(frozen=True)
class GridWigner:
    """Wigner function sampled on a uniform rectangular phase-space grid.

    ``values[i, j]`` is W(p[i], q[j]).  Wigner functions may be locally
    negative; only global mass is constrained.
    """

    p: np.ndarray
    q: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if p.ndim != 1 or q.ndim != 1 or p.size < 2 or q.size < 2:
            raise ValueError("grid axes must be 1-d with at least 2 points")
        for ax in (p, q):
            d = np.diff(ax)
            if np.any(d <= 0) or abs(d.max() - d.min()) > 1e-9 * d.max():
                raise ValueError("grid axes must be uniform and increasing")
        if v.shape != (p.size, q.size):
            raise ValueError("values must have shape (len(p), len(q))")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "values", v)

    @property
    def dp(self) -> float:
        return float(self.p[1] - self.p[0])

    @property
    def dq(self) -> float:
        return float(self.q[1] - self.q[0])


def evolve_gaussian(state: GaussianWigner, t: float, cov: CovarianceData,
                    map_matrix: np.ndarray) -> GaussianWigner:
    """Exact moment propagation of a Gaussian state."""
    mean = map_matrix @ state.mean
    new_cov = map_matrix @ state.cov @ map_matrix.T + cov.kernel_cov
    return GaussianWigner(mean=mean, cov=new_cov)


def _kernel_resolvable(cov: CovarianceData, dp: float, dq: float) -> bool:
    scale = np.diag([1.0 / dp, 1.0 / dq])
    scaled = scale @ cov.kernel_cov @ scale
    return float(np.linalg.eigvalsh(scaled).min()) >= 4.0


def evolve_grid(state: GridWigner, t: float, cov: CovarianceData,
                map_matrix: np.ndarray) -> GridWigner:
    """Dense quadrature of int d^2r' G_W(r'', r', t) W(r') on the grid.

    Refuses when the kernel covariance is narrower than two cells in any
    scaled direction; use moment propagation for such states instead.
    """
    if not _kernel_resolvable(cov, state.dp, state.dq):
        raise UnderresolvedKernelError(
            "kernel covariance is below (2 cells)^2 in a scaled direction; "
            "propagate moments with evolve_gaussian instead"
        )
    kc = cov.kernel_cov
    det = float(np.linalg.det(kc))
    inv = np.linalg.inv(kc)
    norm = 1.0 / (2.0 * np.pi * np.sqrt(det))
    cell = state.dp * state.dq

    pp, qq = np.meshgrid(state.p, state.q, indexing="ij")
    src = np.stack([pp.ravel(), qq.ravel()])          # (2, Ns)
    centers = map_matrix @ src                        # (2, Ns)
    wsrc = state.values.ravel() * cell

    n_dest = state.p.size
    out = np.empty((n_dest, state.q.size))

    def fill(rows):
        for i in rows:
            dp_ = state.p[i] - centers[0]             # (Ns,)
            dq_ = state.q[:, None] - centers[1]       # (Nq, Ns)
            expo = (inv[0, 0] * dp_**2 + 2.0 * inv[0, 1] * dp_ * dq_
                    + inv[1, 1] * dq_**2)
            out[i] = norm * np.exp(-0.5 * expo) @ wsrc

    workers = worker_count()
    rows = range(n_dest)
    if workers == 1:
        fill(rows)
    else:
        chunks = [list(rows)[k::workers] for k in range(workers)]
        with ThreadPoolExecutor(max_workers=workers) as ex:
            list(ex.map(fill, chunks))
    return GridWigner(p=state.p.copy(), q=state.q.copy(), values=out)


def moments(state: GridWigner):
    """(mass, mean, cov) by trapezoidal quadrature.

    The caller asserts the grid covers at least ~6 sigma of the state in
    each direction; nothing is extrapolated."""
    p, q, w = state.p, state.q, state.values

    def integrate(f):
        return float(np.trapezoid(np.trapezoid(f, q, axis=1), p))

    mass = integrate(w)
    pp, qq = np.meshgrid(p, q, indexing="ij")
    mp = integrate(w * pp) / mass
    mq = integrate(w * qq) / mass
    cpp = integrate(w * (pp - mp) ** 2) / mass
    cqq = integrate(w * (qq - mq) ** 2) / mass
    cpq = integrate(w * (pp - mp) * (qq - mq)) / mass
    return mass, np.array([mp, mq]), np.array([[cpp, cpq], [cpq, cqq]])


def gaussian_on_grid(state: GaussianWigner, p, q) -> GridWigner:
    """Sample a Gaussian state onto a grid."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pp, qq = np.meshgrid(p, q, indexing="ij")
    return GridWigner(p=p, q=q, values=state.density(pp, qq))
