"""Command-line front end: machine-readable tables for every figure regime
and validation suite.

Exit codes: 0 ok, 2 config error, 3 caustic in the time grid, 4 oracle
failure, 5 unresolvable kernel.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import correlation, evolution, oracle, trajectories
from .errors import (
    CausticError,
    DiagonalizationError,
    UnderresolvedKernelError,
    WignerQbmError,
)
from .kernels import EXACT_DRUDE, HIGH_T_DELTA, noise_kernel
from .model import (
    DRUDE_OHMIC,
    STRICT_OHMIC,
    DampingSpec,
    SystemParams,
    classical_map,
    make_green_pair,
)
from .propagator import GaussianWigner, covariance_data

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAUSTIC = 3
EXIT_ORACLE = 4
EXIT_RESOLUTION = 5


@dataclass(frozen=True)
class RunConfig:
    command: str
    mass: float
    omega0: float
    hbar: float
    beta: float
    damping: str
    gamma: float
    omega_c: float | None
    kernel: str
    t0: float
    t1: float
    nt: int
    fmt: str

    def params(self) -> SystemParams:
        return SystemParams(m=self.mass, omega0=self.omega0,
                            hbar=self.hbar, beta=self.beta)

    def damping_spec(self) -> DampingSpec:
        return DampingSpec(kind=self.damping, gamma=self.gamma,
                           omega_c=self.omega_c)

    def tgrid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.nt)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


class TableWriter:
    """CSV ('#'-commented header) or single-document JSON output."""

    def __init__(self, config: RunConfig, extra: dict, columns, stream):
        self.config = config
        self.extra = extra
        self.columns = list(columns)
        self.stream = stream
        self.rows = []

    def emit(self, row):
        self.rows.append([float(v) for v in row])

    def close(self):
        cfg = asdict(self.config)
        cfg.update(self.extra)
        if self.config.fmt == "json":
            doc = {"config": cfg, "columns": self.columns, "rows": self.rows}
            json.dump(doc, self.stream, indent=1)
            self.stream.write("\n")
            return
        for key in sorted(cfg):
            self.stream.write(f"# {key} = {cfg[key]}\n")
        self.stream.write(",".join(self.columns) + "\n")
        for row in self.rows:
            self.stream.write(",".join(_fmt(v) for v in row) + "\n")


def _build_green(config: RunConfig, params, damping):
    if damping.kind == STRICT_OHMIC:
        return make_green_pair(params, damping)
    return correlation.drude_green_pair(params, damping)


def _check_grid_caustics(green, tgrid):
    bad = [float(t) for t in tgrid if t > 0 and green.is_near_caustic(float(t))]
    if bad:
        raise CausticError(
            "time grid hits the caustic exclusion window at t = "
            + ", ".join(f"{t:.17g}" for t in bad)
        )


def cmd_propagator(config: RunConfig, args, out) -> int:
    params = config.params()
    damping = config.damping_spec()
    green = _build_green(config, params, damping)
    kern = noise_kernel(params, damping, config.kernel)
    tgrid = config.tgrid()
    _check_grid_caustics(green, tgrid)
    writer = TableWriter(config, {"p0": args.p0, "q0": args.q0},
                         ["t", "a", "b", "c", "Lambda",
                          "Sigma11", "Sigma12", "Sigma22",
                          "kcov_pp", "kcov_pq", "kcov_qq",
                          "center_p", "center_q"], out)
    r0 = np.array([args.p0, args.q0])
    for t in tgrid:
        t = float(t)
        if t <= 0.0:
            raise CausticError("propagator tables require t > 0")
        cov = covariance_data(t, green, kern, params)
        center = classical_map(t, params, green) @ r0
        writer.emit([t, cov.a, cov.b, cov.c, cov.Lambda,
                     cov.Sigma[0, 0], cov.Sigma[0, 1], cov.Sigma[1, 1],
                     cov.kernel_cov[0, 0], cov.kernel_cov[0, 1],
                     cov.kernel_cov[1, 1], center[0], center[1]])
    writer.close()
    return EXIT_OK


def cmd_trajectories(config: RunConfig, args, out) -> int:
    params = config.params()
    damping = config.damping_spec()
    if damping.kind != STRICT_OHMIC:
        raise ValueError("trajectory pairs are defined for strict Ohmic damping")
    green = make_green_pair(params, damping)
    t_final = config.t1
    pair = trajectories.stationary_pair(args.qp, args.qtp, args.qpp, args.qtpp,
                                        t_final, green)
    writer = TableWriter(config,
                         {"qp": args.qp, "qtp": args.qtp,
                          "qpp": args.qpp, "qtpp": args.qtpp},
                         ["s", "q_plus", "p_plus", "q_minus", "p_minus",
                          "q_sum", "p_sum", "invariant"], out)
    for s in config.tgrid():
        s = float(s)
        r_plus, r_minus, r_sum = trajectories.phase_space_lift(pair, s)
        writer.emit([s, r_plus.q, r_plus.p, r_minus.q, r_minus.p,
                     r_sum.q, r_sum.p, float(trajectories.pair_invariant(pair, s))])
    writer.close()
    return EXIT_OK


def cmd_oracle(config: RunConfig, args, out) -> int:
    params = config.params()
    damping = config.damping_spec()
    if damping.kind != DRUDE_OHMIC:
        raise ValueError("the microscopic oracle requires Drude damping")
    if args.bath_n > 5000:
        raise ValueError("bath size capped at 5000 modes")
    green = correlation.drude_green_pair(params, damping)
    kern = noise_kernel(params, damping, config.kernel)
    bath = oracle.discretize_bath(damping, params, args.bath_n,
                                  10.0 * damping.omega_c)
    sys0 = GaussianWigner(mean=np.array([args.p0, args.q0]),
                          cov=np.array([[args.cov_pp, args.cov_pq],
                                        [args.cov_pq, args.cov_qq]]))
    full0 = oracle.thermal_full_state(sys0, bath, params)
    tgrid = config.tgrid()
    _check_grid_caustics(green, tgrid)
    t_ok = 0.5 * bath.recurrence_time()
    writer = TableWriter(config,
                         {"bath_n": args.bath_n, "threshold": args.threshold,
                          "recurrence_guard": t_ok},
                         ["t", "mean_err", "cov_err"], out)
    mean_scale = 0.0
    records = []
    for t in tgrid:
        t = float(t)
        if t <= 0.0 or t > t_ok:
            raise ValueError(
                f"oracle comparisons need 0 < t < half the recurrence time {t_ok:.3g}"
            )
        red = oracle.reduced_system_state(oracle.evolve_full(full0, bath, params, t))
        mt = classical_map(t, params, green)
        ana = evolution.evolve_gaussian(sys0, t, covariance_data(t, green, kern, params), mt)
        mean_scale = max(mean_scale, float(np.linalg.norm(ana.mean)))
        records.append((t, red, ana))
    max_err = 0.0
    for t, red, ana in records:
        mean_err = float(np.linalg.norm(red.mean - ana.mean)) / max(mean_scale, 1e-300)
        cov_err = float(np.max(np.abs(red.cov - ana.cov)) / np.max(np.abs(ana.cov)))
        max_err = max(max_err, mean_err, cov_err)
        writer.emit([t, mean_err, cov_err])
    writer.extra["max_err"] = max_err
    writer.close()
    if max_err >= args.threshold:
        print(f"error: oracle mismatch {max_err:.3e} exceeds threshold "
              f"{args.threshold:.3e}", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK


def cmd_evolve(config: RunConfig, args, out) -> int:
    params = config.params()
    damping = config.damping_spec()
    green = _build_green(config, params, damping)
    kern = noise_kernel(params, damping, config.kernel)
    tgrid = config.tgrid()
    _check_grid_caustics(green, tgrid)

    grid_state = None
    if args.grid_file is not None:
        data = np.load(args.grid_file)
        grid_state = evolution.GridWigner(p=data["p"], q=data["q"],
                                          values=data["values"])
        _, mean0, cov0 = evolution.moments(grid_state)
        state0 = GaussianWigner(mean=mean0, cov=cov0)
    else:
        state0 = GaussianWigner(mean=np.array([args.p0, args.q0]),
                                cov=np.array([[args.cov_pp, args.cov_pq],
                                              [args.cov_pq, args.cov_qq]]))
    writer = TableWriter(config,
                         {"state": "grid" if grid_state is not None else "gaussian"},
                         ["t", "mean_p", "mean_q", "cov_pp", "cov_pq", "cov_qq",
                          "mass"], out)
    for t in tgrid:
        t = float(t)
        if t == 0.0:
            mass = 1.0
            st = state0
            if grid_state is not None:
                mass, mean, cov = evolution.moments(grid_state)
                st = GaussianWigner(mean=mean, cov=cov)
            writer.emit([t, st.mean[0], st.mean[1], st.cov[0, 0],
                         st.cov[0, 1], st.cov[1, 1], mass])
            continue
        cov = covariance_data(t, green, kern, params)
        mt = classical_map(t, params, green)
        if grid_state is not None:
            evolved = evolution.evolve_grid(grid_state, t, cov, mt)
            mass, mean, cmat = evolution.moments(evolved)
        else:
            st = evolution.evolve_gaussian(state0, t, cov, mt)
            mass, mean, cmat = 1.0, st.mean, st.cov
        writer.emit([t, mean[0], mean[1], cmat[0, 0], cmat[0, 1], cmat[1, 1], mass])
    writer.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wigner-qbm",
        description="Phase-space dynamics of the damped quantum harmonic oscillator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--mass", type=float, default=1.0)
        sp.add_argument("--omega0", type=float, default=1.0)
        sp.add_argument("--hbar", type=float, default=1.0)
        sp.add_argument("--beta", type=float, default=1.0)
        sp.add_argument("--damping", choices=[STRICT_OHMIC, DRUDE_OHMIC],
                        default=STRICT_OHMIC)
        sp.add_argument("--gamma", type=float, default=0.0)
        sp.add_argument("--omega-c", type=float, default=None)
        sp.add_argument("--kernel", choices=[HIGH_T_DELTA, EXACT_DRUDE],
                        default=HIGH_T_DELTA)
        sp.add_argument("--t0", type=float, default=0.1)
        sp.add_argument("--t1", type=float, default=5.0)
        sp.add_argument("--nt", type=int, default=50)
        sp.add_argument("--format", dest="fmt", choices=["csv", "json"],
                        default="csv")
        sp.add_argument("--out", type=str, default=None)

    sp = sub.add_parser("propagator", help="a, b, c, Sigma, kernel covariance vs t")
    common(sp)
    sp.add_argument("--p0", type=float, default=1.0)
    sp.add_argument("--q0", type=float, default=0.0)

    sp = sub.add_parser("trajectories", help="stationary pair sampled on [t0, t1]")
    common(sp)
    sp.add_argument("--qp", type=float, default=1.0)
    sp.add_argument("--qtp", type=float, default=0.2)
    sp.add_argument("--qpp", type=float, default=0.5)
    sp.add_argument("--qtpp", type=float, default=0.4)

    sp = sub.add_parser("oracle", help="microscopic vs analytic comparison report")
    common(sp)
    sp.add_argument("--bath-n", type=int, default=300)
    sp.add_argument("--threshold", type=float, default=0.01)
    sp.add_argument("--p0", type=float, default=1.0)
    sp.add_argument("--q0", type=float, default=0.0)
    sp.add_argument("--cov-pp", type=float, default=0.5)
    sp.add_argument("--cov-pq", type=float, default=0.0)
    sp.add_argument("--cov-qq", type=float, default=0.5)

    sp = sub.add_parser("evolve", help="moment time series of an initial state")
    common(sp)
    sp.add_argument("--p0", type=float, default=1.0)
    sp.add_argument("--q0", type=float, default=0.0)
    sp.add_argument("--cov-pp", type=float, default=0.5)
    sp.add_argument("--cov-pq", type=float, default=0.0)
    sp.add_argument("--cov-qq", type=float, default=0.5)
    sp.add_argument("--grid-file", type=str, default=None,
                    help="npz with arrays p, q, values")
    return parser


def _validate(args) -> RunConfig:
    if args.nt < 1:
        raise ValueError("nt must be >= 1")
    if args.t1 < args.t0:
        raise ValueError("t1 must be >= t0")
    if args.kernel == EXACT_DRUDE and args.damping != DRUDE_OHMIC:
        raise ValueError("the exact kernel requires Drude damping")
    return RunConfig(
        command=args.command, mass=args.mass, omega0=args.omega0,
        hbar=args.hbar, beta=args.beta, damping=args.damping,
        gamma=args.gamma, omega_c=args.omega_c, kernel=args.kernel,
        t0=args.t0, t1=args.t1, nt=args.nt, fmt=args.fmt,
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    handlers = {
        "propagator": cmd_propagator,
        "trajectories": cmd_trajectories,
        "oracle": cmd_oracle,
        "evolve": cmd_evolve,
    }
    try:
        config = _validate(args)
        stream = open(args.out, "w") if args.out else sys.stdout
        try:
            return handlers[args.command](config, args, stream)
        finally:
            if args.out:
                stream.close()
    except CausticError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAUSTIC
    except UnderresolvedKernelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except DiagonalizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (ValueError, WignerQbmError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
