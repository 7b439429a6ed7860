"""Simulation configuration and the end-to-end experiment driver."""

import os
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import output
from .cases import get_case
from .discretization import build_discretization
from .errors import ErrorReport, compute_l2_error
from .loworder import smallest_connected_alpha
from .mesh import build_split_quad_trimesh, build_uniform_mesh_1d
from .physics import PhysParams
from .refelem import load_triangle_sbp_nodes
from .timestep import advance

LIMITER_MODES = ("nodewise", "elementwise", "low", "high")


@dataclass
class SimulationConfig:
    case: str
    N: int = 3
    resolution: tuple = ()          # (K,) in 1D, (nx, ny) in 2D
    limiter: str = "nodewise"
    cfl: float = 0.125
    family: str = "gauss_legendre_edge"
    alpha: float = 1.0              # "auto" picks the smallest connected radius
    p: float = 0.25
    t_end: float = None
    g: float = None
    out_dir: str = None
    snapshots: tuple = ()
    dt_mode: str = "guaranteed"
    dissipation: bool = True
    threads: int = 1
    case_kwargs: dict = field(default_factory=dict)


@dataclass
class RunOutput:
    config: SimulationConfig
    case: object
    disc: object
    result: object
    summary: dict
    errors: dict = None
    drift: dict = None


def _resolve_alpha(config, dim):
    if config.alpha != "auto":
        return float(config.alpha)
    if dim == 1:
        from .refelem import build_lobatto_sbp_1d
        rule = build_lobatto_sbp_1d(config.N).rule
    else:
        rule = load_triangle_sbp_nodes(config.N, config.family)
    return smallest_connected_alpha(rule, config.p)


def build_case_discretization(config):
    """Mesh, case and discretization for a configuration."""
    kwargs = dict(config.case_kwargs)
    if config.g is not None and config.case != "translating_vortex":
        kwargs.setdefault("g", config.g)
    if config.case == "dam_break" and config.resolution:
        kwargs.setdefault("nx", config.resolution[0])
        kwargs.setdefault("ny", config.resolution[1])
        kwargs.setdefault("N", config.N)
    case = get_case(config.case, **kwargs)

    res = tuple(config.resolution) or case.default_resolution
    if case.dim == 1:
        mesh = build_uniform_mesh_1d(res[0], case.domain, bc=case.bc)
    else:
        mesh = build_split_quad_trimesh(res[0], res[1], case.domain,
                                        bc=case.bc,
                                        internal_walls=case.internal_walls)
    params = PhysParams(g=case.g)
    alpha = _resolve_alpha(config, case.dim)
    disc = build_discretization(mesh, config.N, config.family, params,
                                bathymetry=case.bathymetry,
                                alpha=alpha, p=config.p)
    return case, disc, res, alpha


def run_simulation(config):
    """Run one configured experiment; write outputs if out_dir is set."""
    if config.limiter not in LIMITER_MODES:
        raise ValueError(f"limiter must be one of {LIMITER_MODES}")
    case, disc, res, alpha = build_case_discretization(config)
    U = disc.initial_state(case.initial_h, case.initial_momentum)
    U0 = U.copy() if case.steady else None
    t_end = config.t_end if config.t_end is not None else case.t_end

    out_dir = output.ensure_dir(config.out_dir)
    log_path = os.path.join(out_dir, "run.log") if out_dir else None

    wall0 = time.perf_counter()
    snap_times = sorted(t for t in config.snapshots if 0.0 < t < t_end)
    snaps = []
    t0 = 0.0
    result = None
    history = None
    total_steps = 0
    for i, ts in enumerate(snap_times + [t_end]):
        result = advance(disc, U, ts - t0, mode=config.limiter, cfl=config.cfl,
                         dissipation=config.dissipation, dt_mode=config.dt_mode,
                         log_path=log_path if i == 0 else None)
        U = result.U
        total_steps += result.steps
        if history is None:
            history = {k: list(v) for k, v in result.history.items()}
        else:
            for k, v in result.history.items():
                if k == "t":
                    history[k].extend(t0 + tv for tv in v[1:])
                else:
                    history[k].extend(v[1:])
        t0 = ts
        snaps.append((ts, U.copy()))
    result.history = history
    result.steps = total_steps
    wall = time.perf_counter() - wall0

    errors = None
    drift = None
    if case.exact is not None:
        errors = compute_l2_error(disc, U, case.exact, t_end,
                                  exact_wet=case.exact_wet)
    if U0 is not None:
        from .errors import compute_l2_error_vs_nodal
        from .timestep import floor_state
        drift = compute_l2_error_vs_nodal(disc, U, floor_state(disc, U0))

    summary = {
        "case": case.name,
        "config": {k: (v if not isinstance(v, dict) else dict(v))
                   for k, v in asdict(config).items()},
        "resolution": list(res),
        "alpha": alpha,
        "t_end": t_end,
        "steps": result.steps,
        "wall_seconds": wall,
        "mass_history": result.history["mass"],
        "entropy_history": result.history["entropy"],
        "min_h_history": result.history["min_h"],
        "min_h_raw_history": result.history["min_h_raw"],
        "limited_elements_history": result.history["limited_elements"],
        "min_factor_history": result.history["min_factor"],
        "time_history": result.history["t"],
        "notes": {k: v for k, v in case.notes.items() if _is_plain(v)},
    }
    if errors is not None:
        summary["l2_errors"] = errors
    if drift is not None:
        summary["l2_drift_from_initial"] = drift

    if out_dir:
        for ts, state in snaps:
            tag = f"{ts:.6f}".rstrip("0").rstrip(".").replace(".", "p")
            output.write_state_csv(disc, state,
                                   os.path.join(out_dir, f"state_t{tag}.csv"))
        if disc.dim == 2:
            output.write_vtk_solution(disc, U, os.path.join(out_dir, "final.vtk"))
        output.write_summary_json(summary, os.path.join(out_dir, "summary.json"))
    return RunOutput(config=config, case=case, disc=disc, result=result,
                     summary=summary, errors=errors, drift=drift)


def _is_plain(v):
    return isinstance(v, (int, float, str, bool, tuple, list))


def run_convergence_study(config, resolutions, match_time_order=True):
    """Errors and rates over a sequence of uniform refinements.

    With ``match_time_order`` the CFL number is reduced with the mesh so the
    second-order time integrator does not mask spatial convergence at high
    polynomial degree.
    """
    report = ErrorReport()
    base_cfl = config.cfl
    for level, res in enumerate(resolutions):
        cfl = base_cfl
        if match_time_order and config.N >= 2:
            cfl = base_cfl * 0.5 ** (level * (config.N - 1) / 2.0)
        cfg = SimulationConfig(**{**asdict(config), "resolution": tuple(res),
                                  "cfl": cfl, "out_dir": None,
                                  "snapshots": ()})
        out = run_simulation(cfg)
        if out.errors is None:
            raise ValueError(f"case {config.case!r} has no exact solution")
        report.resolutions.append(tuple(res))
        h_mesh = 2.0 * float(np.min(out.disc.geom.inradius))
        report.mesh_sizes.append(h_mesh)
        report.errors.append(out.errors)
    report.compute_rates()
    if config.out_dir:
        output.ensure_dir(config.out_dir)
        report.to_csv(os.path.join(config.out_dir,
                                   f"convergence_{config.case}_N{config.N}.csv"))
    return report
