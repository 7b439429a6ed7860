"""Heun (SSP-RK2) time stepping with per-stage convex limiting.

Each stage is a forward-Euler step followed by limiting, height flooring
at the dry tolerance and momentum zeroing on dry nodes; the final Heun
average is a convex combination and preserves nonnegative heights.

The timestep is the minimum of the high-order CFL bound
dt_H = CFL h / C_N with C_N = (N+1)(N+2)/2 and the state-dependent
positivity bound of the low-order update, recomputed every step.
"""

from dataclasses import dataclass, field

import numpy as np

from .kernels import dt_low_bound, face_fluxes, rhs_high, rhs_low
from .limiter import limited_stage_update

MODES = ("nodewise", "elementwise", "low", "high")


@dataclass
class RunResult:
    U: np.ndarray
    t: float
    steps: int
    history: dict = field(default_factory=dict)


def dt_high(disc, cfl=0.125):
    """CFL bound for the high-order scheme; h is the min element diameter
    (twice the inradius in 2D, the element width in 1D)."""
    c_n = (disc.N + 1) * (disc.N + 2) / 2.0
    h_mesh = 2.0 * float(np.min(disc.geom.inradius))
    return cfl * h_mesh / c_n


def floor_state(disc, U):
    """Clip heights at the dry tolerance and zero momenta on dry nodes."""
    tol = disc.params.dry_tol
    U[0] = np.maximum(U[0], tol)
    dry = U[0] <= tol
    if np.any(dry):
        U[1:] = np.where(dry[None], 0.0, U[1:])
    return U


def euler_stage(disc, U, dt, mode, dissipation=True, precomputed_face=None):
    """One limited forward-Euler stage; returns (state, stats)."""
    if precomputed_face is None:
        W, lam = face_fluxes(disc, U, dissipation)
    else:
        W, lam = precomputed_face
    stats = {"limited_elements": 0, "min_factor": 1.0}

    if mode == "high":
        Unew = U + dt * rhs_high(disc, U, face=W)
    elif mode == "low":
        Unew = U + dt * rhs_low(disc, U, face=W, source="low")
        scale = max(1.0, float(np.abs(U[0]).max()))
        if float(Unew[0].min()) < -1e-14 * scale:
            from .limiter import PositivityError
            raise PositivityError(
                f"low-order height {Unew[0].min():.3e} negative; "
                "timestep too large for this stage")
    else:
        uH = U + dt * rhs_high(disc, U, face=W)
        dudt_l, dvals = rhs_low(disc, U, face=W, source="high",
                                return_viscosity=True)
        uL = U + dt * dudt_l
        Unew, stats = limited_stage_update(disc, U, uH, uL, dt, W, mode,
                                           dvals=dvals)
    stats["min_h_raw"] = float(Unew[0].min())
    return floor_state(disc, Unew), stats


def step_ssprk2(disc, U, dt, mode="nodewise", dissipation=True,
                precomputed_face=None):
    """Heun step: average of the state with two chained Euler stages."""
    u1, s1 = euler_stage(disc, U, dt, mode, dissipation, precomputed_face)
    u2, s2 = euler_stage(disc, u1, dt, mode, dissipation)
    Unew = floor_state(disc, 0.5 * (U + u2))
    stats = {
        "limited_elements": s1["limited_elements"] + s2["limited_elements"],
        "min_factor": min(s1["min_factor"], s2["min_factor"]),
        "min_h_raw": min(s1["min_h_raw"], s2["min_h_raw"]),
    }
    return Unew, stats


def advance(disc, U, t_end, mode="nodewise", cfl=0.125, dissipation=True,
            dt_mode="guaranteed", dt_fixed=None, max_steps=10_000_000,
            log_path=None, record_every=1):
    """Integrate to t_end; returns a RunResult with step histories."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    U = floor_state(disc, U.copy())
    dth = dt_high(disc, cfl)
    hist = {k: [] for k in ("t", "dt", "min_h", "min_h_raw", "mass",
                            "entropy", "limited_elements", "min_factor")}

    def record(t, dt, stats):
        hist["t"].append(t)
        hist["dt"].append(dt)
        hist["min_h"].append(float(U[0].min()))
        hist["min_h_raw"].append(stats.get("min_h_raw", float(U[0].min())))
        hist["mass"].append(disc.total_mass(U))
        hist["entropy"].append(disc.total_entropy(U))
        hist["limited_elements"].append(stats.get("limited_elements", 0))
        hist["min_factor"].append(stats.get("min_factor", 1.0))

    from .limiter import PositivityError

    log = open(log_path, "w") if log_path else None
    try:
        t, step = 0.0, 0
        record(t, 0.0, {})
        while t < t_end - 1e-14 and step < max_steps:
            W, lam = face_fluxes(disc, U, dissipation)
            if dt_fixed is not None:
                dt = dt_fixed
            elif mode == "high":
                # the unlimited scheme carries no positivity bound
                dt = dth
            else:
                dtl = dt_low_bound(disc, U, lam_face=lam, mode=dt_mode)
                dt = min(dth, dtl)
            dt = min(dt, t_end - t)
            # the positivity bound is evaluated at the step start; if wave
            # speeds grow within the step, retry the whole step smaller
            for _ in range(45):
                try:
                    U_next, stats = step_ssprk2(disc, U, dt, mode, dissipation,
                                                (W, lam))
                    break
                except PositivityError:
                    dt *= 0.5
            else:
                raise PositivityError("timestep underflow during retries")
            U = U_next
            t += dt
            step += 1
            if step % record_every == 0 or t >= t_end - 1e-14:
                record(t, dt, stats)
            if log:
                log.write(f"step {step} t {t:.10e} dt {dt:.6e} "
                          f"min_h {U[0].min():.6e} mass {hist['mass'][-1]:.16e} "
                          f"entropy {hist['entropy'][-1]:.16e}\n")
        if t < t_end - 1e-14:
            raise RuntimeError(f"step budget exhausted at t={t}")
    finally:
        if log:
            log.close()
    return RunResult(U=U, t=t, steps=step, history=hist)
