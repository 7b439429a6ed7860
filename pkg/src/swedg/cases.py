"""Benchmark case definitions: domains, bathymetry, initial data, exact
solutions and per-case defaults.

Exact solutions, where available, are callables (t, x[, y]) -> state tuple
restricted to the analytically wet region; ``exact_wet`` gives the wet
indicator used when errors are evaluated there.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .physics import DRY_TOL


@dataclass
class CaseSpec:
    name: str
    dim: int
    domain: tuple
    g: float
    t_end: float
    bc: str
    bathymetry: Optional[Callable] = None
    initial_h: Callable = None
    initial_momentum: tuple = ()
    exact: Optional[Callable] = None          # exact(t, *coords) -> tuple of arrays
    exact_wet: Optional[Callable] = None      # exact_wet(t, *coords) -> bool array
    internal_walls: tuple = ()
    default_resolution: tuple = ()
    default_N: int = 3
    steady: bool = False        # exact solution is the (discrete) initial state
    notes: dict = field(default_factory=dict)


def case_lake_at_rest(g=9.81):
    """Still water over a parabolic hump with a dry peak, fitted at +-1/8."""
    def bathy(x):
        return np.maximum(0.0, -20.0 * (x - 0.125) * (x + 0.125) + 2.0)

    def h0(x):
        return np.maximum(2.0, bathy(x)) - bathy(x)

    def exact(t, x):
        return h0(x), np.zeros_like(x)

    return CaseSpec(
        name="lake_at_rest", dim=1, domain=(-1.0, 1.0), g=g, t_end=1.0,
        bc="periodic", bathymetry=bathy, initial_h=h0,
        initial_momentum=(lambda x: np.zeros_like(x),),
        exact=exact, exact_wet=lambda t, x: h0(x) > 0,
        default_resolution=(128,), default_N=3, steady=True,
        notes={"fitted_interfaces": (-0.125, 0.125)})


def case_parabolic_bowl(g=9.81):
    """Planar oscillation in a parabolic basin (closed-form solution)."""
    h0c, a, B = 8.0, 2.0, 2.0
    omega = math.sqrt(2.0 * g * h0c) / a

    def bathy(x):
        return h0c * (x / a) ** 2

    def surface(t, x):
        return (h0c - B * B / (4.0 * g) * math.cos(2.0 * omega * t)
                - B * B / (4.0 * g)
                - (B * x / (2.0 * a)) * math.sqrt(8.0 * h0c / g)
                * math.cos(omega * t))

    def height(t, x):
        return np.maximum(0.0, surface(t, x) - bathy(x))

    def exact(t, x):
        h = height(t, x)
        u = B * math.sin(omega * t)
        return h, h * u

    def fronts(t):
        s = -(B * omega * a * a / (2.0 * g * h0c)) * math.cos(omega * t)
        return s - a, s + a

    def exact_wet(t, x):
        lo, hi = fronts(t)
        return (x > lo) & (x < hi)

    return CaseSpec(
        name="parabolic_bowl", dim=1, domain=(-5.0, 5.0), g=g, t_end=1.0,
        bc="periodic", bathymetry=bathy,
        initial_h=lambda x: height(0.0, x),
        initial_momentum=(lambda x: np.zeros_like(x),),
        exact=exact, exact_wet=exact_wet,
        default_resolution=(128,), default_N=3,
        notes={"omega": omega, "fronts": fronts})


def case_translating_vortex():
    """Smooth vortex advected by a uniform flow; exact at all times (g = 2)."""
    g = 2.0
    h_inf, beta = 1.0, 5.0
    u_inf, v_inf = 1.0, 0.0
    xc, yc = 0.0, 0.0

    def fields(t, x, y):
        xt = x - xc - u_inf * t
        yt = y - yc - v_inf * t
        r2 = xt * xt + yt * yt
        # velocity perturbation decays as exp(1 - r^2); the height
        # perturbation as its square, which closes the momentum balance
        env = np.exp(1.0 - r2)
        h = h_inf - beta * beta / (32.0 * np.pi ** 2) * env * env
        u = u_inf - beta / (2.0 * np.pi) * env * yt
        v = v_inf + beta / (2.0 * np.pi) * env * xt
        return h, h * u, h * v

    return CaseSpec(
        name="translating_vortex", dim=2,
        domain=((-10.0, 10.0), (-5.0, 5.0)), g=g, t_end=0.5,
        bc="periodic", bathymetry=None,
        initial_h=lambda x, y: fields(0.0, x, y)[0],
        initial_momentum=(lambda x, y: fields(0.0, x, y)[1],
                          lambda x, y: fields(0.0, x, y)[2]),
        exact=fields, exact_wet=lambda t, x, y: np.ones_like(x, dtype=bool),
        default_resolution=(32, 16), default_N=3)


def snap_to_grid(value, lo, hi, n):
    """Nearest mesh line of the uniform grid with n cells on [lo, hi]."""
    step = (hi - lo) / n
    return lo + step * round((value - lo) / step)


def case_dam_break(nx=48, ny=32, N=3, g=9.81):
    """Dam break through a gap in a reflective wall along the y-axis.

    The nominal gap (-0.1, 0.1) is snapped to the nearest mesh lines of the
    ny-cell grid; the snapped value is recorded in the case notes.
    """
    ylo, yhi = -1.0, 1.0
    gap_lo = snap_to_grid(-0.1, ylo, yhi, ny)
    gap_hi = snap_to_grid(0.1, ylo, yhi, ny)
    walls = (("x", 0.0, ylo, gap_lo), ("x", 0.0, gap_hi, yhi))

    def h0(x, y):
        return np.where(x < 0.0, 5.0, DRY_TOL) + 0.0 * y

    return CaseSpec(
        name="dam_break", dim=2, domain=((-1.0, 2.0), (ylo, yhi)), g=g,
        t_end=1.0, bc="wall", bathymetry=None,
        initial_h=h0,
        initial_momentum=(lambda x, y: np.zeros_like(x),
                          lambda x, y: np.zeros_like(x)),
        internal_walls=walls,
        default_resolution=(nx, ny), default_N=N,
        notes={"gap": (gap_lo, gap_hi), "nominal_gap": (-0.1, 0.1)})


def case_wave_over_bump(g=9.81):
    """Wave running over a never-submerged Gaussian bump (persistent dry area)."""
    def bathy(x, y):
        return 5.0 * np.exp(-25.0 * (x * x + y * y))

    def h0(x, y):
        return np.maximum(0.0, np.exp(-25.0 * (x + 0.5) ** 2) + 2.0 - bathy(x, y))

    def hu0(x, y):
        h = h0(x, y)
        return np.where(h > 2.0, h, 0.0)

    return CaseSpec(
        name="wave_over_bump", dim=2, domain=((-1.0, 1.0), (-1.0, 1.0)), g=g,
        t_end=1.0, bc="periodic", bathymetry=bathy,
        initial_h=h0,
        initial_momentum=(hu0, lambda x, y: np.zeros_like(x)),
        default_resolution=(64, 64), default_N=3)


def case_sine_wave_low_order(alpha=1.0, strict=False, g=9.81):
    """Low-order dissipation study: sine height profile at rest.

    The literal sine initial height is signed and fails state validation;
    the default shifts it up by 2 to keep h >= 0.  ``strict=True`` keeps the
    signed profile so the validation rejection itself can be exercised.
    """
    offset = 0.0 if strict else 2.0

    def h0(x, y):
        return offset + np.sin(np.pi * x) + 0.0 * y

    return CaseSpec(
        name="sine_wave_low_order", dim=2,
        domain=((-1.0, 1.0), (-1.0, 1.0)), g=g, t_end=0.1,
        bc="periodic", bathymetry=None,
        initial_h=h0,
        initial_momentum=(lambda x, y: np.zeros_like(x),
                          lambda x, y: np.zeros_like(x)),
        default_resolution=(16, 16), default_N=3,
        notes={"alpha": alpha, "strict": strict})


CASES = {
    "lake_at_rest": case_lake_at_rest,
    "parabolic_bowl": case_parabolic_bowl,
    "translating_vortex": case_translating_vortex,
    "dam_break": case_dam_break,
    "wave_over_bump": case_wave_over_bump,
    "sine_wave_low_order": case_sine_wave_low_order,
}


def get_case(name, **kwargs):
    if name not in CASES:
        raise KeyError(f"unknown case {name!r}; available: {sorted(CASES)}")
    return CASES[name](**kwargs)
