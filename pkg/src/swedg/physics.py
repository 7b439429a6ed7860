"""Shallow water state algebra: fluxes, entropy pairs, wave speeds.

States are numpy arrays with the component axis first: U[0] is the water
height h and U[1:] the momentum components (one in 1D, two in 2D).  All
functions broadcast over trailing axes, so the same code serves pointwise
evaluation, whole-mesh arrays and pairwise flux matrices.

The entropy is the total energy  S = h|v|^2/2 + g h^2/2 + g h b,  and the
two-point flux is the standard entropy-conservative average-form flux with
mass component {h v_d} and momentum components
{h v_d}{v_c} + delta_cd (g {h}^2 - g {h^2}/2).
"""

from dataclasses import dataclass

import numpy as np

DRY_TOL = 1e-14


@dataclass(frozen=True)
class PhysParams:
    g: float = 9.81
    dry_tol: float = DRY_TOL

    def __post_init__(self):
        if self.g <= 0 or self.dry_tol <= 0:
            raise ValueError("g and dry_tol must be positive")


def velocity(U, params):
    """Velocity components with the dry-state regularization hu / max(h, tol)."""
    h = np.maximum(U[0], params.dry_tol)
    return U[1:] / h


def physical_flux(U, params):
    """Fluxes f_d(U), returned as an array of shape (dim, ncomp, ...)."""
    dim = U.shape[0] - 1
    h = U[0]
    vel = velocity(U, params)
    half_gh2 = 0.5 * params.g * h * h
    out = np.empty((dim,) + U.shape, dtype=U.dtype)
    for d in range(dim):
        out[d, 0] = U[1 + d]
        for c in range(dim):
            out[d, 1 + c] = U[1 + d] * vel[c]
        out[d, 1 + d] += half_gh2
    return out


def entropy_function(U, b, params):
    """Total energy density S(U) = h|v|^2/2 + g h^2/2 + g h b."""
    h = U[0]
    vel = velocity(U, params)
    kinetic = 0.5 * np.sum(U[1:] * vel, axis=0)
    return kinetic + 0.5 * params.g * h * h + params.g * h * b


def entropy_variables(U, b, params):
    """Gradient of the entropy with respect to the conserved variables."""
    h = U[0]
    vel = velocity(U, params)
    out = np.empty_like(U)
    out[0] = params.g * (h + b) - 0.5 * np.sum(vel * vel, axis=0)
    out[1:] = vel
    return out


def entropy_potential(U, params):
    """Potentials psi_d = g h^2 v_d / 2 satisfying psi' = f (flat bottom)."""
    h = U[0]
    vel = velocity(U, params)
    return 0.5 * params.g * h * h * vel


def ec_flux(UL, UR, params, direction):
    """Entropy-conservative two-point flux in the given direction.

    Symmetric in (UL, UR) and consistent with physical_flux.  Broadcasting
    applies, so matrices of pairwise fluxes come from expanded-axis inputs.
    """
    g = params.g
    hL, hR = UL[0], UR[0]
    velL = velocity(UL, params)
    velR = velocity(UR, params)
    h_avg = 0.5 * (hL + hR)
    h2_avg = 0.5 * (hL * hL + hR * hR)
    hm_avg = 0.5 * (UL[1 + direction] + UR[1 + direction])
    vel_avg = 0.5 * (velL + velR)
    pressure = g * h_avg * h_avg - 0.5 * g * h2_avg

    shape = np.broadcast_shapes(UL.shape, UR.shape)
    out = np.empty(shape, dtype=np.result_type(UL, UR))
    out[0] = hm_avg
    for c in range(UL.shape[0] - 1):
        out[1 + c] = hm_avg * vel_avg[c]
    out[1 + direction] += pressure
    return out


def ec_flux_normal(UL, UR, n, params):
    """n . f_S(UL, UR) for a unit normal n with shape (dim, ...)."""
    dim = UL.shape[0] - 1
    acc = n[0] * ec_flux(UL, UR, params, 0)
    for d in range(1, dim):
        acc += n[d] * ec_flux(UL, UR, params, d)
    return acc


def max_wave_speed(Ui, Uj, n, params):
    """Wave speed bound max_s(|v_s . n| + sqrt(g h_s)), symmetric in (i, j)."""
    dim = Ui.shape[0] - 1
    vi = velocity(Ui, params)
    vj = velocity(Uj, params)
    vni = sum(vi[d] * n[d] for d in range(dim))
    vnj = sum(vj[d] * n[d] for d in range(dim))
    li = np.abs(vni) + np.sqrt(params.g * np.maximum(Ui[0], 0.0))
    lj = np.abs(vnj) + np.sqrt(params.g * np.maximum(Uj[0], 0.0))
    return np.maximum(li, lj)


def interface_flux(UL, UR, n, params, dissipation=1.0):
    """Lax-Friedrichs penalized entropy-stable interface flux.

    f* = n . f_S(UL, UR) - dissipation * lambda/2 * (UR - UL).
    """
    lam = max_wave_speed(UL, UR, n, params)
    return ec_flux_normal(UL, UR, n, params) - (0.5 * dissipation) * lam * (UR - UL)


def mirror_state(U, n):
    """Reflect the momentum about a wall with unit normal n; h is unchanged."""
    dim = U.shape[0] - 1
    mn = sum(U[1 + d] * n[d] for d in range(dim))
    out = U.copy()
    for d in range(dim):
        out[1 + d] = U[1 + d] - 2.0 * mn * n[d]
    return out
