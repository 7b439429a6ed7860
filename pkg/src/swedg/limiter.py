"""Convex limiting of the high-order update against the low-order one.

The per-element correction matrix A_ij = dt (F^L_ij - F^H_ij) is
antisymmetric, couples only nodes of the same element (shared interface
fluxes cancel identically), and vanishes on the diagonal.  Symmetric
factors l_ij in [0, 1] then blend the two updates,

    m_i u_i = m_i u^L_i + sum_{j != i} l_ij A_ij,

which is conservative for any symmetric choice and keeps the water height
nonnegative for the factors computed here.
"""

import numpy as np

from .kernels import flux_matrix_high, flux_matrix_low

RELAX = 1e-14          # tolerated height undershoot before flooring
CROSS_TOL = 1e-13      # relative bound on cross-element correction entries


class PositivityError(RuntimeError):
    pass


def assemble_correction(disc, U, dt, face, elements, dvals=None):
    """Correction matrices A (ncomp, nel, Nq, Nq) on an element subset."""
    FH = flux_matrix_high(disc, U, face, elements)
    FL = flux_matrix_low(disc, U, face, elements, dvals=dvals)
    A = dt * (FL - FH)
    # shared interface fluxes enter both matrices identically, on the
    # diagonal; their difference must vanish there to rounding
    idx = np.arange(disc.n_nodes)
    diag = A[:, :, idx, idx]
    scale = max(1.0, float(np.abs(A).max()))
    if np.abs(diag).max() > CROSS_TOL * scale:
        raise PositivityError(
            "interface fluxes of the high and low order schemes disagree "
            f"(diagonal correction {np.abs(diag).max():.3e})")
    A[:, :, idx, idx] = 0.0
    return A


def nodewise_factor(hL, P):
    """Largest l in [0, 1] with hL + l P >= 0 (hL >= 0 assumed)."""
    hL = np.maximum(hL, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(P < 0, -hL / np.where(P < 0, P, -1.0), 1.0)
    return np.clip(np.where(hL + P >= 0.0, 1.0, ratio), 0.0, 1.0)


def symmetrize_factors(l_raw):
    """l_ij = l_ji = min(l^i_j, l^j_i)."""
    return np.minimum(l_raw, np.swapaxes(l_raw, -1, -2))


def elementwise_factor(l_sym):
    """Constant-per-element factor, the minimum over all node pairs."""
    lmin = l_sym.min(axis=(-1, -2), keepdims=True)
    return np.broadcast_to(lmin, l_sym.shape).copy()


def compute_factors(uL_sub, A, mass_sub, mode="nodewise"):
    """Symmetric limiting factors for a subset update.

    uL_sub: (ncomp, nel, Nq) low-order update; A: correction matrices;
    mass_sub: (nel, Nq).  Modes: nodewise, elementwise, none (all ones),
    zero (all zeros).
    """
    nel, Nq = mass_sub.shape
    if mode == "none":
        return np.ones((nel, Nq, Nq))
    if mode == "zero":
        return np.zeros((nel, Nq, Nq))
    lam = 1.0 / (Nq - 1)
    P = A[0] / (mass_sub[:, :, None] * lam)
    l_raw = nodewise_factor(uL_sub[0][:, :, None], P)
    idx = np.arange(Nq)
    l_raw[:, idx, idx] = 1.0
    l_sym = symmetrize_factors(l_raw)
    if mode == "elementwise":
        return elementwise_factor(l_sym)
    if mode != "nodewise":
        raise ValueError(f"unknown limiter mode {mode!r}")
    return l_sym


def apply_limited_update(uL_sub, A, factors, mass_sub):
    """Blended update u_i = uL_i + sum_j l_ij A_ij / m_i; checks h >= 0."""
    corr = np.einsum("eij,ceij->cei", factors, A)
    out = uL_sub + corr / mass_sub[None]
    hmin = float(out[0].min())
    scale = max(1.0, float(np.abs(uL_sub[0]).max()))
    if hmin < -RELAX * scale:
        raise PositivityError(
            f"limited water height {hmin:.3e} below the positivity floor")
    return out


def convex_split_check(uL_sub, A, factors, mass_sub):
    """Diagnostic: the convex-splitting form reproduces the limited update.

    Reconstructs u_i = sum_{j != i} lam_j (uL_i + l_ij P_ij) with uniform
    convex coefficients lam_j = 1/(Nq - 1) and P_ij = A_ij / (m_i lam_j),
    and returns its maximum deviation from apply_limited_update.  Each
    bracket has a nonnegative height by construction of the factors, which
    is the positivity argument.
    """
    nel, Nq = mass_sub.shape
    lam = 1.0 / (Nq - 1)
    P = A / (mass_sub[None, :, :, None] * lam)
    terms = uL_sub[:, :, :, None] + factors[None] * P
    mask = np.ones((Nq, Nq))
    np.fill_diagonal(mask, 0.0)
    recon = lam * np.einsum("ceij,ij->cei", terms, mask)
    direct = apply_limited_update(uL_sub, A, factors, mass_sub)
    return float(np.abs(recon - direct).max())


def limited_stage_update(disc, U, uH, uL, dt, face, mode, dvals=None):
    """Apply convex limiting where the high-order update went negative.

    Returns (result, stats) where stats records the number of limited
    elements and the smallest factor used.
    """
    result = uH.copy()
    trigger = np.nonzero(uH[0].min(axis=1) < 0.0)[0]
    stats = {"limited_elements": int(len(trigger)), "min_factor": 1.0}
    if len(trigger) == 0:
        return result, stats
    scale = max(1.0, float(np.abs(uL[0]).max()))
    if float(uL[0].min()) < -RELAX * scale:
        # the step exceeded the positivity bound of the stage state (wave
        # speeds grew between stages); the driver retries with a smaller dt
        raise PositivityError(
            f"low-order update height {uL[0].min():.3e} negative; "
            "timestep too large for this stage")
    A = assemble_correction(disc, U, dt, face, trigger, dvals=dvals)
    mass_sub = disc.mass[trigger]
    uL_sub = uL[:, trigger]
    factors = compute_factors(uL_sub, A, mass_sub, mode=mode)
    result[:, trigger] = apply_limited_update(uL_sub, A, factors, mass_sub)
    stats["min_factor"] = float(factors.min())
    return result, stats
