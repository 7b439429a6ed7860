import numpy as np
import pytest

from swedg.physics import (PhysParams, ec_flux, ec_flux_normal,
                           entropy_function, entropy_potential,
                           entropy_variables, interface_flux, max_wave_speed,
                           mirror_state, physical_flux, velocity)


def state(h, hu, hv=None):
    comps = [h, hu] if hv is None else [h, hu, hv]
    return np.array(comps, dtype=float)


def test_physical_flux_direct_evaluation():
    p = PhysParams(g=9.81)
    U = state(2.0, 6.0, 2.0)  # h=2, u=3, v=1
    F = physical_flux(U, p)
    assert np.allclose(F[0], [6.0, 18.0 + 0.5 * 9.81 * 4.0, 6.0])
    assert np.allclose(F[1], [2.0, 6.0, 2.0 + 0.5 * 9.81 * 4.0])


def test_physical_flux_dry_state():
    p = PhysParams(g=9.81)
    F = physical_flux(state(0.0, 0.0, 0.0), p)
    assert np.allclose(F, 0.0)


def test_physical_flux_at_rest():
    p = PhysParams(g=2.0)
    F = physical_flux(state(1.0, 0.0, 0.0), p)
    assert np.allclose(F[0], [0.0, 1.0, 0.0])


def test_entropy_function_values():
    assert entropy_function(state(1.0, 0.0, 0.0), 0.0, PhysParams(g=1.0)) == 0.5
    assert entropy_function(state(0.0, 0.0, 0.0), 0.0, PhysParams(g=1.0)) == 0.0
    val = entropy_function(state(2.0, 2.0, 0.0), 0.5, PhysParams(g=10.0))
    assert np.isclose(val, 1.0 + 20.0 + 10.0)


def test_entropy_variables_values():
    p = PhysParams(g=10.0)
    v = entropy_variables(state(2.0, 2.0, 4.0), 0.5, p)  # u=1, v=2
    assert np.allclose(v, [10.0 * 2.5 - 0.5 - 2.0, 1.0, 2.0])
    # rest state
    v = entropy_variables(state(3.0, 0.0, 0.0), 0.0, p)
    assert np.allclose(v, [30.0, 0.0, 0.0])


def test_lake_at_rest_entropy_variable_constant():
    p = PhysParams(g=9.81)
    b = np.array([0.0, 0.5, 1.0])
    h = 2.0 - b
    U = np.stack([h, np.zeros(3), np.zeros(3)])
    v = entropy_variables(U, b, p)
    assert np.allclose(v[0], 9.81 * 2.0)


def test_entropy_potential_value():
    p = PhysParams(g=1.0)
    psi = entropy_potential(state(1.0, 2.0, 0.0), p)
    assert np.isclose(psi[0], 1.0)
    psi = entropy_potential(state(3.0, 0.0, 5.0), p)
    assert psi[0] == 0.0


def test_ec_flux_consistency_and_symmetry():
    p = PhysParams(g=9.81)
    U = state(2.0, 6.0, 2.0)
    f = ec_flux(U, U, p, 0)
    assert np.allclose(f, physical_flux(U, p)[0])
    UL, UR = state(1.0, 0.3, -0.2), state(2.0, -0.5, 0.8)
    assert np.allclose(ec_flux(UL, UR, p, 1), ec_flux(UR, UL, p, 1))


def test_ec_flux_rest_pressure_only():
    p = PhysParams(g=1.0)
    f = ec_flux(state(1.0, 0.0, 0.0), state(2.0, 0.0, 0.0), p, 0)
    # {h} = 1.5, {h^2} = 2.5: pressure = 2.25 - 1.25 = 1
    assert np.allclose(f, [0.0, 1.0, 0.0])


def test_ec_identity_shuffle_condition():
    # (v_L - v_R) . f_S = psi_L - psi_R for random wet pairs, both directions
    p = PhysParams(g=9.81)
    rng = np.random.default_rng(42)
    n = 10_000
    hL, hR = rng.uniform(0.1, 5.0, n), rng.uniform(0.1, 5.0, n)
    velL = rng.uniform(-3, 3, (2, n))
    velR = rng.uniform(-3, 3, (2, n))
    UL = np.concatenate([hL[None], hL * velL])
    UR = np.concatenate([hR[None], hR * velR])
    vL = entropy_variables(UL, 0.0, p)
    vR = entropy_variables(UR, 0.0, p)
    psiL = entropy_potential(UL, p)
    psiR = entropy_potential(UR, p)
    for d in range(2):
        f = ec_flux(UL, UR, p, d)
        lhs = np.sum((vL - vR) * f, axis=0)
        rhs = psiL[d] - psiR[d]
        assert np.abs(lhs - rhs).max() < 1e-11


def test_max_wave_speed():
    p = PhysParams(g=1.0)
    U = state(1.0, 2.0, 0.0)  # u=2
    n = np.array([1.0, 0.0])
    assert np.isclose(max_wave_speed(U, U, n, p), 3.0)
    rest = state(1.0, 0.0, 0.0)
    assert np.isclose(max_wave_speed(rest, rest, n, p), 1.0)
    dry = state(0.0, 0.0, 0.0)
    assert max_wave_speed(dry, dry, n, p) == 0.0
    # symmetric, and at least the normal velocity of both states
    U2 = state(0.5, -1.0, 0.25)
    assert np.isclose(max_wave_speed(U, U2, n, p), max_wave_speed(U2, U, n, p))
    for s in (U, U2):
        vn = abs(velocity(s, p)[0])
        assert max_wave_speed(U, U2, n, p) >= vn - 1e-15


def test_interface_flux_consistency_and_rest_jump():
    p = PhysParams(g=1.0)
    n = np.array([1.0, 0.0])
    U = state(1.3, 0.4, -0.1)
    f = interface_flux(U, U, n, p)
    assert np.allclose(f, physical_flux(U, p)[0])
    UL, UR = state(1.0, 0.0, 0.0), state(2.0, 0.0, 0.0)
    lam = max_wave_speed(UL, UR, n, p)
    f = interface_flux(UL, UR, n, p)
    assert np.isclose(f[0], -0.5 * lam * 1.0)


def test_wall_mirror_blocks_mass_flux():
    p = PhysParams(g=9.81)
    n = np.array([0.6, 0.8])
    U = state(1.7, 0.9, -0.4)
    Um = mirror_state(U, n)
    f = interface_flux(U, Um, n, p)
    assert abs(f[0]) < 1e-15


def test_mirror_state_properties():
    n = np.array([1.0, 0.0])
    U = state(1.0, 2.0, 3.0)
    assert np.allclose(mirror_state(U, n), [1.0, -2.0, 3.0])
    # tangential flow unchanged
    Ut = state(1.0, 0.0, 3.0)
    assert np.allclose(mirror_state(Ut, n), Ut)
    # involution and norm preservation for a generic normal
    n = np.array([0.6, 0.8])
    Um = mirror_state(U, n)
    assert np.allclose(mirror_state(Um, n), U)
    assert np.isclose(np.hypot(Um[1], Um[2]), np.hypot(U[1], U[2]))


def test_one_dimensional_states():
    p = PhysParams(g=2.0)
    U = state(1.0, 0.5)
    F = physical_flux(U, p)
    assert F.shape == (1, 2)
    assert np.allclose(F[0], [0.5, 0.25 + 1.0])
    f = ec_flux(U, U, p, 0)
    assert np.allclose(f, F[0])


def test_params_validation():
    with pytest.raises(ValueError):
        PhysParams(g=-1.0)
    with pytest.raises(ValueError):
        PhysParams(dry_tol=0.0)
