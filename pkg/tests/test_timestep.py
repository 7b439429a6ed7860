import numpy as np
import pytest

from swedg import kernels, timestep
from swedg.discretization import build_discretization
from swedg.mesh import build_split_quad_trimesh, build_uniform_mesh_1d
from swedg.physics import PhysParams


def test_dt_high_formula():
    m = build_uniform_mesh_1d(4, (0.0, 2.0))
    disc = build_discretization(m, 3, params=PhysParams(g=1.0), alpha="auto")
    # C_3 = 10, h = 0.5
    assert np.isclose(timestep.dt_high(disc, cfl=0.125), 0.125 * 0.5 / 10.0)
    m = build_uniform_mesh_1d(1, (0.0, 1.0), bc="wall")
    disc = build_discretization(m, 1, params=PhysParams(g=1.0), alpha="auto")
    assert np.isclose(timestep.dt_high(disc, cfl=1.0), 1.0 / 3.0)


def test_heun_second_order_on_linear_ode():
    # u' = -u integrated with the same stage arithmetic as step_ssprk2
    def heun(u0, dt, T):
        u = u0
        for _ in range(round(T / dt)):
            u1 = u + dt * (-u)
            u2 = u1 + dt * (-u1)
            u = 0.5 * (u + u2)
        return u
    exact = np.exp(-1.0)
    e1 = abs(heun(1.0, 0.01, 1.0) - exact)
    e2 = abs(heun(1.0, 0.005, 1.0) - exact)
    assert 3.5 < e1 / e2 < 4.5


def test_zero_rhs_keeps_state():
    m = build_uniform_mesh_1d(4, (0.0, 1.0))
    disc = build_discretization(m, 2, params=PhysParams(g=1.0), alpha="auto")
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([2.0 + 0.0 * x, 0.0 * x])
    Unew, _ = timestep.step_ssprk2(disc, U, 1e-3, mode="high")
    assert np.abs(Unew - U).max() < 1e-13


def test_lake_at_rest_full_step_unchanged():
    def bathy(x):
        return np.maximum(0.0, -20.0 * (x - 0.125) * (x + 0.125) + 2.0)
    m = build_uniform_mesh_1d(32, (-1.0, 1.0))
    disc = build_discretization(m, 3, params=PhysParams(g=9.81),
                                bathymetry=bathy, alpha="auto")
    h = np.maximum(2.0, disc.b) - disc.b
    U = timestep.floor_state(disc, np.stack([h, np.zeros_like(h)]))
    Unew, stats = timestep.step_ssprk2(disc, U, 1e-4, mode="nodewise")
    assert stats["limited_elements"] == 0
    assert np.abs(Unew - U).max() < 1e-13


def test_flooring_and_momentum_zeroing():
    m = build_uniform_mesh_1d(2, (0.0, 1.0))
    disc = build_discretization(m, 1, params=PhysParams(g=1.0), alpha="auto")
    U = np.array([[[0.0, 1e-20], [1.0, 1.0]],
                  [[0.5, 0.3], [0.2, 0.1]]], dtype=float)
    out = timestep.floor_state(disc, U.copy())
    assert np.all(out[0] >= disc.params.dry_tol)
    assert out[1, 0, 0] == 0.0 and out[1, 0, 1] == 0.0
    assert out[1, 1, 0] == 0.2  # wet nodes untouched


def test_advance_conserves_mass_periodic_flat():
    m = build_split_quad_trimesh(3, 3, ((-1.0, 1.0), (-1.0, 1.0)), bc="periodic")
    disc = build_discretization(m, 2, params=PhysParams(g=2.0), alpha="auto")
    x, y = disc.geom.nodes[:, :, 0], disc.geom.nodes[:, :, 1]
    U = np.stack([2.0 + 0.3 * np.sin(np.pi * x) * np.sin(np.pi * y),
                  0.1 * np.cos(np.pi * y), 0.05 * np.sin(np.pi * x)])
    masses = {}
    for mode in ("nodewise", "elementwise", "low", "high"):
        res = timestep.advance(disc, U, 0.02, mode=mode)
        hist = res.history["mass"]
        assert abs(hist[-1] - hist[0]) < 1e-12 * abs(hist[0])
        masses[mode] = hist[-1]
    vals = list(masses.values())
    for v in vals[1:]:
        assert abs(v - vals[0]) < 1e-12 * abs(vals[0])


def test_final_step_truncates_to_t_end():
    m = build_uniform_mesh_1d(4, (0.0, 1.0))
    disc = build_discretization(m, 2, params=PhysParams(g=1.0), alpha="auto")
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([1.0 + 0.1 * np.sin(2 * np.pi * x), 0.0 * x])
    res = timestep.advance(disc, U, 0.01, mode="high")
    assert np.isclose(res.t, 0.01, atol=1e-14)


def test_dt_nonincreasing_in_wave_speed():
    m = build_uniform_mesh_1d(8, (0.0, 1.0))
    disc = build_discretization(m, 2, params=PhysParams(g=1.0), alpha="auto")
    x = disc.geom.nodes[:, :, 0]
    U1 = np.stack([np.ones_like(x), np.zeros_like(x)])
    U2 = np.stack([np.ones_like(x), 5.0 * np.ones_like(x)])
    assert kernels.dt_low_bound(disc, U2) < kernels.dt_low_bound(disc, U1)


def test_bad_mode_rejected():
    m = build_uniform_mesh_1d(2, (0.0, 1.0))
    disc = build_discretization(m, 1, params=PhysParams(g=1.0), alpha="auto")
    U = np.ones((2, 2, 2))
    with pytest.raises(ValueError):
        timestep.advance(disc, U, 0.01, mode="bogus")


def test_run_log_written(tmp_path):
    m = build_uniform_mesh_1d(4, (0.0, 1.0))
    disc = build_discretization(m, 2, params=PhysParams(g=1.0), alpha="auto")
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([1.0 + 0.1 * np.sin(2 * np.pi * x), 0.0 * x])
    log = tmp_path / "run.log"
    timestep.advance(disc, U, 0.005, mode="high", log_path=str(log))
    lines = log.read_text().strip().splitlines()
    assert lines and lines[0].startswith("step 1 ")
    assert "mass" in lines[0] and "entropy" in lines[0]
