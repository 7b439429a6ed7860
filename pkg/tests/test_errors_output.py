import json

import numpy as np
import pytest

from swedg import output
from swedg.discretization import build_discretization
from swedg.errors import (compute_l2_error, compute_l2_error_vs_nodal,
                          observed_rates)
from swedg.mesh import build_split_quad_trimesh, build_uniform_mesh_1d
from swedg.physics import PhysParams
from swedg import polybasis as pb


def disc_1d(N=3, K=8, domain=(-1.0, 1.0)):
    m = build_uniform_mesh_1d(K, domain)
    return build_discretization(m, N, params=PhysParams(g=1.0), alpha="auto")


def test_error_zero_for_exact_constant():
    disc = disc_1d()
    U = np.stack([2.0 * np.ones((8, 4)), np.zeros((8, 4))])
    errs = compute_l2_error(disc, U, lambda t, x: (2.0 + 0 * x, 0 * x), 0.0)
    assert errs["combined"] < 1e-14


def test_projection_reproduces_polynomials():
    # numerical data sampled from x reproduces x: error 0 up to rounding
    disc = disc_1d(N=2, K=4)
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([x.copy(), np.zeros_like(x)])
    errs = compute_l2_error(disc, U, lambda t, xx: (xx, 0 * xx), 0.0)
    assert errs["h"] < 1e-14


def test_best_approximation_error_of_higher_monomial():
    # nodal samples of x^{N+1} on one reference element: the measured error
    # equals the L2 distance of the discrete projection to the exact monomial
    N, K = 2, 1
    disc = disc_1d(N=N, K=K, domain=(-1.0, 1.0))
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([x ** (N + 1), np.zeros_like(x)])
    errs = compute_l2_error(disc, U, lambda t, xx: (xx ** (N + 1), 0 * xx), 0.0)
    # oracle: project the Lobatto samples with the same discrete Gram matrix,
    # then integrate the difference with an independent fine quadrature
    V = pb.vandermonde_1d(N, x[0])
    M = disc.rule.weights
    G = V.T @ (M[:, None] * V)
    coeff = np.linalg.solve(G, V.T @ (M * x[0] ** (N + 1)))
    xg, wg = pb.gauss_legendre(20)
    diff = pb.vandermonde_1d(N, xg) @ coeff - xg ** (N + 1)
    expected = np.sqrt(np.sum(wg * diff ** 2))
    assert errs["h"] == pytest.approx(expected, rel=1e-12)


def test_wet_region_mask_restricts_error():
    disc = disc_1d(N=2, K=8)
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([np.ones_like(x), np.zeros_like(x)])

    def exact(t, xx):
        return np.ones_like(xx), np.zeros_like(xx)

    # wrong numerical values on the left half, mask selects the right half
    U[0] = np.where(x < 0, 7.0, 1.0)
    errs = compute_l2_error(disc, U, exact, 0.0,
                            exact_wet=lambda t, xx: xx > 0)
    assert errs["combined"] < 1e-13


def test_drift_error_measure():
    disc = disc_1d(N=2, K=4)
    x = disc.geom.nodes[:, :, 0]
    U0 = np.stack([1.0 + x ** 2, np.zeros_like(x)])
    errs = compute_l2_error_vs_nodal(disc, U0 + 1e-13, U0)
    assert 1e-14 < errs["h"] < 1e-12


def test_observed_rates():
    rates = observed_rates([1.0, 0.25, 0.0625])
    assert np.allclose(rates, [2.0, 2.0])


def test_csv_roundtrip(tmp_path):
    disc = disc_1d(N=2, K=3)
    x = disc.geom.nodes[:, :, 0]
    U = np.stack([1.0 + 0.1 * np.sin(np.pi * x), 0.3 * np.cos(x)])
    path = tmp_path / "state.csv"
    output.write_state_csv(disc, U, str(path))
    header, data = output.read_state_csv(str(path))
    assert header == ["x", "h", "hu", "b"]
    assert data.shape[0] == disc.n_elements * disc.n_nodes
    # 17 significant digits give a bitwise round trip
    assert np.all(data[:, 0] == x.ravel())
    assert np.all(data[:, 1] == U[0].ravel())
    assert np.all(data[:, 2] == U[1].ravel())


def test_csv_2d_columns(tmp_path):
    m = build_split_quad_trimesh(2, 2, ((0.0, 1.0), (0.0, 1.0)), bc="periodic")
    disc = build_discretization(m, 2, params=PhysParams(g=1.0), alpha="auto")
    U = np.ones((3, disc.n_elements, disc.n_nodes))
    path = tmp_path / "state2d.csv"
    output.write_state_csv(disc, U, str(path))
    header, data = output.read_state_csv(str(path))
    assert header == ["x", "y", "h", "hu", "hv", "b"]
    assert data.shape == (disc.n_elements * disc.n_nodes, 6)


def test_summary_json(tmp_path):
    path = tmp_path / "summary.json"
    output.write_summary_json({"a": np.float64(1.5), "b": [1, 2]}, str(path))
    loaded = json.loads(path.read_text())
    assert loaded["a"] == 1.5 and loaded["schema_version"] == 1


def test_vtk_solution(tmp_path):
    m = build_split_quad_trimesh(2, 1, ((0.0, 1.0), (0.0, 1.0)), bc="periodic")
    disc = build_discretization(m, 1, params=PhysParams(g=1.0), alpha="auto")
    U = np.ones((3, disc.n_elements, disc.n_nodes))
    path = tmp_path / "sol.vtk"
    output.write_vtk_solution(disc, U, str(path))
    text = path.read_text()
    assert "POINT_DATA" in text and "SCALARS h" in text
