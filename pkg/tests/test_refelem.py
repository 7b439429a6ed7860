import numpy as np
import pytest

from swedg import polybasis as pb
from swedg.refelem import (EXACTNESS_TOL, ROWSUM_TOL, SBP_TOL, FAMILIES,
                           build_lobatto_sbp_1d, build_triangle_sbp_operators,
                           load_triangle_sbp_nodes, verify_sbp)

ALL_2D = [(N, fam) for N in (1, 2, 3, 4) for fam in FAMILIES]


def test_lobatto_1d_n1_matches_hand_computation():
    ops = build_lobatto_sbp_1d(1)
    assert np.allclose(ops.rule.nodes[:, 0], [-1.0, 1.0])
    assert np.allclose(ops.w, [1.0, 1.0])
    assert np.allclose(ops.Q[0], [[-0.5, 0.5], [-0.5, 0.5]], atol=1e-15)
    assert np.allclose(ops.B[0], [-1.0, 1.0])


@pytest.mark.parametrize("N", range(1, 8))
def test_lobatto_1d_sbp_identities(N):
    ops = build_lobatto_sbp_1d(N)
    rep = verify_sbp(ops)
    assert rep.passed, rep.summary()
    # derivative exactness on x^2 specifically (N >= 2)
    if N >= 2:
        x = ops.rule.nodes[:, 0]
        assert np.abs(ops.D[0] @ (x ** 2) - 2 * x).max() < 1e-13


def test_lobatto_1d_degree_range():
    with pytest.raises(ValueError):
        build_lobatto_sbp_1d(0)
    with pytest.raises(ValueError):
        build_lobatto_sbp_1d(8)


@pytest.mark.parametrize("N,family", ALL_2D)
def test_triangle_rule_weights_and_measure(N, family):
    rule = load_triangle_sbp_nodes(N, family)
    assert np.all(rule.weights > 0)
    assert abs(rule.weights.sum() - 2.0) < 1e-13
    for f in rule.faces:
        assert np.all(f.weights > 0)


@pytest.mark.parametrize("N,family", ALL_2D)
def test_triangle_volume_moments_against_sympy(N, family):
    sympy = pytest.importorskip("sympy")
    x, y = sympy.symbols("x y")
    rule = load_triangle_sbp_nodes(N, family)
    xs, ys = rule.nodes[:, 0], rule.nodes[:, 1]
    for a in range(2 * N):
        for b in range(2 * N - a):
            exact = sympy.integrate(
                sympy.integrate(x ** a * y ** b, (y, -1, -x)), (x, -1, 1))
            approx = np.sum(rule.weights * xs ** a * ys ** b)
            assert abs(approx - float(exact)) < 1e-13


def test_triangle_first_moment_n2():
    rule = load_triangle_sbp_nodes(2, "gauss_legendre_edge")
    # analytic first moment of the reference triangle: area * centroid_x
    assert abs(np.sum(rule.weights * rule.nodes[:, 0]) - (-2.0 / 3.0)) < 1e-14


def test_face_nodes_lie_on_edges_and_integrate_traces():
    sympy = pytest.importorskip("sympy")
    t = sympy.symbols("t")
    rule = load_triangle_sbp_nodes(3, "gauss_legendre_edge")
    verts = {(0.0, -1.0): ((-1, -1), (1, -1)),
             (1.0, 1.0): ((1, -1), (-1, 1)),
             (-1.0, 0.0): ((-1, 1), (-1, -1))}
    for f in rule.faces:
        assert len(f.node_indices) == 4
        A, B = verts[tuple(f.normal)]
        xs = rule.nodes[f.node_indices]
        # edge parametrization p(t) = mid + t (B - A)/2
        mid = 0.5 * (np.array(A) + np.array(B))
        half = 0.5 * (np.array(B) - np.array(A))
        ts = (xs - mid) @ half / (half @ half)
        assert np.abs(mid + np.outer(ts, half) - xs).max() < 1e-14
        # trace quadrature exact to degree 2N
        for deg in range(2 * 3 + 1):
            px = (mid[0] + t * half[0]) ** deg
            exact = float(sympy.integrate(px, (t, -1, 1)))
            approx = float(np.sum(f.weights * xs[:, 0] ** deg))
            assert abs(approx - exact) < 1e-12


@pytest.mark.parametrize("N,family", ALL_2D)
def test_triangle_sbp_operator_invariants(N, family):
    rule = load_triangle_sbp_nodes(N, family)
    ops = build_triangle_sbp_operators(rule)
    rep = verify_sbp(ops)
    assert rep.sbp_residual <= SBP_TOL
    assert rep.exactness_residual <= EXACTNESS_TOL
    assert rep.rowsum_residual <= ROWSUM_TOL
    assert rep.passed


def test_triangle_dx_on_xy_product():
    rule = load_triangle_sbp_nodes(2, "gauss_legendre_edge")
    ops = build_triangle_sbp_operators(rule)
    xs, ys = rule.nodes[:, 0], rule.nodes[:, 1]
    assert np.abs(ops.D[0] @ (xs * ys) - ys).max() <= 1e-12
    assert np.abs(ops.D[1] @ (xs * ys) - xs).max() <= 1e-12


def test_constants_annihilated():
    for N, family in ALL_2D:
        ops = build_triangle_sbp_operators(load_triangle_sbp_nodes(N, family))
        one = np.ones(ops.n_nodes)
        for Q in ops.Q:
            assert np.abs(Q @ one).max() < 1e-12


def test_verify_sbp_flags_perturbation():
    ops = build_lobatto_sbp_1d(2)
    Q = ops.Q[0].copy()
    Q[0, 1] += 1e-6
    from swedg.refelem import SBPOperators
    bad = SBPOperators(N=ops.N, dim=1, rule=ops.rule, w=ops.w,
                       Q=(Q,), B=ops.B, D=(Q / ops.w[:, None],))
    rep = verify_sbp(bad)
    assert not rep.passed
    assert rep.sbp_residual == pytest.approx(1e-6, rel=1e-6)


def test_unknown_family_and_degree():
    with pytest.raises(ValueError):
        load_triangle_sbp_nodes(3, "unknown")
    with pytest.raises(ValueError):
        load_triangle_sbp_nodes(5, "gauss_legendre_edge")


def test_outward_normals_sum_to_zero():
    for N, family in ALL_2D:
        rule = load_triangle_sbp_nodes(N, family)
        total = np.zeros(2)
        for f in rule.faces:
            total += f.normal * f.weights.sum()
        assert np.abs(total).max() < 1e-13
