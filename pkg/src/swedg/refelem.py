"""Reference-element quadrature rules and diagonal-norm SBP operators.

Supported elements: the interval [-1, 1] with Gauss-Lobatto nodes
(degrees 1..7) and the reference triangle with face-embedded quadrature
rules (degrees 1..4, Gauss-Legendre or Gauss-Lobatto edge nodes, loaded
from bundled node tables).

The operators satisfy, for each coordinate direction i,

    Q_i + Q_i^T = B_i          (summation by parts)
    M^{-1} Q_i u = du/dx_i     exactly for u in P^N at the nodes

with M = diag(w) the quadrature mass matrix and B_i the diagonal matrix
of face weights scaled by outward normal components.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from . import polybasis as pb

TABLE_DIR = os.path.join(os.path.dirname(__file__), "tables")

SBP_TOL = 1e-13        # Q + Q^T - B, absolute on reference element
ROWSUM_TOL = 1e-12     # Q 1 = 0
EXACTNESS_TOL = 1e-11  # derivative exactness on P^N
MOMENT_TOL = 1e-13     # quadrature moment checks

FAMILIES = ("gauss_legendre_edge", "gauss_lobatto_edge")
_FAMILY_ALIASES = {"gl": "gauss_legendre_edge", "glo": "gauss_lobatto_edge",
                   "gauss_legendre_edge": "gauss_legendre_edge",
                   "gauss_lobatto_edge": "gauss_lobatto_edge"}


@dataclass
class FaceRule:
    """Quadrature data on one face of the reference element."""
    node_indices: np.ndarray   # volume-node index of each face node
    weights: np.ndarray        # 1D face quadrature weights
    normal: np.ndarray         # outward normal scaled by the face Jacobian


@dataclass
class QuadratureRule:
    """Volume quadrature with embedded face quadrature on a reference element."""
    dim: int
    degree: int                # polynomial degree N of the intended operators
    family: str
    nodes: np.ndarray          # (Nq, dim)
    weights: np.ndarray        # (Nq,)
    faces: list = field(default_factory=list)

    @property
    def n_nodes(self):
        return self.nodes.shape[0]

    @property
    def n_face_nodes(self):
        return sum(len(f.node_indices) for f in self.faces)

    def face_slots(self):
        """Flattened per-slot arrays (node index, weight, scaled normal)."""
        idx = np.concatenate([f.node_indices for f in self.faces])
        w = np.concatenate([f.weights for f in self.faces])
        n = np.concatenate([np.tile(f.normal, (len(f.node_indices), 1))
                            for f in self.faces])
        return idx, w, n

    def boundary_matrix(self, direction):
        """Diagonal of B_i accumulated from the face rules."""
        b = np.zeros(self.n_nodes)
        for f in self.faces:
            np.add.at(b, f.node_indices, f.weights * f.normal[direction])
        return b


@dataclass
class SBPOperators:
    """Diagonal-norm SBP operators on a reference element."""
    N: int
    dim: int
    rule: QuadratureRule
    w: np.ndarray              # mass matrix diagonal
    Q: tuple                   # one dense matrix per reference direction
    B: tuple                   # diagonal vectors, one per direction
    D: tuple                   # M^{-1} Q_i

    @property
    def n_nodes(self):
        return len(self.w)


@dataclass
class VerificationReport:
    """Residuals of the SBP operator identities, with pass/fail flags."""
    N: int
    dim: int
    family: str
    sbp_residual: float
    exactness_residual: float
    rowsum_residual: float
    weights_positive: bool

    @property
    def passed(self):
        return (self.sbp_residual <= SBP_TOL
                and self.exactness_residual <= EXACTNESS_TOL
                and self.rowsum_residual <= ROWSUM_TOL
                and self.weights_positive)

    def summary(self):
        status = "pass" if self.passed else "FAIL"
        return (f"[{status}] N={self.N} dim={self.dim} family={self.family}: "
                f"SBP {self.sbp_residual:.2e}, exactness {self.exactness_residual:.2e}, "
                f"rowsum {self.rowsum_residual:.2e}")


def _accuracy_preserving_skew_part(V, C):
    """Solve S V = C for skew-symmetric S (minimal-correction closed form).

    Solvability requires V^T C to be skew, which holds when the volume rule
    is exact to degree 2N-1 and the face rule to degree 2N.
    """
    n = V.shape[0]
    Vp = np.linalg.pinv(V)
    S0 = C @ Vp + Vp.T @ C.T @ (V @ Vp - np.eye(n))
    return 0.5 * (S0 - S0.T)


def _build_operators(rule, V, Vgrads):
    """Assemble Q_i = skew + B_i/2 from Vandermonde data; raise if inaccurate."""
    M = rule.weights
    Qs, Bs, Ds = [], [], []
    for d in range(rule.dim):
        Bd = rule.boundary_matrix(d)
        C = M[:, None] * Vgrads[d] - 0.5 * Bd[:, None] * V
        S = _accuracy_preserving_skew_part(V, C)
        Qd = S + 0.5 * np.diag(Bd)
        resid = np.abs(Qd @ V - M[:, None] * Vgrads[d]).max()
        if resid > EXACTNESS_TOL:
            raise ValueError(
                f"SBP accuracy residual {resid:.3e} above tolerance for "
                f"direction {d}; quadrature rule is unsuitable")
        Qs.append(Qd)
        Bs.append(Bd)
        Ds.append(Qd / M[:, None])
    return SBPOperators(N=rule.degree, dim=rule.dim, rule=rule, w=M.copy(),
                        Q=tuple(Qs), B=tuple(Bs), D=tuple(Ds))


def build_lobatto_sbp_1d(N):
    """SBP operators on [-1, 1] with N+1 Gauss-Lobatto nodes."""
    if not 1 <= N <= 7:
        raise ValueError(f"1D degree must be in 1..7, got {N}")
    x, w = pb.gauss_lobatto(N + 1)
    faces = [FaceRule(np.array([0]), np.array([1.0]), np.array([-1.0])),
             FaceRule(np.array([N]), np.array([1.0]), np.array([1.0]))]
    rule = QuadratureRule(dim=1, degree=N, family="gauss_lobatto",
                          nodes=x[:, None], weights=w, faces=faces)
    V = pb.vandermonde_1d(N, x)
    Vx = pb.grad_vandermonde_1d(N, x)
    return _build_operators(rule, V, (Vx,))


def _table_path(N, family):
    tag = {"gauss_legendre_edge": "gl", "gauss_lobatto_edge": "glo"}[family]
    return os.path.join(TABLE_DIR, f"tri_sbp_N{N}_{tag}.txt")


def load_triangle_sbp_nodes(N, family):
    """Load a face-embedded SBP quadrature rule for the reference triangle.

    The volume rule is exact to degree 2N-1 and the face rule to degree 2N;
    both are verified by moment checks before the rule is returned.
    """
    family = _FAMILY_ALIASES.get(family)
    if family is None:
        raise ValueError(f"unknown family; use one of {FAMILIES}")
    if not 1 <= N <= 4:
        raise ValueError(f"triangle degree must be in 1..4, got {N}")
    path = _table_path(N, family)
    if not os.path.exists(path):
        raise FileNotFoundError(f"node table not found: {path}")

    with open(path) as fh:
        lines = [ln.strip() for ln in fh
                 if ln.strip() and not ln.lstrip().startswith("#")]
    n_hdr, d_hdr, nq, nf = (int(v) for v in lines[0].split())
    if n_hdr != N or d_hdr != 2:
        raise ValueError(f"table header mismatch in {path}")
    rows = np.array([[float(v) for v in lines[1 + i].split()] for i in range(nq)])
    nodes, weights = rows[:, :2], rows[:, 2]
    faces = []
    pos = 1 + nq
    for _ in range(nf):
        idx = np.array([int(v) for v in lines[pos].split()])
        fw = np.array([float(v) for v in lines[pos + 1].split()])
        nrm = np.array([float(v) for v in lines[pos + 2].split()])
        faces.append(FaceRule(idx, fw, nrm))
        pos += 3
    rule = QuadratureRule(dim=2, degree=N, family=family,
                          nodes=nodes, weights=weights, faces=faces)
    check_moments(rule)
    return rule


def check_moments(rule):
    """Validate positivity, embedding and quadrature exactness of a rule.

    Raises ValueError on any failure.  Volume moments are checked to degree
    2N-1 against analytic integrals; face moments to degree 2N against a
    high-order Gauss-Legendre line rule.
    """
    N = rule.degree
    if np.any(rule.weights <= 0.0):
        raise ValueError("nonpositive volume weight")
    for f in rule.faces:
        if np.any(f.weights <= 0.0):
            raise ValueError("nonpositive face weight")

    if rule.dim == 1:
        return  # Lobatto data is constructed, not tabulated

    x, y = rule.nodes[:, 0], rule.nodes[:, 1]
    for a in range(2 * N):
        for b in range(2 * N - a):
            err = abs(np.sum(rule.weights * x ** a * y ** b)
                      - pb.triangle_monomial_integral(a, b))
            if err > MOMENT_TOL * max(1.0, abs(pb.triangle_monomial_integral(a, b))):
                raise ValueError(
                    f"volume moment x^{a} y^{b} off by {err:.3e}")

    # face nodes must coincide with volume nodes and integrate edge traces
    tgl, wgl = pb.gauss_legendre(2 * N + 4)
    for f in rule.faces:
        fx, fy = x[f.node_indices], y[f.node_indices]
        A, Bv = _face_endpoints(f.normal)
        mid, half = 0.5 * (A + Bv), 0.5 * (Bv - A)
        # parameters of the face nodes along the edge
        t = ((np.column_stack([fx, fy]) - mid) @ half) / (half @ half)
        pts = mid + np.outer(t, half)
        if np.abs(pts - np.column_stack([fx, fy])).max() > 1e-12:
            raise ValueError("face node does not lie on its edge")
        ref = mid + np.outer(tgl, half)
        for a in range(2 * N + 1):
            for b in range(2 * N + 1 - a):
                approx = np.sum(f.weights * fx ** a * fy ** b)
                exact = np.sum(wgl * ref[:, 0] ** a * ref[:, 1] ** b)
                if abs(approx - exact) > MOMENT_TOL * max(1.0, abs(exact)):
                    raise ValueError(
                        f"face moment x^{a} y^{b} off by {abs(approx - exact):.3e}")


def _face_endpoints(normal):
    """Vertices of the reference-triangle edge with the given scaled normal."""
    v1, v2, v3 = (np.array([-1.0, -1.0]), np.array([1.0, -1.0]),
                  np.array([-1.0, 1.0]))
    for (A, B, nrm) in [(v1, v2, (0.0, -1.0)), (v2, v3, (1.0, 1.0)),
                        (v3, v1, (-1.0, 0.0))]:
        if np.allclose(normal, nrm, atol=1e-12):
            return A, B
    raise ValueError(f"unrecognized face normal {normal}")


def build_triangle_sbp_operators(rule, N=None):
    """SBP operators on the reference triangle from a face-embedded rule."""
    if N is None:
        N = rule.degree
    if N != rule.degree:
        raise ValueError("requested degree does not match the quadrature rule")
    r, s = rule.nodes[:, 0], rule.nodes[:, 1]
    V = pb.vandermonde_2d(N, r, s)
    if np.linalg.matrix_rank(V) < V.shape[1]:
        raise ValueError("quadrature nodes do not determine P^N (rank deficient)")
    Vr, Vs = pb.grad_vandermonde_2d(N, r, s)
    return _build_operators(rule, V, (Vr, Vs))


def build_operators(N, family="gauss_legendre_edge", dim=2):
    """Convenience wrapper: load the rule (2D) and build operators."""
    if dim == 1:
        return build_lobatto_sbp_1d(N)
    rule = load_triangle_sbp_nodes(N, family)
    return build_triangle_sbp_operators(rule, N)


def _monomial_exponents(N, dim):
    if dim == 1:
        return [(a,) for a in range(N + 1)]
    return [(a, b) for a in range(N + 1) for b in range(N + 1 - a)]


def verify_sbp(ops, N=None):
    """Report residuals of the SBP identities and polynomial exactness."""
    if N is None:
        N = ops.N
    nodes = ops.rule.nodes
    sbp_res = max(np.abs(Q + Q.T - np.diag(B)).max()
                  for Q, B in zip(ops.Q, ops.B))
    rowsum_res = max(np.abs(Q @ np.ones(ops.n_nodes)).max() for Q in ops.Q)

    exact_res = 0.0
    for exps in _monomial_exponents(N, ops.dim):
        u = np.ones(ops.n_nodes)
        for d, e in enumerate(exps):
            u = u * nodes[:, d] ** e
        for d in range(ops.dim):
            if exps[d] == 0:
                du = np.zeros(ops.n_nodes)
            else:
                du = exps[d] * nodes[:, d] ** (exps[d] - 1)
                for d2, e2 in enumerate(exps):
                    if d2 != d:
                        du = du * nodes[:, d2] ** e2
            exact_res = max(exact_res, np.abs(ops.D[d] @ u - du).max())

    return VerificationReport(
        N=N, dim=ops.dim, family=ops.rule.family,
        sbp_residual=float(sbp_res),
        exactness_residual=float(exact_res),
        rowsum_residual=float(rowsum_res),
        weights_positive=bool(np.all(ops.w > 0)))
