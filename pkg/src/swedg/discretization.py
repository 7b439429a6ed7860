"""Immutable per-simulation context: operators, geometry, connectivity.

Solution arrays have shape (ncomp, K, Nq) with the h component first.
Everything assembled here is read-only during time stepping, so element
kernels may share it freely.
"""

from dataclasses import dataclass, field

import numpy as np

from . import loworder, refelem
from .mesh import build_face_connectivity, compute_geometric_factors
from .physics import PhysParams


@dataclass
class Discretization:
    dim: int
    N: int
    params: PhysParams
    rule: object
    ops: object                  # high-order SBPOperators
    low: object                  # LowOrderOperators
    mesh: object
    geom: object
    conn: object
    b: np.ndarray                # (K, Nq) nodal bathymetry
    # derived arrays
    mass: np.ndarray             # (K, Nq)
    metric: np.ndarray           # (K, dim, dim); metric[e, d, k]
    Qref: tuple
    QLref: tuple
    qb_high: np.ndarray          # (dim, K, Nq) physical Q_d b
    qb_low: np.ndarray           # (dim, K, Nq) low-order Q_d^L b
    slot_node: np.ndarray        # (S,)
    scatter: np.ndarray          # (Nq, S) accumulation matrix for face slots
    ws: np.ndarray               # (K, S)
    nunit: np.ndarray            # (dim, K, S)
    nbr_elem: np.ndarray
    nbr_node: np.ndarray
    wall: np.ndarray
    edges: tuple                 # (i_idx, j_idx) of the reference graph edges
    qedge: np.ndarray            # (dim, K, nE) physical q_ij on graph edges
    qenorm: np.ndarray           # (K, nE)
    scat_edge_i: np.ndarray      # (Nq, nE) 0/1
    scat_edge_j: np.ndarray      # (Nq, nE) 0/1

    @property
    def ncomp(self):
        return self.dim + 1

    @property
    def n_elements(self):
        return self.mesh.n_elements

    @property
    def n_nodes(self):
        return self.rule.n_nodes

    def nodal(self, fn):
        """Evaluate fn(x[, y]) at all physical nodes, shape (K, Nq)."""
        coords = [self.geom.nodes[:, :, d] for d in range(self.dim)]
        return np.asarray(fn(*coords), dtype=float) + np.zeros_like(coords[0])

    def initial_state(self, h_fn, momentum_fns):
        """Nodal state (ncomp, K, Nq) from callables of the coordinates."""
        U = np.empty((self.ncomp,) + self.geom.nodes.shape[:2])
        U[0] = self.nodal(h_fn)
        for d, fn in enumerate(momentum_fns):
            U[1 + d] = self.nodal(fn)
        if np.any(U[0] < 0):
            raise ValueError("initial water height is negative")
        return U

    def total_mass(self, U):
        return float(np.sum(self.mass * U[0]))

    def total_entropy(self, U):
        from .physics import entropy_function
        return float(np.sum(self.mass * entropy_function(U, self.b, self.params)))

    def combine_metric(self, vecs, k):
        """sum_d metric[e, d, k] * vecs[d] for per-direction nodal arrays."""
        acc = self.metric[:, 0, k][:, None] * vecs[0]
        for d in range(1, self.dim):
            acc = acc + self.metric[:, d, k][:, None] * vecs[d]
        return acc

    def physical_matvec(self, Qref_tuple, vecs):
        """sum_d Q_d^phys @ vecs[d] evaluated via reference matrices.

        vecs is a (dim, K, Nq) array (or list of (K, Nq)); returns (K, Nq).
        """
        out = 0.0
        for k in range(self.dim):
            combined = self.combine_metric(vecs, k)
            out = out + combined @ Qref_tuple[k].T
        return out

    def directional_matvec(self, Qref_tuple, v, d):
        """Q_d^phys @ v for a single nodal array v (K, Nq)."""
        out = 0.0
        for k in range(self.dim):
            out = out + self.metric[:, d, k][:, None] * (v @ Qref_tuple[k].T)
        return out


def build_discretization(mesh, N, family="gauss_legendre_edge", params=None,
                         bathymetry=None, alpha=1.0, p=0.25):
    """Assemble the full solver context for a mesh and polynomial degree."""
    params = params or PhysParams()
    if mesh.dim == 1:
        ops = refelem.build_lobatto_sbp_1d(N)
        rule = ops.rule
    else:
        rule = refelem.load_triangle_sbp_nodes(N, family)
        ops = refelem.build_triangle_sbp_operators(rule, N)
    if alpha == "auto":
        alpha = loworder.smallest_connected_alpha(rule, p)
    low = loworder.build_low_order_operators(rule, alpha=alpha, p=p)

    geom = compute_geometric_factors(mesh, rule)
    conn = build_face_connectivity(mesh, geom, rule)

    K = mesh.n_elements
    Nq = rule.n_nodes
    slot_node, _, _ = rule.face_slots()
    S = len(slot_node)
    scatter = np.zeros((Nq, S))
    scatter[slot_node, np.arange(S)] = 1.0

    if bathymetry is None:
        b = np.zeros((K, Nq))
    else:
        coords = [geom.nodes[:, :, d] for d in range(mesh.dim)]
        b = np.asarray(bathymetry(*coords), dtype=float) + np.zeros((K, Nq))

    disc = Discretization(
        dim=mesh.dim, N=N, params=params, rule=rule, ops=ops, low=low,
        mesh=mesh, geom=geom, conn=conn, b=b,
        mass=geom.mass, metric=geom.metric,
        Qref=ops.Q, QLref=low.Q,
        qb_high=np.empty((mesh.dim, K, Nq)),
        qb_low=np.empty((mesh.dim, K, Nq)),
        slot_node=slot_node, scatter=scatter,
        ws=geom.face_weight,
        nunit=np.moveaxis(geom.face_normal, -1, 0),
        nbr_elem=conn.nbr_elem, nbr_node=conn.nbr_node, wall=conn.is_wall,
        edges=low.graph.edge_list(),
        qedge=np.empty(0), qenorm=np.empty(0),
        scat_edge_i=np.empty(0), scat_edge_j=np.empty(0))

    for d in range(mesh.dim):
        disc.qb_high[d] = disc.directional_matvec(ops.Q, b, d)
        disc.qb_low[d] = disc.directional_matvec(low.Q, b, d)

    ei, ej = disc.edges
    nE = len(ei)
    qedge = np.empty((mesh.dim, K, nE))
    for d in range(mesh.dim):
        qm = 0.0
        for k in range(mesh.dim):
            qm = qm + disc.metric[:, d, k][:, None] * low.Q[k][ei, ej][None, :]
        qedge[d] = qm
    disc.qedge = qedge
    disc.qenorm = np.sqrt(np.sum(qedge ** 2, axis=0))
    scat_i = np.zeros((Nq, nE))
    scat_j = np.zeros((Nq, nE))
    scat_i[ei, np.arange(nE)] = 1.0
    scat_j[ej, np.arange(nE)] = 1.0
    disc.scat_edge_i = scat_i
    disc.scat_edge_j = scat_j
    return disc
