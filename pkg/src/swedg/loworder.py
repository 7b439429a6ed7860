"""Sparse low-order SBP operators built from a node connectivity graph.

The construction is mesh-free on the reference element: nodes are joined
when their distance is below radius-scaled neighborhoods r_i = alpha w_i^p,
a Neumann-type graph-Laplacian problem supplies a potential whose pairwise
differences form the skew part, and Q^L = S + B/2 then satisfies

    (Q^L)_ij = -(Q^L)_ji  (i != j),   Q^L 1 = 0,   Q^L + (Q^L)^T = B.
"""

from dataclasses import dataclass

import numpy as np

OPERATOR_TOL = 1e-12


@dataclass
class ConnectivityGraph:
    """Undirected node graph on a reference element."""
    adjacency: np.ndarray      # (Nq, Nq) bool, zero diagonal, symmetric
    radii: np.ndarray
    alpha: float
    p: float

    @property
    def n_nodes(self):
        return self.adjacency.shape[0]

    @property
    def n_edges(self):
        return int(np.sum(self.adjacency) // 2)

    def edge_list(self):
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return i, j


@dataclass
class LowOrderOperators:
    """Reference-element low-order operators sharing the SBP boundary data."""
    graph: ConnectivityGraph
    Q: tuple                   # one (Nq, Nq) matrix per reference direction
    B: tuple


def build_connectivity_graph(rule, alpha=1.0, p=0.25):
    """Radius graph on the quadrature nodes; fails loudly if disconnected."""
    if alpha <= 0 or not 0 <= p <= 1:
        raise ValueError("need alpha > 0 and 0 <= p <= 1")
    pts = rule.nodes
    radii = alpha * rule.weights ** p
    d = np.sqrt(np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1))
    adj = d <= np.maximum(radii[:, None], radii[None, :])
    np.fill_diagonal(adj, False)
    graph = ConnectivityGraph(adjacency=adj, radii=radii, alpha=alpha, p=p)
    if not _connected(adj):
        raise ValueError(
            f"connectivity graph is disconnected for alpha={alpha}, p={p}; "
            "increase alpha")
    return graph


def _connected(adj):
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i])[0]:
            if not seen[j]:
                seen[j] = True
                stack.append(int(j))
    return bool(seen.all())


def smallest_connected_alpha(rule, p=0.25,
                             ladder=(1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 3.0)):
    """First alpha from the ladder whose radius graph is connected."""
    for alpha in ladder:
        try:
            build_connectivity_graph(rule, alpha, p)
            return alpha
        except ValueError:
            continue
    raise ValueError("no connected graph found; extend the alpha ladder")


def solve_graph_laplacian_potential(graph, b_diag):
    """Potential of the Neumann graph-Laplacian problem, with sum(phi) = 0.

    The sign of the right-hand side is fixed by the requirement Q^L 1 = 0
    of the assembled operator: L phi = -B 1 / 2.
    """
    adj = graph.adjacency.astype(float)
    lap = np.diag(adj.sum(axis=1)) - adj
    n = graph.n_nodes
    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = lap
    aug[:n, n] = 1.0
    aug[n, :n] = 1.0
    rhs = np.zeros(n + 1)
    rhs[:n] = -0.5 * np.asarray(b_diag)
    try:
        sol = np.linalg.solve(aug, rhs)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular graph-Laplacian system "
                         "(disconnected graph?)") from exc
    phi = sol[:n]
    if abs(phi.sum()) > 1e-12 * max(1.0, np.abs(phi).max()):
        raise ValueError("potential does not satisfy the zero-mean constraint")
    return phi


def assemble_low_order_operator(graph, phi, b_diag):
    """Q^L = S + B/2 with S_jk = phi_j - phi_k on graph edges."""
    adj = graph.adjacency
    S = np.where(adj, phi[:, None] - phi[None, :], 0.0)
    QL = S + 0.5 * np.diag(np.asarray(b_diag))
    _validate_low_order(QL, np.asarray(b_diag), adj)
    return QL


def _validate_low_order(QL, b_diag, adj):
    n = QL.shape[0]
    rowsum = np.abs(QL @ np.ones(n)).max()
    sbp = np.abs(QL + QL.T - np.diag(b_diag)).max()
    off = QL - np.diag(np.diag(QL))
    skew = np.abs(off + off.T).max()
    pattern_ok = not np.any((off != 0.0) & ~adj)
    if rowsum > OPERATOR_TOL or sbp > OPERATOR_TOL or skew > OPERATOR_TOL or not pattern_ok:
        raise ValueError(
            f"low-order operator invariant violated: rowsum {rowsum:.2e}, "
            f"SBP {sbp:.2e}, skew {skew:.2e}, pattern ok {pattern_ok}")


def build_low_order_operators(rule, alpha=1.0, p=0.25, graph=None):
    """Low-order Q^L in every reference direction for a quadrature rule."""
    if graph is None:
        graph = build_connectivity_graph(rule, alpha, p)
    Qs, Bs = [], []
    for d in range(rule.dim):
        b_diag = rule.boundary_matrix(d)
        phi = solve_graph_laplacian_potential(graph, b_diag)
        Qs.append(assemble_low_order_operator(graph, phi, b_diag))
        Bs.append(b_diag)
    return LowOrderOperators(graph=graph, Q=tuple(Qs), B=tuple(Bs))


def operator_report(rule, alphas=(1.0, 1.5, 2.25), p=0.25):
    """Text report of edge counts, nonzeros and invariant residuals."""
    lines = [f"low-order operator report: N={rule.degree} dim={rule.dim} "
             f"family={rule.family} (p={p})"]
    for alpha in alphas:
        try:
            graph = build_connectivity_graph(rule, alpha, p)
        except ValueError as exc:
            lines.append(f"  alpha={alpha}: {exc}")
            continue
        low = build_low_order_operators(rule, alpha, p, graph=graph)
        nnz = sum(int(np.sum(Q != 0.0)) for Q in low.Q)
        res = max(
            max(np.abs(Q @ np.ones(graph.n_nodes)).max(),
                np.abs(Q + Q.T - np.diag(B)).max())
            for Q, B in zip(low.Q, low.B))
        lines.append(f"  alpha={alpha}: {graph.n_edges} edges, {nnz} nonzeros, "
                     f"max invariant residual {res:.2e}")
    return "\n".join(lines)
