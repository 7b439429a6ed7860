"""Build and verify the SBP operators on the interval and the triangle.

Walks through the operator stack: 1D Gauss-Lobatto operators, the
face-embedded triangle quadrature rules for both edge-node families, the
SBP identities Q + Q^T = B and exact differentiation of P^N, and the
sparse low-order operators built from the node connectivity graph.
"""

import numpy as np

from swedg import (build_lobatto_sbp_1d, build_triangle_sbp_operators,
                   load_triangle_sbp_nodes, verify_sbp)
from swedg.loworder import (build_connectivity_graph, build_low_order_operators,
                            operator_report, smallest_connected_alpha)

print("== 1D Gauss-Lobatto SBP operators ==")
for N in range(1, 8):
    print(" ", verify_sbp(build_lobatto_sbp_1d(N)).summary())

print("\n== Triangle SBP operators (face-embedded quadrature) ==")
for family in ("gauss_legendre_edge", "gauss_lobatto_edge"):
    for N in (1, 2, 3, 4):
        rule = load_triangle_sbp_nodes(N, family)
        ops = build_triangle_sbp_operators(rule)
        rep = verify_sbp(ops)
        print(f"  N_q={rule.n_nodes:3d}  {rep.summary()}")

print("\n== Derivative exactness demo (N=3 triangle, u = x^2 y) ==")
rule = load_triangle_sbp_nodes(3, "gauss_legendre_edge")
ops = build_triangle_sbp_operators(rule)
x, y = rule.nodes[:, 0], rule.nodes[:, 1]
u = x ** 2 * y
print("  max |D_x u - 2xy| =", np.abs(ops.D[0] @ u - 2 * x * y).max())
print("  max |D_y u - x^2| =", np.abs(ops.D[1] @ u - x ** 2).max())

print("\n== Low-order operators on the connectivity graph ==")
print(operator_report(rule))

print("\n  smallest connected radius per degree (Gauss-Legendre family):")
for N in (1, 2, 3, 4):
    r = load_triangle_sbp_nodes(N, "gauss_legendre_edge")
    print(f"    N={N}: alpha = {smallest_connected_alpha(r)}")

graph = build_connectivity_graph(rule, alpha=1.0)
low = build_low_order_operators(rule, graph=graph)
print(f"\n  N=3 graph at alpha=1.0: {graph.n_edges} edges; "
      f"Q^L row-sum residual {np.abs(low.Q[0].sum(axis=1)).max():.2e}")
