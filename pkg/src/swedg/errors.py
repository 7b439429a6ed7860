"""L2 error evaluation and convergence studies.

Nodal SBP solutions do not live in a polynomial space, so errors are
measured by first L2-projecting the nodal values onto P^N per element and
then integrating the squared difference to the exact solution with a
quadrature exact to degree 2N+2 (restricted to the analytically wet
region when one is given).
"""

from dataclasses import dataclass, field

import numpy as np

from . import polybasis as pb


@dataclass
class ErrorReport:
    resolutions: list = field(default_factory=list)
    mesh_sizes: list = field(default_factory=list)
    errors: list = field(default_factory=list)      # list of dicts per level
    rates: dict = field(default_factory=dict)       # component -> list of rates

    def component_errors(self, comp):
        return [e[comp] for e in self.errors]

    def compute_rates(self):
        comps = self.errors[0].keys()
        self.rates = {}
        for c in comps:
            vals = self.component_errors(c)
            self.rates[c] = [
                float(np.log2(vals[i] / vals[i + 1]))
                for i in range(len(vals) - 1)]
        return self.rates

    def to_csv(self, path):
        comps = list(self.errors[0].keys())
        with open(path, "w") as fh:
            fh.write("resolution,h_mesh," + ",".join(comps) + "\n")
            for res, hm, errs in zip(self.resolutions, self.mesh_sizes, self.errors):
                fh.write(f"{res},{hm:.17g},"
                         + ",".join(f"{errs[c]:.17g}" for c in comps) + "\n")


def _projection_data(disc):
    """Evaluation points, weights and nodal-to-point projection matrix."""
    N = disc.N
    if disc.dim == 1:
        x, w = pb.gauss_legendre(N + 2)       # exact to 2N + 3
        pts = x[:, None]
        Veval = pb.vandermonde_1d(N, x)
        V = pb.vandermonde_1d(N, disc.rule.nodes[:, 0])
    else:
        r, s, w = pb.triangle_quadrature(2 * N + 2)
        pts = np.column_stack([r, s])
        Veval = pb.vandermonde_2d(N, r, s)
        V = pb.vandermonde_2d(N, disc.rule.nodes[:, 0], disc.rule.nodes[:, 1])
    M = disc.rule.weights
    G = V.T @ (M[:, None] * V)
    proj = Veval @ np.linalg.solve(G, V.T * M[None, :])
    return pts, w, proj


def _physical_points(disc, ref_pts):
    mesh = disc.mesh
    if disc.dim == 1:
        vl = mesh.vertices[mesh.elements[:, 0], 0]
        vr = mesh.vertices[mesh.elements[:, 1], 0]
        r = ref_pts[:, 0]
        x = (vl[:, None] * (0.5 * (1.0 - r))[None, :]
             + vr[:, None] * (0.5 * (1.0 + r))[None, :])
        return (x,)
    v1 = mesh.vertices[mesh.elements[:, 0]]
    v2 = mesh.vertices[mesh.elements[:, 1]]
    v3 = mesh.vertices[mesh.elements[:, 2]]
    r, s = ref_pts[:, 0], ref_pts[:, 1]
    lam1, lam2, lam3 = -0.5 * (r + s), 0.5 * (1.0 + r), 0.5 * (1.0 + s)
    x = (lam1[None, :] * v1[:, 0:1] + lam2[None, :] * v2[:, 0:1]
         + lam3[None, :] * v3[:, 0:1])
    y = (lam1[None, :] * v1[:, 1:2] + lam2[None, :] * v2[:, 1:2]
         + lam3[None, :] * v3[:, 1:2])
    return x, y


def compute_l2_error(disc, U, exact, t, exact_wet=None):
    """Per-component and combined L2 errors against an exact solution."""
    ref_pts, w, proj = _projection_data(disc)
    coords = _physical_points(disc, ref_pts)
    exact_vals = exact(t, *coords)
    if exact_wet is not None:
        mask = exact_wet(t, *coords).astype(float)
    else:
        mask = 1.0

    comp_names = ["h", "hu", "hv"][: disc.ncomp]
    errs = {}
    total = 0.0
    for c, name in enumerate(comp_names):
        num = U[c] @ proj.T                       # (K, n_eval)
        diff2 = mask * (num - exact_vals[c]) ** 2
        val = float(np.sum(disc.geom.J[:, None] * diff2 * w[None, :]))
        errs[name] = np.sqrt(val)
        total += val
    errs["combined"] = float(np.sqrt(total))
    return errs


def compute_l2_error_vs_nodal(disc, U, U_ref):
    """L2 norms of the projected difference to a nodal reference state.

    Measures drift from a discrete steady state without the interpolation
    error of the continuous solution (the well-balancedness metric).
    """
    ref_pts, w, proj = _projection_data(disc)
    comp_names = ["h", "hu", "hv"][: disc.ncomp]
    errs = {}
    total = 0.0
    for c, name in enumerate(comp_names):
        diff = (U[c] - U_ref[c]) @ proj.T
        val = float(np.sum(disc.geom.J[:, None] * diff ** 2 * w[None, :]))
        errs[name] = np.sqrt(val)
        total += val
    errs["combined"] = float(np.sqrt(total))
    return errs


def project_to_nodes(disc, fn):
    """Nodal interpolant of a callable, as used for initial data."""
    return disc.nodal(fn)


def observed_rates(errors):
    """log2 ratios of successive errors (uniform refinement assumed)."""
    return [float(np.log2(errors[i] / errors[i + 1]))
            for i in range(len(errors) - 1)]
