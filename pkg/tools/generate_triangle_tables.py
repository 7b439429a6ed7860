#!/usr/bin/env python3
"""Generate face-embedded SBP quadrature tables for the reference triangle.

For each degree N in 1..4 and each edge-node family (Gauss-Legendre,
Gauss-Lobatto) this script constructs a volume quadrature rule that

  * contains the prescribed edge nodes among its nodes,
  * has strictly positive weights,
  * integrates all polynomials of total degree <= 2N-1 exactly.

Nodes are organized in orbits of the triangle's symmetry group; the free
orbit parameters and weights are found with a float least-squares search
and then polished to ~45 correct digits with a Gauss-Newton iteration in
mpmath.  Results are written as plain-text tables with 20 significant
digits under src/swedg/tables/.

This is an offline tool: the solver package only ever reads the tables.
"""

import itertools
import os
import sys

import numpy as np
from mpmath import mp
from scipy import special
from scipy.optimize import least_squares

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "src", "swedg", "tables")

mp.dps = 60

V1 = (mp.mpf(-1), mp.mpf(-1))
V2 = (mp.mpf(1), mp.mpf(-1))
V3 = (mp.mpf(-1), mp.mpf(1))
VERTS = (V1, V2, V3)

# face k runs from endpoint A to B; scaled outward normal is constant
FACES = [
    (V1, V2, (mp.mpf(0), mp.mpf(-1))),
    (V2, V3, (mp.mpf(1), mp.mpf(1))),
    (V3, V1, (mp.mpf(-1), mp.mpf(0))),
]


def bary_to_xy(lam):
    x = sum(l * v[0] for l, v in zip(lam, VERTS))
    y = sum(l * v[1] for l, v in zip(lam, VERTS))
    return x, y


def orbit_points(kind, params):
    """Barycentric triples of one symmetry orbit."""
    one = mp.mpf(1)
    if kind == "c":
        third = one / 3
        return [(third, third, third)]
    if kind == "s3":
        a = params[0]
        b = one - 2 * a
        return [(a, a, b), (a, b, a), (b, a, a)]
    if kind == "s3v":
        return [(one, 0 * one, 0 * one), (0 * one, one, 0 * one),
                (0 * one, 0 * one, one)]
    if kind == "s3m":
        h = one / 2
        return [(h, h, 0 * one), (h, 0 * one, h), (0 * one, h, h)]
    if kind == "s6":
        a, b = params
        c = one - a - b
        return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
    raise ValueError(kind)


ORBIT_NPARAMS = {"c": 0, "s3": 1, "s3v": 0, "s3m": 0, "s6": 2}
ORBIT_SIZE = {"c": 1, "s3": 3, "s3v": 3, "s3m": 3, "s6": 6}


def mp_legendre_roots(n):
    """Roots of P_n refined to mp precision, ascending."""
    x0, _ = special.roots_legendre(n)
    return [mp.findroot(lambda t: mp.legendre(n, t), mp.mpf(x)) for x in np.sort(x0)]


def mp_gauss_legendre(n):
    xs = mp_legendre_roots(n)
    ws = []
    for x in xs:
        dp = mp.diff(lambda t: mp.legendre(n, t), x)
        ws.append(2 / ((1 - x ** 2) * dp ** 2))
    return xs, ws


def mp_gauss_lobatto(n):
    if n == 2:
        xs = [mp.mpf(-1), mp.mpf(1)]
    else:
        x0, _ = special.roots_jacobi(n - 2, 1.0, 1.0)
        inner = [mp.findroot(lambda t: mp.diff(lambda u: mp.legendre(n - 1, u), t),
                             mp.mpf(x)) for x in np.sort(x0)]
        xs = [mp.mpf(-1)] + inner + [mp.mpf(1)]
    ws = [2 / (n * (n - 1) * mp.legendre(n - 1, x) ** 2) for x in xs]
    return xs, ws


def edge_rule(N, family):
    if family == "gl":
        return mp_gauss_legendre(N + 1)
    return mp_gauss_lobatto(N + 2)


def boundary_orbits(N, family):
    """Boundary orbit list [(kind, fixed_params)] implied by the edge rule."""
    ts, _ = edge_rule(N, family)
    orbits = []
    for t in ts:
        if t < -1e-30:
            continue  # handled by the +t partner
        if abs(t) < 1e-30:
            orbits.append(("s3m", ()))
        elif abs(t - 1) < 1e-30:
            orbits.append(("s3v", ()))
        else:
            a = (1 - t) / 2
            b = (1 + t) / 2
            orbits.append(("s6", (a, b)))
    return orbits


def exact_moment(a, b):
    """int x^a y^b over the reference triangle, exact in mp."""
    total = mp.mpf(0)
    for i in range(a + 1):
        for j in range(b + 1):
            c = (mp.binomial(a, i) * mp.binomial(b, j)
                 * mp.mpf(2) ** (i + j) * (-1) ** (a - i + b - j))
            total += c * mp.factorial(i) * mp.factorial(j) / mp.factorial(i + j + 2)
    return 4 * total


def moment_exponents(deg):
    return [(a, b) for a in range(deg + 1) for b in range(deg + 1 - a)]


class RuleCandidate:
    """Boundary orbits (fixed) plus interior orbits (free parameters)."""

    def __init__(self, N, family, interior_kinds):
        self.N = N
        self.family = family
        self.bnd = boundary_orbits(N, family)
        self.interior = interior_kinds
        self.exps = moment_exponents(2 * N - 1)
        self.n_params = sum(ORBIT_NPARAMS[k] for k in interior_kinds)
        self.n_weights = len(self.bnd) + len(interior_kinds)
        self.exact = [exact_moment(a, b) for (a, b) in self.exps]

    def unpack(self, u):
        params = u[:self.n_params]
        weights = u[self.n_params:]
        orbits = list(self.bnd)
        pos = 0
        for kind in self.interior:
            np_ = ORBIT_NPARAMS[kind]
            orbits.append((kind, tuple(params[pos:pos + np_])))
            pos += np_
        return orbits, weights

    def points_and_weights(self, u):
        orbits, weights = self.unpack(u)
        pts, ws = [], []
        for (kind, prm), w in zip(orbits, weights):
            for lam in orbit_points(kind, prm):
                pts.append(bary_to_xy(lam))
                ws.append(w)
        return pts, ws

    def residual_mp(self, u):
        pts, ws = self.points_and_weights([mp.mpf(v) if not isinstance(v, mp.mpf)
                                           else v for v in u])
        res = []
        for (a, b), ex in zip(self.exps, self.exact):
            acc = mp.mpf(0)
            for (x, y), w in zip(pts, ws):
                acc += w * x ** a * y ** b
            res.append(acc - ex)
        return res

    def residual_f64(self, u):
        pts, ws = self.points_and_weights([mp.mpf(float(v)) for v in u])
        pts = np.array([[float(x), float(y)] for (x, y) in pts])
        ws = np.array([float(w) for w in ws])
        ex = np.array([float(e) for e in self.exact])
        vals = np.array([np.sum(ws * pts[:, 0] ** a * pts[:, 1] ** b)
                         for (a, b) in self.exps])
        return vals - ex


def float_search(cand, rng):
    """Random-start bounded least squares; returns a float solution or None."""
    n_p, n_w = cand.n_params, cand.n_weights
    lb = np.concatenate([np.full(n_p, 0.02), np.full(n_w, 5e-3)])
    ub = np.concatenate([np.full(n_p, 0.48), np.full(n_w, 1.5)])

    starts = []
    base_w = np.full(n_w, 2.0 / (3 * n_w))
    for trial in range(60):
        p0 = rng.uniform(0.05, 0.45, n_p)
        w0 = base_w * rng.uniform(0.5, 1.5, n_w)
        starts.append(np.concatenate([p0, w0]))

    for u0 in starts:
        sol = least_squares(cand.residual_f64, u0, bounds=(lb, ub),
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
        if np.max(np.abs(sol.fun)) < 1e-12 and _valid_float(cand, sol.x):
            return sol.x
    return None


def _valid_float(cand, u):
    pts, ws = cand.points_and_weights([mp.mpf(float(v)) for v in u])
    pts = np.array([[float(x), float(y)] for (x, y) in pts])
    ws = np.array([float(w) for w in ws])
    if ws.min() < 2e-3:
        return False
    # interior orbit points strictly inside
    orbits, _ = cand.unpack(list(u))
    for kind, prm in orbits[len(cand.bnd):]:
        for lam in orbit_points(kind, tuple(mp.mpf(float(p)) for p in prm)):
            if min(float(l) for l in lam) < 0.015:
                return False
    # no node collisions
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, 1.0)
    return d2.min() > 1e-4


def polish_mp(cand, u_float):
    """Gauss-Newton in mp arithmetic down to ~1e-45 residuals."""
    u = [mp.mpf(float(v)) for v in u_float]
    n = len(u)
    for _ in range(60):
        r = cand.residual_mp(u)
        rmax = max(abs(v) for v in r)
        if rmax < mp.mpf("1e-45"):
            return u
        m = len(r)
        J = mp.zeros(m, n)
        h = mp.mpf("1e-25")
        for j in range(n):
            up = list(u)
            um = list(u)
            up[j] += h
            um[j] -= h
            rp = cand.residual_mp(up)
            rm = cand.residual_mp(um)
            for i in range(m):
                J[i, j] = (rp[i] - rm[i]) / (2 * h)
        # tiny-damped normal equations: tolerant of the rank deficiency that
        # symmetry-redundant moment rows introduce
        rv = mp.matrix(r)
        JT = J.T
        delta = mp.lu_solve(JT * J + mp.eye(n) * mp.mpf("1e-48"), -(JT * rv))
        for j in range(n):
            u[j] += delta[j]
    r = cand.residual_mp(u)
    if max(abs(v) for v in r) < mp.mpf("1e-40"):
        return u
    return None


def assemble_table(cand, u):
    """Final node list, weights and per-face data in mp precision."""
    orbits, weights = cand.unpack(u)
    nodes, ws = [], []
    for (kind, prm), w in zip(orbits, weights):
        for lam in orbit_points(kind, prm):
            nodes.append(bary_to_xy(lam))
            ws.append(w)

    ts, tw = edge_rule(cand.N, cand.family)
    faces = []
    for (A, B, nrm) in FACES:
        idx = []
        for t in ts:
            px = (A[0] + B[0]) / 2 + t * (B[0] - A[0]) / 2
            py = (A[1] + B[1]) / 2 + t * (B[1] - A[1]) / 2
            match = [i for i, (x, y) in enumerate(nodes)
                     if mp.sqrt((x - px) ** 2 + (y - py) ** 2) < mp.mpf("1e-30")]
            if len(match) != 1:
                raise RuntimeError("face node is not embedded in the volume nodes")
            idx.append(match[0])
        faces.append((idx, tw, nrm))
    return nodes, ws, faces


def fmt(x):
    return mp.nstr(x, 20, strip_zeros=False)


def write_table(path, cand, nodes, ws, faces):
    nq, nf = len(nodes), len(faces)
    with open(path, "w") as fh:
        fh.write("# Face-embedded SBP quadrature rule on the reference triangle\n")
        fh.write(f"# degree N={cand.N}, edge family: "
                 f"{'Gauss-Legendre' if cand.family == 'gl' else 'Gauss-Lobatto'}\n")
        fh.write("# volume rule exact to degree "
                 f"{2 * cand.N - 1}, face rule exact to degree {2 * cand.N + 1}\n")
        fh.write("# generated by tools/generate_triangle_tables.py "
                 "(symmetric-orbit moment solve, mpmath Gauss-Newton polish)\n")
        fh.write("# format: header 'N d N_q N_f'; N_q lines 'x y w'; per face: "
                 "node indices, face weights, scaled outward normal\n")
        fh.write(f"{cand.N} 2 {nq} {nf}\n")
        for (x, y), w in zip(nodes, ws):
            fh.write(f"{fmt(x)} {fmt(y)} {fmt(w)}\n")
        for idx, tw, nrm in faces:
            fh.write(" ".join(str(i) for i in idx) + "\n")
            fh.write(" ".join(fmt(w) for w in tw) + "\n")
            fh.write(f"{fmt(nrm[0])} {fmt(nrm[1])}\n")


def graph_stats(nodes, ws, alpha, p=0.25):
    """Connectivity of the radius graph used by the low-order operators."""
    pts = np.array([[float(x), float(y)] for (x, y) in nodes])
    r = alpha * np.array([float(w) for w in ws]) ** p
    n = len(pts)
    d = np.sqrt(np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1))
    adj = d <= np.maximum(r[:, None], r[None, :])
    np.fill_diagonal(adj, False)
    edges = int(np.sum(adj) // 2)
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.nonzero(adj[i])[0]:
            if j not in seen:
                seen.add(j)
                stack.append(int(j))
    return edges, len(seen) == n


CONFIGS = {
    ("gl", 1): [[]],
    ("gl", 2): [["c"], ["s3"]],
    ("gl", 3): [["c", "s3"], ["s3", "s3"]],
    ("gl", 4): [["c", "s3", "s3"], ["s3", "s6"], ["s3", "s3", "s3"]],
    ("glo", 1): [[]],
    ("glo", 2): [["c"], ["s3"]],
    ("glo", 3): [["s3"], ["c", "s3"], ["s3", "s3"]],
    ("glo", 4): [["c", "s3", "s3"], ["s3", "s6"], ["s3", "s3", "s3"]],
}

SPECIAL_STARTS = {
    # vertex and midpoint orbits for N=1 Lobatto: any symmetric positive split
    # of the area works; pick light vertices (degree-1 exactness is automatic)
    ("glo", 1): np.array([1.0 / 6.0, 1.0 / 2.0]),
}


def generate_rule(N, family, rng):
    for interior in CONFIGS[(family, N)]:
        cand = RuleCandidate(N, family, interior)
        if (family, N) in SPECIAL_STARTS and not interior:
            u = SPECIAL_STARTS[(family, N)]
            if np.max(np.abs(cand.residual_f64(u))) > 1e-12:
                continue
            u_float = u
        else:
            u_float = float_search(cand, rng)
        if u_float is None:
            print(f"  config {interior}: no positive float solution")
            continue
        u_mp = polish_mp(cand, u_float)
        if u_mp is None:
            print(f"  config {interior}: mp polish failed")
            continue
        rmax = max(abs(v) for v in cand.residual_mp(u_mp))
        nodes, ws, faces = assemble_table(cand, u_mp)
        print(f"  config {interior}: N_q={len(nodes)}, moment residual {mp.nstr(rmax, 3)}")
        return cand, nodes, ws, faces
    return None


def validate_with_package(N, family_tag):
    from swedg import refelem
    from swedg.refelem import load_triangle_sbp_nodes, build_triangle_sbp_operators, verify_sbp

    fam = "gauss_legendre_edge" if family_tag == "gl" else "gauss_lobatto_edge"
    rule = load_triangle_sbp_nodes(N, fam)
    ops = build_triangle_sbp_operators(rule, N)
    rep = verify_sbp(ops, N)
    print("   ", rep.summary())
    return rep.passed, rule


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    rng = np.random.default_rng(20240517)
    all_ok = True
    for family in ("gl", "glo"):
        for N in (1, 2, 3, 4):
            print(f"building N={N} family={family} ...")
            out = generate_rule(N, family, rng)
            if out is None:
                print(f"  FAILED for N={N} {family}")
                all_ok = False
                continue
            cand, nodes, ws, faces = out
            path = os.path.join(OUT_DIR, f"tri_sbp_N{N}_{family}.txt")
            write_table(path, cand, nodes, ws, faces)
            ok, rule = validate_with_package(N, family)
            all_ok &= ok
            for alpha in (1.0, 1.5, 2.25):
                edges, conn = graph_stats(nodes, ws, alpha)
                print(f"    graph alpha={alpha}: {edges} edges, connected={conn}")
    print("ALL OK" if all_ok else "FAILURES PRESENT")
    return 0 if all_ok else 1


if __name__ == "__main__":
    sys.exit(main())
