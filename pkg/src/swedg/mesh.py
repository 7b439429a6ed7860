"""Interval meshes and split-quadrilateral triangulations with affine geometry.

All elements are affine images of the reference element, so metric terms
are constant per element.  Interior walls (used for the dam geometry) are
realized as reflective boundary rules on otherwise interior faces.
"""

from dataclasses import dataclass, field

import numpy as np

WALL = -1  # neighbor index marking a reflective face


@dataclass
class MeshTopology:
    """Conforming mesh: vertices, element connectivity and face adjacency."""
    dim: int
    vertices: np.ndarray          # (Nv, dim)
    elements: np.ndarray          # (K, dim + 1) vertex indices, positive orientation
    neighbor: np.ndarray          # (K, n_faces) element index or WALL
    neighbor_face: np.ndarray     # (K, n_faces) local face on the neighbor
    periodic_shift: np.ndarray    # (K, n_faces, dim) shift from this face to the match
    domain: tuple = ()
    bc: str = "periodic"

    @property
    def n_elements(self):
        return self.elements.shape[0]

    @property
    def n_faces_per_element(self):
        return self.neighbor.shape[1]


@dataclass
class GeometricFactors:
    """Affine metric data and physical node positions."""
    J: np.ndarray                 # (K,) volume Jacobian
    metric: np.ndarray            # (K, dim, dim); metric[e, d, k] = d(x_d)/..., see below
    nodes: np.ndarray             # (K, Nq, dim) physical node coordinates
    mass: np.ndarray              # (K, Nq) lumped mass J * w
    face_scaled_normal: np.ndarray  # (K, S, dim) outward normal scaled by surface Jacobian
    face_weight: np.ndarray       # (K, S) quadrature weight * surface Jacobian
    face_normal: np.ndarray       # (K, S, dim) outward unit normal
    inradius: np.ndarray          # (K,) inradius (1D: half the element width)


@dataclass
class FaceConnectivity:
    """Per-face-node matching across elements.

    For slot s of element e, ``nbr_elem[e, s]`` gives the neighboring element
    and ``nbr_node[e, s]`` the matched volume node there; reflective slots
    have ``is_wall[e, s]`` set and carry no node match.
    """
    slot_node: np.ndarray         # (S,) volume node fed by each face slot
    nbr_elem: np.ndarray          # (K, S)
    nbr_slot: np.ndarray          # (K, S)
    nbr_node: np.ndarray          # (K, S)
    is_wall: np.ndarray           # (K, S) bool


def build_uniform_mesh_1d(K, domain=(-1.0, 1.0), bc="periodic"):
    """K equal elements on an interval, closed periodically or by walls."""
    if K < 1:
        raise ValueError("need at least one element")
    a, b = float(domain[0]), float(domain[1])
    if not b > a:
        raise ValueError("degenerate domain")
    if bc not in ("periodic", "wall"):
        raise ValueError(f"unsupported boundary condition {bc!r}")
    verts = a + (b - a) * np.arange(K + 1) / K
    verts[-1] = b
    elements = np.column_stack([np.arange(K), np.arange(1, K + 1)])
    neighbor = np.column_stack([np.arange(K) - 1, np.arange(K) + 1])
    neighbor_face = np.tile([1, 0], (K, 1))
    shift = np.zeros((K, 2, 1))
    if bc == "periodic":
        neighbor[0, 0] = K - 1
        neighbor[-1, 1] = 0
        shift[0, 0, 0] = b - a
        shift[-1, 1, 0] = -(b - a)
    else:
        neighbor[0, 0] = WALL
        neighbor[-1, 1] = WALL
    return MeshTopology(dim=1, vertices=verts[:, None], elements=elements,
                        neighbor=neighbor, neighbor_face=neighbor_face,
                        periodic_shift=shift, domain=(a, b), bc=bc)


def build_split_quad_trimesh(nx, ny, domain=((0.0, 1.0), (0.0, 1.0)),
                             bc="periodic", internal_walls=()):
    """Triangulate an nx-by-ny quad grid, each cell split along its
    lower-left to upper-right diagonal.

    ``internal_walls`` is a sequence of axis-aligned segments
    ``(axis, coord, lo, hi)`` (axis "x" means the line x = coord); interior
    faces lying on a segment become reflective on both sides.  Segment
    coordinates must lie on mesh lines.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid counts must be positive")
    (x0, x1), (y0, y1) = domain
    xs = x0 + (x1 - x0) * np.arange(nx + 1) / nx
    ys = y0 + (y1 - y0) * np.arange(ny + 1) / ny
    xs[-1], ys[-1] = x1, y1

    def vid(i, j):
        return j * (nx + 1) + i

    XX, YY = np.meshgrid(xs, ys, indexing="xy")
    vertices = np.column_stack([XX.ravel(), YY.ravel()])

    elements = []
    for j in range(ny):
        for i in range(nx):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            elements.append([v00, v10, v11])   # lower triangle
            elements.append([v00, v11, v01])   # upper triangle
    elements = np.array(elements)
    K = len(elements)

    # local faces follow the reference ordering: (v1,v2), (v2,v3), (v3,v1)
    face_pairs = [(0, 1), (1, 2), (2, 0)]
    edge_of = {}
    neighbor = np.full((K, 3), WALL, dtype=int)
    neighbor_face = np.full((K, 3), -1, dtype=int)
    shift = np.zeros((K, 3, 2))
    boundary = []
    for e in range(K):
        for f, (a, b) in enumerate(face_pairs):
            key = tuple(sorted((elements[e, a], elements[e, b])))
            if key in edge_of:
                e2, f2 = edge_of.pop(key)
                neighbor[e, f], neighbor_face[e, f] = e2, f2
                neighbor[e2, f2], neighbor_face[e2, f2] = e, f
            else:
                edge_of[key] = (e, f)
    boundary = list(edge_of.values())

    if bc == "periodic":
        # match boundary edges by translated midpoint
        Lx, Ly = x1 - x0, y1 - y0
        mids = {}
        for (e, f) in boundary:
            a, b = face_pairs[f]
            pa, pb = vertices[elements[e, a]], vertices[elements[e, b]]
            mids[(e, f)] = 0.5 * (pa + pb)
        tol = 1e-9 * max(Lx, Ly)
        unmatched = dict(mids)
        for (e, f), m in mids.items():
            if (e, f) not in unmatched:
                continue
            for dx, dy in ((Lx, 0), (-Lx, 0), (0, Ly), (0, -Ly)):
                target = m + np.array([dx, dy])
                hit = [(e2, f2) for (e2, f2), m2 in unmatched.items()
                       if (e2, f2) != (e, f) and np.abs(m2 - target).max() < tol]
                if hit:
                    e2, f2 = hit[0]
                    neighbor[e, f], neighbor_face[e, f] = e2, f2
                    neighbor[e2, f2], neighbor_face[e2, f2] = e, f
                    shift[e, f] = [dx, dy]
                    shift[e2, f2] = [-dx, -dy]
                    del unmatched[(e, f)]
                    del unmatched[(e2, f2)]
                    break
            else:
                raise ValueError("periodic matching failed for a boundary edge")
    elif bc != "wall":
        raise ValueError(f"unsupported boundary condition {bc!r}")

    for seg in internal_walls:
        axis, coord, lo, hi = seg
        ax = 0 if axis == "x" else 1
        lines = xs if ax == 0 else ys
        if np.abs(lines - coord).min() > 1e-12 * max(abs(x1 - x0), abs(y1 - y0)):
            raise ValueError(f"wall segment {seg} not aligned with mesh lines")
        tol = 1e-12 * max(abs(x1 - x0), abs(y1 - y0))
        for e in range(K):
            for f, (a, b) in enumerate(face_pairs):
                pa, pb = vertices[elements[e, a]], vertices[elements[e, b]]
                on_line = abs(pa[ax] - coord) < tol and abs(pb[ax] - coord) < tol
                other = 1 - ax
                inside = (min(pa[other], pb[other]) >= lo - tol
                          and max(pa[other], pb[other]) <= hi + tol)
                if on_line and inside:
                    neighbor[e, f] = WALL
                    neighbor_face[e, f] = -1

    return MeshTopology(dim=2, vertices=vertices, elements=elements,
                        neighbor=neighbor, neighbor_face=neighbor_face,
                        periodic_shift=shift, domain=domain, bc=bc)


def compute_geometric_factors(mesh, rule):
    """Affine metric terms, physical nodes and face data for every element."""
    K = mesh.n_elements
    rnodes = rule.nodes
    w = rule.weights
    slot_node, slot_w, slot_nrm = rule.face_slots()
    S = len(slot_node)

    if mesh.dim == 1:
        vl = mesh.vertices[mesh.elements[:, 0], 0]
        vr = mesh.vertices[mesh.elements[:, 1], 0]
        J = 0.5 * (vr - vl)
        if np.any(J <= 0):
            raise ValueError("nonpositive Jacobian in 1D mesh")
        r = rnodes[:, 0]
        # endpoint-exact affine map: nodes at r = +-1 coincide bitwise with vertices
        nodes = (vl[:, None] * (0.5 * (1.0 - r))[None, :]
                 + vr[:, None] * (0.5 * (1.0 + r))[None, :])[:, :, None]
        metric = np.ones((K, 1, 1))  # r_x * J = 1 in 1D
        scaled = np.tile(slot_nrm[None, :, :], (K, 1, 1)).astype(float)
        ws = np.abs(scaled[:, :, 0]) * slot_w[None, :]
        unit = np.sign(scaled)
        mass = J[:, None] * w[None, :]
        return GeometricFactors(J=J, metric=metric, nodes=nodes, mass=mass,
                                face_scaled_normal=scaled, face_weight=ws,
                                face_normal=unit, inradius=J.copy())

    v1 = mesh.vertices[mesh.elements[:, 0]]
    v2 = mesh.vertices[mesh.elements[:, 1]]
    v3 = mesh.vertices[mesh.elements[:, 2]]
    xr = 0.5 * (v2 - v1)   # d(x,y)/dr
    xs = 0.5 * (v3 - v1)   # d(x,y)/ds
    J = xr[:, 0] * xs[:, 1] - xs[:, 0] * xr[:, 1]
    if np.any(J <= 0):
        raise ValueError("nonpositive Jacobian; element orientation is wrong")

    # metric[e, d, k]: coefficient of Q_k^ref in the physical operator Q_d
    metric = np.empty((K, 2, 2))
    metric[:, 0, 0] = xs[:, 1]    # r_x J
    metric[:, 0, 1] = -xr[:, 1]   # s_x J
    metric[:, 1, 0] = -xs[:, 0]   # r_y J
    metric[:, 1, 1] = xr[:, 0]    # s_y J

    r, s = rnodes[:, 0], rnodes[:, 1]
    lam1 = -0.5 * (r + s)
    lam2 = 0.5 * (1.0 + r)
    lam3 = 0.5 * (1.0 + s)
    nodes = (lam1[None, :, None] * v1[:, None, :]
             + lam2[None, :, None] * v2[:, None, :]
             + lam3[None, :, None] * v3[:, None, :])

    scaled = np.einsum("edk,sk->esd", metric, slot_nrm)
    ws_geom = np.sqrt(np.sum(scaled ** 2, axis=-1))
    unit = scaled / ws_geom[:, :, None]
    ws = ws_geom * slot_w[None, :]
    mass = J[:, None] * w[None, :]

    # inradius of the physical triangle
    la = np.linalg.norm(v2 - v1, axis=1)
    lb = np.linalg.norm(v3 - v2, axis=1)
    lc = np.linalg.norm(v1 - v3, axis=1)
    speri = 0.5 * (la + lb + lc)
    area = 0.5 * np.abs((v2 - v1)[:, 0] * (v3 - v1)[:, 1]
                        - (v3 - v1)[:, 0] * (v2 - v1)[:, 1])
    inradius = area / speri

    return GeometricFactors(J=J, metric=metric, nodes=nodes, mass=mass,
                            face_scaled_normal=scaled, face_weight=ws,
                            face_normal=unit, inradius=inradius)


def build_face_connectivity(mesh, geom, rule, snap=True):
    """Match face quadrature nodes across element interfaces.

    Matched interior nodes are snapped to shared coordinates so traces of
    continuous data coincide bitwise; periodic matches are left untouched.
    """
    K = mesh.n_elements
    slot_node, _, _ = rule.face_slots()
    S = len(slot_node)
    counts = [len(f.node_indices) for f in rule.faces]
    offsets = np.concatenate([[0], np.cumsum(counts)])

    nbr_elem = np.full((K, S), -1, dtype=int)
    nbr_slot = np.full((K, S), -1, dtype=int)
    is_wall = np.zeros((K, S), dtype=bool)

    scale = max(np.ptp(mesh.vertices[:, d]) for d in range(mesh.dim))
    tol = 1e-10 * scale

    pairs = []  # non-periodic matched node pairs, for coordinate unification
    for e in range(K):
        for f in range(mesh.n_faces_per_element):
            sl = slice(offsets[f], offsets[f + 1])
            e2 = mesh.neighbor[e, f]
            if e2 == WALL:
                is_wall[e, sl] = True
                continue
            f2 = mesh.neighbor_face[e, f]
            sl2 = slice(offsets[f2], offsets[f2 + 1])
            my = geom.nodes[e, slot_node[sl]] + mesh.periodic_shift[e, f]
            their = geom.nodes[e2, slot_node[sl2]]
            d = np.linalg.norm(my[:, None, :] - their[None, :, :], axis=-1)
            j = np.argmin(d, axis=1)
            if np.any(d[np.arange(len(j)), j] > tol) or len(set(j)) != len(j):
                raise ValueError(
                    f"unmatched interface node between elements {e} and {e2}")
            nbr_elem[e, sl] = e2
            nbr_slot[e, sl] = offsets[f2] + j
            if not np.any(mesh.periodic_shift[e, f]):
                mine = slot_node[sl]
                theirs = slot_node[sl2][j]
                pairs.extend(((e, a), (e2, b)) for a, b in zip(mine, theirs))

    if snap and pairs:
        # union-find over matched interior nodes; one canonical coordinate per
        # cluster so continuous data evaluates bitwise identically on traces
        parent = {}

        def find(p):
            parent.setdefault(p, p)
            while parent[p] != p:
                parent[p] = parent[parent[p]]
                p = parent[p]
            return p

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        clusters = {}
        for p in parent:
            clusters.setdefault(find(p), []).append(p)
        for rep, members in clusters.items():
            for (e, i) in members:
                geom.nodes[e, i] = geom.nodes[rep[0], rep[1]]

    nbr_node = np.where(nbr_slot >= 0, slot_node[np.clip(nbr_slot, 0, S - 1)], -1)
    conn = FaceConnectivity(slot_node=slot_node, nbr_elem=nbr_elem,
                            nbr_slot=nbr_slot, nbr_node=nbr_node, is_wall=is_wall)
    _check_involution(conn)
    return conn


def _check_involution(conn):
    K, S = conn.nbr_elem.shape
    ee, ss = np.meshgrid(np.arange(K), np.arange(S), indexing="ij")
    m = ~conn.is_wall
    e2, s2 = conn.nbr_elem[m], conn.nbr_slot[m]
    back_e = conn.nbr_elem[e2, s2]
    back_s = conn.nbr_slot[e2, s2]
    if not (np.all(back_e == ee[m]) and np.all(back_s == ss[m])):
        raise ValueError("face matching is not involutive")


def write_vtk_mesh(mesh, path, point_data=None):
    """Dump a triangle mesh (legacy VTK ASCII); optional per-vertex scalars."""
    if mesh.dim != 2:
        raise ValueError("VTK dump is only provided for triangle meshes")
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\nswedg mesh\nASCII\n")
        fh.write("DATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {len(mesh.vertices)} double\n")
        for x, y in mesh.vertices:
            fh.write(f"{x:.17g} {y:.17g} 0.0\n")
        K = mesh.n_elements
        fh.write(f"CELLS {K} {4 * K}\n")
        for tri in mesh.elements:
            fh.write("3 " + " ".join(str(v) for v in tri) + "\n")
        fh.write(f"CELL_TYPES {K}\n")
        fh.write("\n".join(["5"] * K) + "\n")
        if point_data:
            fh.write(f"POINT_DATA {len(mesh.vertices)}\n")
            for name, vals in point_data.items():
                fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
                fh.write("\n".join(f"{v:.17g}" for v in vals) + "\n")
