"""Output writers: nodal CSV snapshots, legacy-VTK point clouds, and the
structured JSON run summary."""

import json
import os

import numpy as np

SUMMARY_SCHEMA_VERSION = 1


def write_state_csv(disc, U, path):
    """Nodal state as CSV (x[,y],h,hu[,hv],b), 17 significant digits."""
    coords = [disc.geom.nodes[:, :, d].ravel() for d in range(disc.dim)]
    cols = coords + [U[c].ravel() for c in range(disc.ncomp)] + [disc.b.ravel()]
    if disc.dim == 1:
        header = "x,h,hu,b"
    else:
        header = "x,y,h,hu,hv,b"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_state_csv(path):
    """Round-trip reader for write_state_csv; returns (header, array)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.array([[float(v) for v in line.split(",")]
                         for line in fh if line.strip()])
    return header, data


def write_vtk_solution(disc, U, path):
    """Solution nodes as VTK poly-vertex data (2D only)."""
    if disc.dim != 2:
        raise ValueError("VTK solution dump is 2D only")
    pts = disc.geom.nodes.reshape(-1, 2)
    n = len(pts)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\nswedg solution\nASCII\n")
        fh.write("DATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {n} double\n")
        for x, y in pts:
            fh.write(f"{x:.17g} {y:.17g} 0.0\n")
        fh.write(f"CELLS {n} {2 * n}\n")
        fh.write("\n".join(f"1 {i}" for i in range(n)) + "\n")
        fh.write(f"CELL_TYPES {n}\n")
        fh.write("\n".join(["1"] * n) + "\n")
        fh.write(f"POINT_DATA {n}\n")
        names = ["h", "hu", "hv", "b"]
        fields = [U[0], U[1], U[2], disc.b]
        for name, vals in zip(names, fields):
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            fh.write("\n".join(f"{v:.17g}" for v in vals.ravel()) + "\n")


def write_summary_json(summary, path):
    payload = dict(summary)
    payload["schema_version"] = SUMMARY_SCHEMA_VERSION
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, default=_jsonable)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"cannot serialize {type(obj)}")


def ensure_dir(path):
    if path:
        os.makedirs(path, exist_ok=True)
    return path
