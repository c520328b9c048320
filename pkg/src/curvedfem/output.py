"""Solution, trace and report writers."""

import csv

import numpy as np

from .element import REFERENCE_NODES

# the ten local nodes on the lattice 3*(xi, eta)
_LATTICE = {tuple(int(round(3 * c)) for c in p): i for i, p in enumerate(REFERENCE_NODES)}
SUBTRIANGLES = np.array(
    [[_LATTICE[(a, b)], _LATTICE[(a + 1, b)], _LATTICE[(a, b + 1)]] for a in range(3) for b in range(3 - a)]
    + [[_LATTICE[(a + 1, b)], _LATTICE[(a + 1, b + 1)], _LATTICE[(a, b + 1)]] for a in range(2) for b in range(2 - a)]
)
VTK_TRIANGLE = 5


def write_solution_vtk(mesh, values, path, name="phi", title="curvedfem solution"):
    """Legacy ASCII unstructured grid; each cubic element becomes 9 linear triangles."""
    values = np.asarray(values, dtype=float)
    cells = mesh.cells[:, SUBTRIANGLES].reshape(-1, 3)
    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(f"{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {mesh.n_nodes} double\n")
        for x, y in mesh.points.tolist():
            fh.write(f"{x!r} {y!r} 0.0\n")
        fh.write(f"CELLS {len(cells)} {4 * len(cells)}\n")
        for a, b, c in cells.tolist():
            fh.write(f"3 {a} {b} {c}\n")
        fh.write(f"CELL_TYPES {len(cells)}\n")
        fh.write(f"{VTK_TRIANGLE}\n" * len(cells))
        fh.write(f"POINT_DATA {mesh.n_nodes}\nSCALARS {name} double 1\nLOOKUP_TABLE default\n")
        for v in values.tolist():
            fh.write(f"{v!r}\n")


def read_solution_vtk(path):
    """Minimal reader for files written by ``write_solution_vtk``."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    i = next(k for k, ln in enumerate(lines) if ln.startswith("POINTS"))
    n = int(lines[i].split()[1])
    points = np.array([[float(t) for t in ln.split()[:2]] for ln in lines[i + 1:i + 1 + n]])
    j = next(k for k, ln in enumerate(lines) if ln.startswith("CELLS"))
    m = int(lines[j].split()[1])
    cells = np.array([[int(t) for t in ln.split()[1:]] for ln in lines[j + 1:j + 1 + m]])
    k = next(k for k, ln in enumerate(lines) if ln.startswith("LOOKUP_TABLE"))
    values = np.array([float(ln) for ln in lines[k + 1:k + 1 + n]])
    return points, cells, values


def write_trace_csv(trace, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iter", "max_diff"])
        for k, d in enumerate(trace.diffs, start=1):
            w.writerow([k, repr(float(d))])


def read_trace_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [float(r["max_diff"]) for r in rows]
