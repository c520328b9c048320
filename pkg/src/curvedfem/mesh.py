"""Mesh of 10-node cubic triangles with optional curved edge 1-2.

The arrays are the source of truth. ``Node`` and ``CurvedTriangle10`` are
read-only views for callers that want per-item access.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import element as el
from .errors import DegenerateElementError, GeometryError, MeshParseError
from .geometry import ArcSpec, element_nodes
from .quadrature import quadrature_rule

FORMULA_TOL = 1e-12


@dataclass(frozen=True)
class Node:
    id: int
    coords: tuple
    boundary_marker: Optional[str] = None


@dataclass(frozen=True)
class CurvedTriangle10:
    node_ids: tuple
    curved_edge: Optional[ArcSpec] = None

    @property
    def is_curved(self):
        return self.curved_edge is not None


@dataclass(frozen=True)
class MeshStats:
    n_elements: int
    n_dof: int
    n_boundary_nodes: int

    def line(self):
        return f"elements={self.n_elements} dof={self.n_dof} boundary_nodes={self.n_boundary_nodes}"


@dataclass(eq=False)
class Mesh:
    points: np.ndarray  # (N, 2)
    cells: np.ndarray  # (E, 10) int
    arcs: list  # per element: ArcSpec for a curved edge 1-2, else None
    markers: list  # per node: label or None
    boundary_groups: dict = field(default_factory=dict)  # label -> sorted node ids

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        self.cells = np.ascontiguousarray(self.cells, dtype=np.int64)
        self.boundary_groups = {
            k: np.array(sorted(set(map(int, v))), dtype=np.int64)
            for k, v in self.boundary_groups.items()
        }
        self.points.setflags(write=False)
        self.cells.setflags(write=False)

    @property
    def n_nodes(self):
        return len(self.points)

    @property
    def n_elements(self):
        return len(self.cells)

    @property
    def stats(self):
        n_bnd = sum(m is not None for m in self.markers)
        return MeshStats(self.n_elements, self.n_nodes, n_bnd)

    @property
    def nodes(self):
        return [Node(i, tuple(p), m) for i, (p, m) in enumerate(zip(self.points.tolist(), self.markers))]

    @property
    def elements(self):
        return [CurvedTriangle10(tuple(c), a) for c, a in zip(self.cells.tolist(), self.arcs)]

    @property
    def curved_elements(self):
        return np.array([i for i, a in enumerate(self.arcs) if a is not None], dtype=np.int64)

    def element_coords(self, e=None):
        """Node coordinates (10, 2) of element ``e`` or (E, 10, 2) for all."""
        if e is None:
            return self.points[self.cells]
        return self.points[self.cells[e]]

    def labels(self):
        return list(self.boundary_groups)

    def boundary_edges(self, label=None):
        """Element edges lying on the boundary: (element, local edge, label).

        Local edge k in 0..2 means edge (1-2), (2-3), (3-1).
        """
        member = {k: set(v.tolist()) for k, v in self.boundary_groups.items()}
        out = []
        for e, c in enumerate(self.cells):
            for k, loc in enumerate(EDGE_LOCAL_NODES):
                ids = [int(c[i]) for i in loc]
                for lab, s in member.items():
                    if label is not None and lab != label:
                        continue
                    if all(i in s for i in ids) and self._edge_count(ids[0], ids[1]) == 1:
                        out.append((e, k, lab))
        return out

    def _edge_count(self, a, b):
        if not hasattr(self, "_edge_counts"):
            counts = {}
            for c in self.cells:
                for loc in EDGE_LOCAL_NODES:
                    key = (min(c[loc[0]], c[loc[1]]), max(c[loc[0]], c[loc[1]]))
                    counts[key] = counts.get(key, 0) + 1
            self._edge_counts = counts
        return self._edge_counts.get((min(a, b), max(a, b)), 0)


# Local node indices along each edge in traversal order: vertex, two edge nodes, vertex.
EDGE_LOCAL_NODES = ((0, 3, 4, 1), (1, 5, 6, 2), (2, 7, 8, 0))


def build_cubic_mesh(vertices, triangles, edge_labels=None, edge_arcs=None):
    """Enrich a linear triangulation with cubic nodes.

    vertices: (V, 2); triangles: (T, 3) vertex indices, any orientation.
    edge_labels: {frozenset({a, b}): label} for boundary edges.
    edge_arcs: {frozenset({a, b}): ArcSpec} for edges lying on a circle.
    """
    verts = np.asarray(vertices, dtype=float)
    tris = np.asarray(triangles, dtype=np.int64)
    edge_labels = edge_labels or {}
    edge_arcs = edge_arcs or {}

    ordered = []
    for tri in tris:
        a, b, c = (int(v) for v in tri)
        curved = [
            (p, q, r) for p, q, r in ((a, b, c), (b, c, a), (c, a, b)) if frozenset((p, q)) in edge_arcs
        ]
        if len(curved) > 1:
            raise GeometryError(f"triangle {tuple(tri)} has more than one curved edge")
        if curved:
            a, b, c = curved[0]
        area2 = _cross(verts[b] - verts[a], verts[c] - verts[a])
        if area2 == 0.0:
            raise GeometryError(f"triangle {tuple(tri)} is degenerate")
        if area2 < 0:
            a, b = b, a
        ordered.append((a, b, c))

    n_vert = len(verts)
    points = [p for p in verts]
    markers = [None] * n_vert
    groups = {}

    def mark(node, label):
        groups.setdefault(label, set()).add(node)
        if markers[node] is None:
            markers[node] = label

    for key, label in sorted(edge_labels.items(), key=lambda kv: (kv[1], sorted(kv[0]))):
        for v in sorted(key):
            mark(v, label)

    edge_nodes = {}
    cells = np.empty((len(ordered), 10), dtype=np.int64)
    arcs = []
    for e, (a, b, c) in enumerate(ordered):
        arc = edge_arcs.get(frozenset((a, b)))
        if arc is not None:
            arc = _oriented_arc(arc, verts[a], verts[b])
        coords = element_nodes(verts[a], verts[b], verts[c], arc)
        ids = [a, b, c]
        for (p, q), (i1, i2) in (((a, b), (3, 4)), ((b, c), (5, 6)), ((c, a), (7, 8))):
            key = (min(p, q), max(p, q))
            if key not in edge_nodes:
                # first entry sits next to the smaller vertex id
                first, second = (coords[i1], coords[i2]) if p < q else (coords[i2], coords[i1])
                points.extend([first, second])
                new = (len(points) - 2, len(points) - 1)
                markers.extend([None, None])
                edge_nodes[key] = new
                label = edge_labels.get(frozenset(key))
                if label is not None:
                    mark(new[0], label)
                    mark(new[1], label)
            n1, n2 = edge_nodes[key]
            ids.extend([n1, n2] if p < q else [n2, n1])
        points.append(coords[9])
        markers.append(None)
        ids.append(len(points) - 1)
        cells[e] = ids
        arcs.append(arc)

    return Mesh(np.array(points), cells, arcs, markers, {k: sorted(v) for k, v in groups.items()})


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def _oriented_arc(arc, t1, t2):
    """Copy of ``arc`` whose orientation runs the short way from t1 to t2."""
    c = np.asarray(arc.center)
    cross = _cross(np.asarray(t1) - c, np.asarray(t2) - c)
    orientation = "ccw" if cross > 0 else "cw"
    return ArcSpec(tuple(arc.center), arc.radius, arc.start_angle, arc.end_angle, orientation)


# --------------------------------------------------------------------------- validation


@dataclass
class Finding:
    kind: str
    element: Optional[int]
    message: str

    def __str__(self):
        where = f"element {self.element}: " if self.element is not None else ""
        return f"[{self.kind}] {where}{self.message}"


@dataclass
class ValidationReport:
    findings: list = field(default_factory=list)

    def __bool__(self):
        return not self.findings

    @property
    def ok(self):
        return not self.findings

    def kinds(self):
        return {f.kind for f in self.findings}

    def elements_with(self, kind):
        return {f.element for f in self.findings if f.kind == kind}

    def add(self, kind, element, message):
        self.findings.append(Finding(kind, element, message))

    def __str__(self):
        return "\n".join(map(str, self.findings)) or "mesh valid"


def validate_mesh(mesh, rule=None, tol=FORMULA_TOL):
    """Check conformity, node formulas, Jacobian signs and boundary markers."""
    rule = rule or quadrature_rule(8)
    report = ValidationReport()
    n = mesh.n_nodes
    cells = mesh.cells

    bad_ids = np.any((cells < 0) | (cells >= n), axis=1)
    for e in np.flatnonzero(bad_ids):
        report.add("node-id", int(e), f"references node outside 0..{n - 1}")
    if bad_ids.any():
        return report

    # conformity: each edge keyed by its vertex pair must carry the same inner nodes
    edges = {}
    for e, c in enumerate(cells.tolist()):
        for loc in EDGE_LOCAL_NODES:
            ids = [c[i] for i in loc]
            if ids[0] > ids[3]:
                ids = ids[::-1]
            edges.setdefault((ids[0], ids[3]), []).append((e, (ids[1], ids[2])))
    marked = {i for i, m in enumerate(mesh.markers) if m is not None}
    for (a, b), users in edges.items():
        if len(users) > 2:
            report.add("conformity", users[0][0], f"edge ({a}, {b}) shared by {len(users)} elements")
        elif len(users) == 2 and users[0][1] != users[1][1]:
            report.add(
                "conformity", users[1][0],
                f"edge ({a}, {b}) inner nodes {users[1][1]} differ from element {users[0][0]}'s {users[0][1]}",
            )
        elif len(users) == 1 and not {a, b, *users[0][1]} <= marked:
            report.add("conformity", users[0][0], f"edge ({a}, {b}) has one element but unmarked nodes")

    coords = mesh.element_coords()
    t = [coords[:, i] for i in range(10)]
    curved = np.array([a is not None for a in mesh.arcs])

    thirds = {
        5: t[1] + (t[2] - t[1]) / 3.0,
        6: t[1] + 2.0 * (t[2] - t[1]) / 3.0,
        7: t[2] + (t[0] - t[2]) / 3.0,
        8: t[2] + 2.0 * (t[0] - t[2]) / 3.0,
    }
    for i, expect in thirds.items():
        for e in np.flatnonzero(_off(t[i], expect, tol)):
            report.add("straight-edge", int(e), f"node t{i + 1} is not at a third of its edge")
    t4_straight = t[0] + (t[1] - t[0]) / 3.0
    for e in np.flatnonzero(~curved & _off(t[3], t4_straight, tol)):
        report.add("curved-edge", int(e), "edge 1-2 is not straight but carries no arc")
    for e in np.flatnonzero(_off(t[4], t[3] - (t[0] - t[1]) / 3.0, tol)):
        report.add("t5", int(e), "t5 != t4 - (t1 - t2)/3")
    t10 = (t[0] + t[1] + 4.0 * t[2] + 3.0 * t[3] + 3.0 * t[4]) / 12.0
    for e in np.flatnonzero(_off(t[9], t10, tol)):
        report.add("t10", int(e), "interior node violates t10 = (t1 + t2 + 4t3 + 3t4 + 3t5)/12")
    for e in np.flatnonzero(curved):
        arc = mesh.arcs[e]
        for i in (0, 1, 3):
            off = abs(arc.distance_from(coords[e, i]))
            if off > 1e-10 * max(1.0, arc.radius):
                report.add("arc", int(e), f"node t{i + 1} is {off:.2e} off its arc")

    J = el.jacobian_matrices(coords, rule.points)
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    for e in np.flatnonzero(np.any(det <= el.DET_THRESHOLD, axis=1)):
        report.add("jacobian", int(e), f"det J = {det[e].min():.3e} at a quadrature point")

    grouped = set()
    for label, ids in mesh.boundary_groups.items():
        ids = ids.tolist()
        if any(i < 0 or i >= n for i in ids):
            report.add("marker", None, f"group {label!r} references missing nodes")
        grouped.update(ids)
    if grouped != marked:
        extra, missing = sorted(grouped - marked), sorted(marked - grouped)
        report.add("marker", None, f"groups and node markers disagree (unmarked in groups: {extra[:5]}, orphan markers: {missing[:5]})")
    return report


def _off(a, b, tol):
    scale = np.maximum(1.0, np.abs(b).max(axis=-1))
    return np.abs(a - b).max(axis=-1) > tol * scale


def check_jacobians(mesh, rule=None):
    """Raise DegenerateElementError if any det J <= threshold."""
    rule = rule or quadrature_rule(8)
    J = el.jacobian_matrices(mesh.element_coords(), rule.points)
    el.invert_jacobians(J, points=rule.points)


# --------------------------------------------------------------------------- JSON I/O


def mesh_to_dict(mesh):
    nodes = [
        {"id": i, "x": float(p[0]), "y": float(p[1]), "marker": m}
        for i, (p, m) in enumerate(zip(mesh.points, mesh.markers))
    ]
    elements = []
    for e, (c, arc) in enumerate(zip(mesh.cells.tolist(), mesh.arcs)):
        curved = None
        if arc is not None:
            curved = {"center": [float(arc.center[0]), float(arc.center[1])], "radius": float(arc.radius),
                      "orientation": arc.orientation}
        elements.append({"id": e, "nodes": c, "curved_edge": curved})
    groups = {k: v.tolist() for k, v in mesh.boundary_groups.items()}
    return {"nodes": nodes, "elements": elements, "boundary_groups": groups}


def write_mesh(mesh, path):
    # json emits the shortest repr that round-trips, i.e. full double precision
    with open(path, "w") as fh:
        json.dump(mesh_to_dict(mesh), fh, indent=1)
        fh.write("\n")


def read_mesh(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise MeshParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return mesh_from_dict(data, source=str(path))


def mesh_from_dict(data, source="<mesh>"):
    def fail(msg):
        raise MeshParseError(f"{source}: {msg}")

    if not isinstance(data, dict):
        fail("top level must be an object")
    for key in ("nodes", "elements", "boundary_groups"):
        if key not in data:
            fail(f"missing top-level field {key!r}")

    nodes = data["nodes"]
    points = np.empty((len(nodes), 2))
    markers = [None] * len(nodes)
    seen = set()
    for k, nd in enumerate(nodes):
        try:
            i = int(nd["id"])
            x, y = float(nd["x"]), float(nd["y"])
        except (KeyError, TypeError, ValueError) as exc:
            fail(f"node entry {k}: bad or missing field ({exc})")
        if not (0 <= i < len(nodes)) or i in seen:
            fail(f"node entry {k}: id {i} is duplicated or not contiguous from 0")
        if not (math.isfinite(x) and math.isfinite(y)):
            fail(f"node {i}: non-finite coordinates")
        seen.add(i)
        points[i] = (x, y)
        markers[i] = nd.get("marker")

    cells = np.empty((len(data["elements"]), 10), dtype=np.int64)
    arcs = []
    for k, elem in enumerate(data["elements"]):
        eid = elem.get("id", k)
        ids = elem.get("nodes")
        if not isinstance(ids, list) or len(ids) != 10:
            fail(f"element {eid}: 'nodes' must list 10 node ids")
        for nid in ids:
            if not isinstance(nid, int) or not (0 <= nid < len(nodes)):
                fail(f"element {eid}: references missing node {nid}")
        cells[k] = ids
        ce = elem.get("curved_edge")
        if ce is None:
            arcs.append(None)
            continue
        if not isinstance(ce, dict) or "center" not in ce or "radius" not in ce:
            fail(f"element {eid}: curved edge requires arc (center and radius)")
        try:
            arcs.append(ArcSpec(tuple(map(float, ce["center"])), float(ce["radius"]),
                                orientation=ce.get("orientation", "ccw")))
        except (GeometryError, TypeError, ValueError) as exc:
            fail(f"element {eid}: bad curved edge ({exc})")

    coords = points[cells]
    t4_straight = coords[:, 0] + (coords[:, 1] - coords[:, 0]) / 3.0
    for e in np.flatnonzero(_off(coords[:, 3], t4_straight, 1e-9)):
        if arcs[e] is None:
            fail(f"element {e}: curved edge requires arc")

    groups = data["boundary_groups"]
    if not isinstance(groups, dict):
        fail("'boundary_groups' must be an object")
    for label, ids in groups.items():
        for nid in ids:
            if not isinstance(nid, int) or not (0 <= nid < len(nodes)):
                fail(f"boundary group {label!r}: references missing node {nid}")
    return Mesh(points, cells, arcs, markers, groups)


def sample_curved_edge(coords, n=100):
    """Points of the mapped edge 1-2 (xi + eta = 1) at n equispaced parameters."""
    s = np.linspace(0.0, 1.0, n)
    return el.map_point(coords, 1.0 - s, s)
