"""Mesh generators for the unit square, the V-notched square and the
V-notched square with circular inclusions.

Unstructured domains are triangulated by Delaunay on a fixed boundary
point set plus a smoothed hexagonal interior lattice; the linear
triangulation is then enriched with cubic nodes by ``build_cubic_mesh``.
"""

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay

from .errors import ConfigurationError, GeometryError
from .geometry import circle, point_in_polygon, segment_distance
from .mesh import build_cubic_mesh

SQUARE_LABELS = ("GD1", "GD2", "GD3", "GD4")  # x=0, x=1, y=0, y=1
VNOTCH_LABELS = tuple(f"G{i}" for i in range(1, 8))


@dataclass(frozen=True)
class NotchSpec:
    """Straight-flanked notch cut into one side of the unit square.

    The default opens on x = 1 between y = 0.35 and y = 0.65 with its apex
    at the centre, so the Table-style data (0 on the notched side, 1 - x on
    top and bottom, 1 on x = 0) is continuous around the boundary.
    """

    apex: tuple = (0.5, 0.5)
    half_angle: float = math.atan2(0.15, 0.5)
    depth: float = 0.5
    side: str = "right"


@dataclass(frozen=True)
class DomainSpec:
    variant: str = "v_notch"
    notch: Optional[NotchSpec] = field(default_factory=NotchSpec)
    inclusions: tuple = ()
    target_h: float = 0.045

    @classmethod
    def default(cls, variant="v_notch"):
        if variant == "unit_square":
            return cls("unit_square", None, (), 0.25)
        if variant == "v_notch":
            return cls("v_notch", NotchSpec(), (), 0.045)
        if variant == "v_notch_with_inclusions":
            incl = tuple(circle(c, 0.06) for c in ((0.25, 0.72), (0.5, 0.78), (0.75, 0.72)))
            return cls("v_notch_with_inclusions", NotchSpec(), incl, 0.05)
        raise ConfigurationError(f"unknown domain variant {variant!r}")

    @classmethod
    def from_dict(cls, data):
        variant = data.get("variant", "v_notch")
        base = cls.default(variant)
        notch = base.notch
        if data.get("notch") is not None:
            nd = data["notch"]
            notch = NotchSpec(tuple(nd.get("apex", notch.apex)), float(nd.get("half_angle", notch.half_angle)),
                              float(nd.get("depth", notch.depth)), nd.get("side", notch.side))
        incl = base.inclusions
        if "inclusions" in data:
            incl = tuple(circle(i["center"], i["radius"]) for i in data["inclusions"])
        return cls(variant, notch, incl, float(data.get("target_h", base.target_h)))


# --------------------------------------------------------------------------- square


def generate_square_mesh(n_elements):
    """Structured cubic mesh of [0, 1]^2 with 8, 16 or 32 triangles."""
    if n_elements in (8, 32):
        m = 2 if n_elements == 8 else 4
        g = np.linspace(0.0, 1.0, m + 1)
        X, Y = np.meshgrid(g, g, indexing="xy")
        verts = np.column_stack([X.ravel(), Y.ravel()])
        tris = []
        for j in range(m):
            for i in range(m):
                a = j * (m + 1) + i
                b, c, d = a + 1, a + m + 2, a + m + 1
                tris += [(a, b, c), (a, c, d)]
    elif n_elements == 16:
        g = np.linspace(0.0, 1.0, 3)
        X, Y = np.meshgrid(g, g, indexing="xy")
        verts = [*np.column_stack([X.ravel(), Y.ravel()])]
        tris = []
        for j in range(2):
            for i in range(2):
                a = j * 3 + i
                b, c, d = a + 1, a + 4, a + 3
                verts.append(np.array([(i + 0.5) / 2.0, (j + 0.5) / 2.0]))
                m = len(verts) - 1
                tris += [(a, b, m), (b, c, m), (c, d, m), (d, a, m)]
        verts = np.array(verts)
    else:
        raise ConfigurationError(f"square mesh supports 8, 16 or 32 elements, got {n_elements}")

    labels = {}
    tol = 1e-12
    for tri in tris:
        for p, q in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            P, Q = verts[p], verts[q]
            for label, axis, val in zip(SQUARE_LABELS, (0, 0, 1, 1), (0.0, 1.0, 0.0, 1.0)):
                if abs(P[axis] - val) < tol and abs(Q[axis] - val) < tol:
                    labels[frozenset((p, q))] = label
    return build_cubic_mesh(verts, tris, labels)


# --------------------------------------------------------------------------- V-notch


# square corners in counter-clockwise order, starting after the notched side
_CORNERS_AFTER = {
    "right": ((1.0, 1.0), (0.0, 1.0), (0.0, 0.0), (1.0, 0.0)),
    "top": ((0.0, 1.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0)),
    "left": ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)),
    "bottom": ((1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.0)),
}
# unit vector from the apex toward the notched side
_OUTWARD = {"right": (1.0, 0.0), "top": (0.0, 1.0), "left": (-1.0, 0.0), "bottom": (0.0, -1.0)}


def vnotch_polygon(notch):
    """Counter-clockwise outline of the notched unit square and its labels.

    Segment k runs from vertex k to vertex k+1 and carries label G(k+1);
    traversal starts at the notch apex, so G1 and G7 are the flanks.
    """
    if notch is None:
        raise GeometryError("v-notch domain needs a notch specification")
    if notch.side not in _OUTWARD:
        raise GeometryError(f"notch side must be one of {sorted(_OUTWARD)}, got {notch.side!r}")
    if not 0.0 < notch.half_angle < math.pi / 2.0:
        raise GeometryError(f"degenerate notch: opening angle {2 * notch.half_angle:.6g} rad")
    if notch.depth <= 0:
        raise GeometryError("notch depth must be positive")
    apex = np.asarray(notch.apex, dtype=float)
    out = np.array(_OUTWARD[notch.side])
    along = np.array([-out[1], out[0]])  # counter-clockwise direction along the notched side
    mid = apex + notch.depth * out
    half_mouth = notch.depth * math.tan(notch.half_angle)
    first, last = mid + half_mouth * along, mid - half_mouth * along
    on_side = abs(mid @ np.abs(out) - (1.0 if out.sum() > 0 else 0.0)) < 1e-12
    inside = all(0.0 < v < 1.0 for v in (first @ np.abs(along), last @ np.abs(along)))
    if not (on_side and inside and np.all((apex > 0.0) & (apex < 1.0))):
        raise GeometryError(f"notch must open on the {notch.side} side strictly between its corners")
    poly = np.array([apex, first, *_CORNERS_AFTER[notch.side], last])
    return poly, VNOTCH_LABELS


def generate_vnotch_mesh(spec=None, target_h=None):
    spec = spec or DomainSpec.default("v_notch")
    if spec.variant != "v_notch":
        raise ConfigurationError(f"expected variant 'v_notch', got {spec.variant!r}")
    h = spec.target_h if target_h is None else target_h
    poly, labels = vnotch_polygon(spec.notch)
    return _unstructured_mesh(poly, labels, (), h)


def generate_vnotch_inclusions_mesh(spec=None, target_h=None):
    spec = spec or DomainSpec.default("v_notch_with_inclusions")
    if spec.variant != "v_notch_with_inclusions":
        raise ConfigurationError(f"expected variant 'v_notch_with_inclusions', got {spec.variant!r}")
    h = spec.target_h if target_h is None else target_h
    poly, labels = vnotch_polygon(spec.notch)
    _check_inclusions(poly, spec.inclusions)
    return _unstructured_mesh(poly, labels, spec.inclusions, h)


def generate_mesh(spec, target_h=None):
    if spec.variant == "unit_square":
        raise ConfigurationError("use generate_square_mesh for the unit square")
    if spec.variant == "v_notch":
        return generate_vnotch_mesh(spec, target_h)
    return generate_vnotch_inclusions_mesh(spec, target_h)


def _check_inclusions(poly, inclusions):
    if not inclusions:
        raise GeometryError("inclusion variant needs at least one inclusion")
    for k, arc in enumerate(inclusions):
        if not arc.is_full_circle():
            raise GeometryError(f"inclusion {k + 1} is not a full circle")
        c = np.array(arc.center)
        if not point_in_polygon(c, poly)[0]:
            raise GeometryError(f"inclusion {k + 1} center lies outside the domain")
        d = min(segment_distance(c, poly[i], poly[(i + 1) % len(poly)])[0] for i in range(len(poly)))
        if d <= arc.radius:
            raise GeometryError(f"inclusion {k + 1} intersects the outer boundary")
        for j in range(k):
            other = inclusions[j]
            if np.hypot(*(c - np.array(other.center))) <= arc.radius + other.radius:
                raise GeometryError(f"inclusions {j + 1} and {k + 1} intersect")


def _unstructured_mesh(poly, labels, inclusions, h, smoothing_steps=12):
    if not h > 0:
        raise ConfigurationError(f"target mesh size must be positive, got {h}")
    bpts, bseg, seg_label, seg_arc = [], [], [], []

    def add_chain(chain, closed, label, arc):
        start = len(bpts)
        bpts.extend(chain)
        n = len(chain)
        for i in range(n if closed else n - 1):
            bseg.append((start + i, start + (i + 1) % n))
            seg_label.append(label)
            seg_arc.append(arc)

    # outer boundary: consecutive segments share their end points
    n_poly = len(poly)
    outer = []
    outer_seg_labels = []
    for k in range(n_poly):
        a, b = poly[k], poly[(k + 1) % n_poly]
        m = max(1, math.ceil(np.linalg.norm(b - a) / h - 1e-9))
        for i in range(m):
            outer.append(a + (b - a) * i / m)
            outer_seg_labels.append(labels[k])
    start = len(bpts)
    bpts.extend(outer)
    for i, lab in enumerate(outer_seg_labels):
        bseg.append((start + i, start + (i + 1) % len(outer)))
        seg_label.append(lab)
        seg_arc.append(None)

    for k, arc in enumerate(inclusions):
        m = max(8, math.ceil(2.0 * math.pi * arc.radius / h - 1e-9))
        angles = 2.0 * math.pi * np.arange(m) / m
        chain = [arc.point(t) for t in angles]
        add_chain(chain, True, f"inclusion{k + 1}", arc)

    bpts = np.array(bpts)
    n_fixed = len(bpts)

    def inside(points, margin=0.0):
        ok = point_in_polygon(points, poly)
        if margin > 0:
            d = np.min([segment_distance(points, poly[i], poly[(i + 1) % n_poly]) for i in range(n_poly)], axis=0)
            ok &= d > margin
        for arc in inclusions:
            r = np.hypot(points[:, 0] - arc.center[0], points[:, 1] - arc.center[1])
            ok &= r > arc.radius + margin
        return ok

    # hexagonal interior lattice
    dy = h * math.sqrt(3.0) / 2.0
    ys = np.arange(dy / 2.0, 1.0, dy)
    lattice = []
    for j, y in enumerate(ys):
        xs = np.arange(h / 2.0 * (1 + j % 2) - h / 2.0, 1.0 + h, h)
        lattice.append(np.column_stack([xs, np.full_like(xs, y)]))
    lattice = np.vstack(lattice)
    interior = lattice[inside(lattice, margin=0.55 * h)]

    seg_arr = np.array(bseg)
    for _ in range(smoothing_steps):
        pts = np.vstack([bpts, interior])
        tris = _domain_triangles(pts, poly, inclusions)
        interior = _laplace_step(pts, tris, n_fixed, interior, lambda p: inside(p, margin=0.3 * h))

    # recover any boundary segment that Delaunay missed by splitting it
    pts = np.vstack([bpts, interior])
    for _ in range(10):
        tris = _domain_triangles(pts, poly, inclusions)
        edges = {frozenset(e) for t in tris for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))}
        missing = [k for k, s in enumerate(seg_arr) if frozenset(s) not in edges]
        if not missing:
            break
        pts, seg_arr, seg_label, seg_arc = _split_segments(pts, seg_arr, seg_label, seg_arc, missing, n_fixed)
        n_fixed = len(pts) - len(interior)
    else:
        raise GeometryError("could not recover the boundary in the triangulation")

    edge_labels = {frozenset(map(int, s)): lab for s, lab in zip(seg_arr, seg_label)}
    edge_arcs = {frozenset(map(int, s)): arc for s, arc in zip(seg_arr, seg_arc) if arc is not None}
    return build_cubic_mesh(pts, tris, edge_labels, edge_arcs)


def _domain_triangles(pts, poly, inclusions):
    tri = Delaunay(pts).simplices
    cen = pts[tri].mean(axis=1)
    keep = point_in_polygon(cen, poly)
    for arc in inclusions:
        keep &= np.hypot(cen[:, 0] - arc.center[0], cen[:, 1] - arc.center[1]) > arc.radius
    tri = tri[keep]
    a, b, c = pts[tri[:, 0]], pts[tri[:, 1]], pts[tri[:, 2]]
    area2 = (b - a)[:, 0] * (c - a)[:, 1] - (b - a)[:, 1] * (c - a)[:, 0]
    return tri[np.abs(area2) > 1e-14]


def _laplace_step(pts, tris, n_fixed, interior, admissible):
    n = len(pts)
    acc = np.zeros((n, 2))
    cnt = np.zeros(n)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        np.add.at(acc, tris[:, i], pts[tris[:, j]])
        np.add.at(acc, tris[:, j], pts[tris[:, i]])
        np.add.at(cnt, tris[:, i], 1)
        np.add.at(cnt, tris[:, j], 1)
    moved = interior.copy()
    idx = np.arange(n_fixed, n)
    has = cnt[idx] > 0
    moved[has] = acc[idx[has]] / cnt[idx[has], None]
    ok = admissible(moved)
    return np.where(ok[:, None], moved, interior)


def _split_segments(pts, seg_arr, seg_label, seg_arc, missing, n_fixed):
    bpts = list(pts[:n_fixed])
    interior = pts[n_fixed:]
    segs, labs, arcs = [], [], []
    missing = set(missing)
    for k, (s, lab, arc) in enumerate(zip(seg_arr, seg_label, seg_arc)):
        a, b = int(s[0]), int(s[1])
        if k in missing:
            if arc is None:
                mid = 0.5 * (pts[a] + pts[b])
            else:
                t1, t2 = arc.angle_of(pts[a]), arc.angle_of(pts[b])
                dt = (t2 - t1 + math.pi) % (2.0 * math.pi) - math.pi
                mid = arc.point(t1 + dt / 2.0)
            bpts.append(mid)
            m = len(bpts) - 1
            segs += [(a, m), (m, b)]
            labs += [lab, lab]
            arcs += [arc, arc]
        else:
            segs.append((a, b))
            labs.append(lab)
            arcs.append(arc)
    # segment ends index boundary points only, so appending keeps them valid
    return np.vstack([np.array(bpts), interior]), np.array(segs), labs, arcs
