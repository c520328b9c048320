"""Circular arcs and the closed-form placement of curved-element nodes."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError

ON_ARC_TOL = 1e-10


@dataclass(frozen=True)
class ArcSpec:
    center: tuple
    radius: float
    start_angle: float = 0.0
    end_angle: float = 2.0 * math.pi
    orientation: str = "ccw"

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError(f"arc radius must be positive, got {self.radius}")
        if self.orientation not in ("ccw", "cw"):
            raise GeometryError(f"arc orientation must be 'ccw' or 'cw', got {self.orientation!r}")
        span = (self.end_angle - self.start_angle) % (2.0 * math.pi)
        if span == 0.0 and self.end_angle == self.start_angle:
            raise GeometryError("arc start and end angles coincide")

    def point(self, angle):
        cx, cy = self.center
        return np.array([cx + self.radius * math.cos(angle), cy + self.radius * math.sin(angle)])

    def angle_of(self, p):
        return math.atan2(p[1] - self.center[1], p[0] - self.center[0])

    def distance_from(self, p):
        """Signed radial distance of p from the circle."""
        return math.hypot(p[0] - self.center[0], p[1] - self.center[1]) - self.radius

    def is_full_circle(self):
        return abs(abs(self.end_angle - self.start_angle) - 2.0 * math.pi) < 1e-12


def circle(center, radius, orientation="ccw"):
    return ArcSpec(tuple(map(float, center)), float(radius), 0.0, 2.0 * math.pi, orientation)


def _sweep(arc, t1, t2):
    a1, a2 = arc.angle_of(t1), arc.angle_of(t2)
    delta = (a2 - a1) % (2.0 * math.pi)
    if arc.orientation == "cw":
        delta -= 2.0 * math.pi
    return a1, delta


def place_curved_edge_nodes(t1, t2, arc=None):
    """Nodes t4, t5 on the edge t1 -> t2.

    t4 sits on the arc one third of the angular sweep from t1; t5 follows
    from t5 = t4 - (t1 - t2)/3 and in general lies slightly off the arc.
    With ``arc=None`` the edge is straight and both nodes fall on thirds.
    """
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if arc is None:
        t4 = t1 + (t2 - t1) / 3.0
    else:
        for name, p in (("t1", t1), ("t2", t2)):
            off = arc.distance_from(p)
            if abs(off) > ON_ARC_TOL * max(1.0, arc.radius):
                raise GeometryError(f"{name}={tuple(p)} is off the arc by {off:.3e}")
        a1, delta = _sweep(arc, t1, t2)
        t4 = arc.point(a1 + delta / 3.0)
    t5 = t4 - (t1 - t2) / 3.0
    return t4, t5


def interior_node(t1, t2, t3, t4, t5):
    """t10 = (t1 + t2 + 4 t3 + 3 t4 + 3 t5) / 12."""
    t1, t2, t3, t4, t5 = (np.asarray(t, dtype=float) for t in (t1, t2, t3, t4, t5))
    return (t1 + t2 + 4.0 * t3 + 3.0 * t4 + 3.0 * t5) / 12.0


def element_nodes(t1, t2, t3, arc=None):
    """All ten node positions of a cubic triangle with vertices t1, t2, t3."""
    t1, t2, t3 = (np.asarray(t, dtype=float) for t in (t1, t2, t3))
    t4, t5 = place_curved_edge_nodes(t1, t2, arc)
    return np.array(
        [
            t1, t2, t3, t4, t5,
            t2 + (t3 - t2) / 3.0,
            t2 + 2.0 * (t3 - t2) / 3.0,
            t3 + (t1 - t3) / 3.0,
            t3 + 2.0 * (t1 - t3) / 3.0,
            interior_node(t1, t2, t3, t4, t5),
        ]
    )


def point_in_polygon(points, polygon):
    """Even-odd test for an (n, 2) array of points; boundary points are ambiguous."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    poly = np.asarray(polygon, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    j = len(poly) - 1
    for i in range(len(poly)):
        xi, yi = poly[i]
        xj, yj = poly[j]
        crosses = (yi > y) != (yj > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = (xj - xi) * (y - yi) / (yj - yi) + xi
        inside ^= crosses & (x < xint)
        j = i
    return inside


def segment_distance(points, a, b):
    """Distance from each point to the segment a-b."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.asarray(a, dtype=float)
    ab = np.asarray(b, dtype=float) - a
    s = np.clip(((pts - a) @ ab) / (ab @ ab), 0.0, 1.0)
    return np.linalg.norm(pts - (a + s[:, None] * ab), axis=1)
