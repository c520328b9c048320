"""Cubic 10-node triangle on the reference triangle with vertices
t1 = (1, 0), t2 = (0, 1), t3 = (0, 0).

Local node order: three vertices, two nodes on each edge (1-2, 2-3, 3-1,
each listed starting next to the first vertex of the edge), then the
interior node. Only edge 1-2 may be curved; the geometry map is

    t(xi, eta) = t3 + (t1 - t3) xi + (t2 - t3) eta + c xi eta,
    c = 9/4 [(t4 + t5) - (t1 + t2)],

which is exact for the node positions produced by ``geometry``.
"""

import numpy as np

from .errors import DegenerateElementError

NODES_PER_ELEMENT = 10

REFERENCE_NODES = np.array(
    [
        [1.0, 0.0],
        [0.0, 1.0],
        [0.0, 0.0],
        [2.0 / 3.0, 1.0 / 3.0],
        [1.0 / 3.0, 2.0 / 3.0],
        [0.0, 2.0 / 3.0],
        [0.0, 1.0 / 3.0],
        [1.0 / 3.0, 0.0],
        [2.0 / 3.0, 0.0],
        [1.0 / 3.0, 1.0 / 3.0],
    ]
)
REFERENCE_NODES.setflags(write=False)

DET_THRESHOLD = 1e-14


def _coords(xi, eta):
    # object arrays (e.g. of Fraction) pass through so the formulas can be checked exactly
    x, y = np.asarray(xi), np.asarray(eta)
    if x.dtype != object and y.dtype != object:
        x, y = x.astype(float), y.astype(float)
    return x, y


def shape_values(xi, eta):
    """Evaluate N1..N10 at reference points; returns shape (..., 10)."""
    x, y = _coords(xi, eta)
    x2, y2, xy = x * x, y * y, x * y
    x3, y3 = x2 * x, y2 * y
    # integer coefficients over 2, so rational input gives exact results
    N = [
        (9 * x3 - 9 * x2 + 2 * x) / 2,
        (9 * y3 - 9 * y2 + 2 * y) / 2,
        (-9 * x3 - 9 * y3 - 27 * x2 * y - 27 * x * y2 + 18 * x2 + 18 * y2 + 36 * xy - 11 * x - 11 * y + 2) / 2,
        (27 * x2 * y - 9 * xy) / 2,
        (27 * x * y2 - 9 * xy) / 2,
        (-27 * y3 - 27 * x * y2 + 36 * y2 + 9 * xy - 9 * y) / 2,
        (27 * y3 + 54 * x * y2 - 45 * y2 + 27 * x2 * y - 45 * xy + 18 * y) / 2,
        (27 * x3 + 54 * x2 * y + 27 * x * y2 - 45 * x2 - 45 * xy + 18 * x) / 2,
        # leading term is the xi <-> eta mirror of N6; a -27/2 xi^2 term
        # would break the Kronecker property at (2/3, 0)
        (-27 * x3 - 27 * x2 * y + 36 * x2 + 9 * xy - 9 * x) / 2,
        -27 * x * y2 - 27 * x2 * y + 27 * xy,
    ]
    return np.stack(np.broadcast_arrays(*N), axis=-1)


def shape_gradients(xi, eta):
    """Reference gradients (d/dxi, d/deta); returns shape (..., 10, 2)."""
    x = np.asarray(xi, dtype=float)
    y = np.asarray(eta, dtype=float)
    x2, y2, xy = x * x, y * y, x * y
    zero = np.zeros_like(x + y)
    d_xi = [
        13.5 * x2 - 9.0 * x + 1.0,
        zero,
        -13.5 * x2 - 27.0 * xy - 13.5 * y2 + 18.0 * x + 18.0 * y - 5.5,
        27.0 * xy - 4.5 * y,
        13.5 * y2 - 4.5 * y,
        -13.5 * y2 + 4.5 * y,
        27.0 * y2 + 27.0 * xy - 22.5 * y,
        40.5 * x2 + 54.0 * xy + 13.5 * y2 - 45.0 * x - 22.5 * y + 9.0,
        -40.5 * x2 - 27.0 * xy + 36.0 * x + 4.5 * y - 4.5,
        -27.0 * y2 - 54.0 * xy + 27.0 * y,
    ]
    d_eta = [
        zero,
        13.5 * y2 - 9.0 * y + 1.0,
        -13.5 * y2 - 27.0 * xy - 13.5 * x2 + 18.0 * y + 18.0 * x - 5.5,
        13.5 * x2 - 4.5 * x,
        27.0 * xy - 4.5 * x,
        -40.5 * y2 - 27.0 * xy + 36.0 * y + 4.5 * x - 4.5,
        40.5 * y2 + 54.0 * xy - 45.0 * y + 13.5 * x2 - 22.5 * x + 9.0,
        27.0 * x2 + 27.0 * xy - 22.5 * x,
        -13.5 * x2 + 4.5 * x,
        -54.0 * xy - 27.0 * x2 + 27.0 * x,
    ]
    gx = np.stack(np.broadcast_arrays(*d_xi), axis=-1)
    gy = np.stack(np.broadcast_arrays(*d_eta), axis=-1)
    return np.stack([gx, gy], axis=-1)


def bilinear_coefficient(coords):
    """The xi*eta coefficient 9/4 [(t4 + t5) - (t1 + t2)]; zero for straight elements."""
    c = np.asarray(coords, dtype=float)
    return 2.25 * ((c[..., 3, :] + c[..., 4, :]) - (c[..., 0, :] + c[..., 1, :]))


def map_point(coords, xi, eta):
    """Map reference point(s) into the physical element given its (10, 2) node coordinates."""
    c = np.asarray(coords, dtype=float)
    xi = np.asarray(xi, dtype=float)[..., None]
    eta = np.asarray(eta, dtype=float)[..., None]
    t1, t2, t3 = c[0], c[1], c[2]
    return t3 + (t1 - t3) * xi + (t2 - t3) * eta + bilinear_coefficient(c) * xi * eta


def jacobian_matrices(coords, points):
    """Batched Jacobians.

    coords: (E, 10, 2) node coordinates, points: (Q, 2) reference points.
    Returns J with shape (E, Q, 2, 2) and J[..., i, j] = d x_i / d xi_j.
    """
    c = np.asarray(coords, dtype=float)
    p = np.asarray(points, dtype=float)
    cc = bilinear_coefficient(c)[:, None, :]  # (E, 1, 2)
    col_xi = (c[:, 0] - c[:, 2])[:, None, :] + cc * p[None, :, 1:2]
    col_eta = (c[:, 1] - c[:, 2])[:, None, :] + cc * p[None, :, 0:1]
    return np.stack([col_xi, col_eta], axis=-1)


def invert_jacobians(J, element_ids=None, points=None):
    """Closed-form 2x2 inversion; raises on det <= DET_THRESHOLD."""
    det = J[..., 0, 0] * J[..., 1, 1] - J[..., 0, 1] * J[..., 1, 0]
    bad = det <= DET_THRESHOLD
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        e, q = (idx[0] if det.ndim == 2 else 0), idx[-1]
        eid = int(element_ids[e]) if element_ids is not None else int(e)
        where = tuple(points[q]) if points is not None else q
        raise DegenerateElementError(
            f"element {eid}: det J = {det[bad][0]:.3e} at reference point {where}",
            element=eid,
            point=where,
        )
    inv = np.empty_like(J)
    inv[..., 0, 0] = J[..., 1, 1] / det
    inv[..., 1, 1] = J[..., 0, 0] / det
    inv[..., 0, 1] = -J[..., 0, 1] / det
    inv[..., 1, 0] = -J[..., 1, 0] / det
    return det, inv


class JacobianEval:
    __slots__ = ("matrix", "det", "inverse")

    def __init__(self, matrix, det, inverse):
        self.matrix = matrix
        self.det = det
        self.inverse = inverse


def jacobian(coords, xi, eta):
    """Jacobian of the geometry map at a single reference point."""
    p = np.array([[xi, eta]], dtype=float)
    J = jacobian_matrices(np.asarray(coords)[None], p)
    det, inv = invert_jacobians(J, points=p)
    return JacobianEval(J[0, 0], float(det[0, 0]), inv[0, 0])


def physical_gradients(coords, xi, eta):
    """Physical gradients J^{-T} grad_ref N_i at one point; shape (10, 2)."""
    jac = jacobian(coords, xi, eta)
    return shape_gradients(xi, eta) @ jac.inverse


def element_geometry(coords, rule, element_ids=None):
    """Per-element quadrature data used by assembly.

    Returns (dx, grads) where dx (E, Q) is weight * det J and grads
    (E, Q, 10, 2) holds the physical shape gradients.
    """
    J = jacobian_matrices(coords, rule.points)
    det, inv = invert_jacobians(J, element_ids=element_ids, points=rule.points)
    ref = shape_gradients(rule.points[:, 0], rule.points[:, 1])  # (Q, 10, 2)
    grads = np.einsum("qak,eqkj->eqaj", ref, inv)
    return det * rule.weights[None, :], grads
