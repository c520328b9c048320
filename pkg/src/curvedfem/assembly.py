"""Picard-linearised stiffness, load vector and Dirichlet elimination.

The bilinear form for a frozen iterate phi_n is

    K_ij = sum_e int_e k(grad phi_n) grad N_i . grad N_j dx,
    k(g) = 1 / (2 mu (1 + |g|)),

evaluated pointwise at the quadrature points.
"""

import weakref
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from . import element as el
from .errors import ConfigurationError
from .quadrature import gauss_legendre_1d, quadrature_rule

NATURAL = "natural"


def flux_coefficient(grad, mu):
    """1 / (2 mu (1 + |grad|)); ``grad`` has a trailing axis of length 2."""
    g = np.asarray(grad, dtype=float)
    return 1.0 / (2.0 * mu * (1.0 + np.hypot(g[..., 0], g[..., 1])))


class Discretization:
    """Quadrature-point geometry of a mesh, computed once per (mesh, rule)."""

    def __init__(self, mesh, rule):
        self.mesh = mesh
        self.rule = rule
        coords = mesh.element_coords()
        self.dx, self.grads = el.element_geometry(coords, rule)
        self.values = el.shape_values(rule.points[:, 0], rule.points[:, 1])  # (Q, 10)
        self.xq = np.einsum("qa,eai->eqi", self.values, coords)  # physical quadrature points
        cells = mesh.cells
        self.rows = np.broadcast_to(cells[:, :, None], (len(cells), 10, 10)).ravel()
        self.cols = np.broadcast_to(cells[:, None, :], (len(cells), 10, 10)).ravel()

    def gradient_at_quadrature(self, phi):
        """grad phi_h at every quadrature point, shape (E, Q, 2)."""
        local = np.asarray(phi)[self.mesh.cells]
        # gradients ignore a constant shift; removing it makes constant fields exactly gradient free
        local = local - local[:, :1]
        return np.einsum("eqai,ea->eqi", self.grads, local)

    def element_matrices(self, coefficient):
        """sum_q w |J| k grad N_a . grad N_b for a coefficient of shape (E, Q)."""
        return np.einsum("eq,eqai,eqbi->eab", self.dx * coefficient, self.grads, self.grads)

    def scatter(self, element_mats):
        n = self.mesh.n_nodes
        # COO -> CSR sums duplicates in a fixed order, so the result is deterministic
        return sp.coo_matrix((element_mats.ravel(), (self.rows, self.cols)), shape=(n, n)).tocsr()


_CACHE = weakref.WeakKeyDictionary()


def discretization(mesh, rule=None):
    rule = rule or quadrature_rule(8)
    per_mesh = _CACHE.setdefault(mesh, {})
    if rule.degree not in per_mesh:
        per_mesh[rule.degree] = Discretization(mesh, rule)
    return per_mesh[rule.degree]


def assemble_bilinear(mesh, phi_n, mu=0.5, rule=None, frozen=False):
    """Global stiffness for the coefficient frozen at ``phi_n``.

    With ``frozen=True`` the gradient term is dropped and the coefficient
    is the constant 1/(2 mu), i.e. the linear problem.
    """
    if mu <= 0:
        raise ConfigurationError(f"mu must be positive, got {mu}")
    disc = discretization(mesh, rule)
    phi_n = np.asarray(phi_n, dtype=float)
    if phi_n.shape != (mesh.n_nodes,):
        raise ConfigurationError(f"coefficient field has {phi_n.shape} values, mesh has {mesh.n_nodes} nodes")
    if frozen:
        k = np.full(disc.dx.shape, 1.0 / (2.0 * mu))
    else:
        k = flux_coefficient(disc.gradient_at_quadrature(phi_n), mu)
    return disc.scatter(disc.element_matrices(k))


def _evaluate(func, x, y):
    return np.broadcast_to(np.asarray(func(x, y), dtype=float), np.shape(x))


def assemble_load(mesh, f=None, g=None, rule=None, edge_points=8):
    """Load vector int f N_i dx + sum over Neumann edges int g N_i ds.

    ``f`` is a callable f(x, y) (None means zero). ``g`` maps boundary
    labels to callables g(x, y); a label with no boundary edges is a
    configuration error.
    """
    disc = discretization(mesh, rule)
    n = mesh.n_nodes
    L = np.zeros(n)
    if f is not None:
        fq = _evaluate(f, disc.xq[..., 0], disc.xq[..., 1])
        contrib = np.einsum("eq,qa->ea", disc.dx * fq, disc.values)
        np.add.at(L, mesh.cells.ravel(), contrib.ravel())
    if g:
        s, w = gauss_legendre_1d(edge_points)
        for label, gfun in g.items():
            edges = mesh.boundary_edges(label)
            if not edges:
                raise ConfigurationError(f"traction given on {label!r}, which marks no boundary edge")
            for e, k, _ in edges:
                L[mesh.cells[e]] += _edge_load(mesh.element_coords(e), k, gfun, s, w)
    return L


# reference parametrisation of local edges: point(s) and d(point)/ds
_EDGE_PARAM = (
    (lambda s: (1.0 - s, s), (-1.0, 1.0)),
    (lambda s: (0.0 * s, 1.0 - s), (0.0, -1.0)),
    (lambda s: (s, 0.0 * s), (1.0, 0.0)),
)


def _edge_load(coords, k, gfun, s, w):
    param, tangent = _EDGE_PARAM[k]
    xi, eta = param(s)
    J = el.jacobian_matrices(coords[None], np.column_stack([xi, eta]))[0]  # (P, 2, 2)
    ds = np.linalg.norm(J @ np.asarray(tangent), axis=1)
    x = el.map_point(coords, xi, eta)
    gv = _evaluate(gfun, x[:, 0], x[:, 1])
    return (w * ds * gv) @ el.shape_values(xi, eta)


@dataclass
class BoundaryData:
    """Dirichlet data per boundary label; labels listed in ``natural`` are traction free.

    Where groups share a node the label that comes first in ``dirichlet``
    supplies the value.
    """

    dirichlet: dict
    natural: frozenset = frozenset()

    @classmethod
    def from_functions(cls, mapping):
        dirichlet = {k: v for k, v in mapping.items() if v is not None and v != NATURAL}
        natural = frozenset(k for k, v in mapping.items() if v is None or v == NATURAL)
        return cls(dirichlet, natural)

    def check_covers(self, mesh):
        for label in mesh.boundary_groups:
            if label not in self.dirichlet and label not in self.natural:
                raise ConfigurationError(f"no boundary condition for label {label!r}")
        for label in self.dirichlet:
            if label not in mesh.boundary_groups:
                raise ConfigurationError(f"boundary condition given for unknown label {label!r}")

    def constrained_values(self, mesh):
        """Node ids and prescribed values, sorted by node id."""
        self.check_covers(mesh)
        values = {}
        for label, func in self.dirichlet.items():
            ids = mesh.boundary_groups[label]
            new = np.array([i not in values for i in ids.tolist()], dtype=bool)
            ids = ids[new]
            if len(ids) == 0:
                continue
            vals = _evaluate(func, mesh.points[ids, 0], mesh.points[ids, 1])
            values.update(zip(ids.tolist(), vals.tolist()))
        order = sorted(values)
        return np.array(order, dtype=np.int64), np.array([values[i] for i in order], dtype=float)


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    constrained: Optional[np.ndarray] = None  # node ids
    values: Optional[np.ndarray] = None  # prescribed values at ``constrained``
    free: Optional[np.ndarray] = None
    n_total: Optional[int] = None

    @property
    def is_reduced(self):
        return self.free is not None

    def expand(self, u_free):
        """Full nodal vector from a solution on the free DOFs."""
        u = np.empty(self.n_total)
        u[self.free] = u_free
        u[self.constrained] = self.values
        return u


def apply_dirichlet(system, bc, mesh):
    """Eliminate constrained DOFs symmetrically, moving their coupling to the rhs."""
    ids, vals = bc.constrained_values(mesh)
    n = system.matrix.shape[0]
    mask = np.ones(n, dtype=bool)
    mask[ids] = False
    free = np.flatnonzero(mask)
    K = system.matrix.tocsr()
    K_fc = K[free][:, ids]
    rhs = system.rhs[free] - K_fc @ vals
    K_ff = K[free][:, free].tocsc()
    return SparseSystem(K_ff, rhs, ids, vals, free, n)
