"""Manufactured solution on the unit square and nodal error measures.

Exact field phi = (pi/2) y^2, gradient (0, pi y). The flux is
q = grad phi / (2 mu (1 + |grad phi|)) = (0, pi y / (2 mu (1 + pi y))),
so f = -div q = -pi / (2 mu (1 + pi y)^2).
"""

import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assembly import BoundaryData, discretization, flux_coefficient
from .generators import generate_square_mesh
from .quadrature import quadrature_rule
from .solver import PicardConfig, picard_solve

# Picard stopping error would otherwise dominate the ~1e-7 discretisation error
VERIFY_CONFIG = PicardConfig(tolerance=1e-10, max_iterations=200)
REPORT_FIELDS = ("elements", "dof", "e_abs", "e_rel", "l2")


@dataclass(frozen=True)
class ManufacturedCase:
    exact: Callable
    exact_gradient: Callable
    rhs_f: Callable
    bc: BoundaryData
    mu: float = 0.5


def manufactured_square_case(mu=0.5):
    half_pi = math.pi / 2.0

    def exact(x, y):
        return half_pi * np.asarray(y, dtype=float) ** 2 + 0.0 * np.asarray(x, dtype=float)

    def exact_gradient(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return np.stack([np.zeros_like(x), math.pi * y], axis=-1)

    def rhs_f(x, y):
        y = np.asarray(y, dtype=float) + 0.0 * np.asarray(x, dtype=float)
        return -math.pi / (2.0 * mu * (1.0 + math.pi * y) ** 2)

    bc = BoundaryData(
        {
            "GD1": exact,
            "GD2": exact,
            "GD3": lambda x, y: np.zeros_like(np.asarray(x, dtype=float)),
            "GD4": lambda x, y: np.full_like(np.asarray(x, dtype=float), half_pi),
        }
    )
    return ManufacturedCase(exact, exact_gradient, rhs_f, bc, mu)


@dataclass(frozen=True)
class ErrorReport:
    e_abs: float
    e_rel: float
    l2: float
    elements: int
    dof: int

    def row(self):
        return [self.elements, self.dof, repr(self.e_abs), repr(self.e_rel), repr(self.l2)]


def error_metrics(solution, case, mesh):
    """Nodal max error, max error relative to max |phi|, and RMS nodal error."""
    values = getattr(solution, "nodal_values", solution)
    exact = case.exact(mesh.points[:, 0], mesh.points[:, 1])
    err = np.asarray(values, dtype=float) - exact
    e_abs = float(np.abs(err).max())
    peak = float(np.abs(exact).max())
    e_rel = e_abs / peak if peak > 0 else e_abs
    l2 = float(np.sqrt(np.mean(err ** 2)))
    return ErrorReport(e_abs, e_rel, l2, mesh.n_elements, mesh.n_nodes)


def convergence_study(case=None, element_counts=(8, 16, 32), config=None):
    case = case or manufactured_square_case()
    config = config or PicardConfig(**{**VERIFY_CONFIG.__dict__, "mu": case.mu})
    reports = []
    for n in element_counts:
        mesh = generate_square_mesh(n)
        sol = picard_solve(mesh, case.bc, case.rhs_f, config=config)
        reports.append(error_metrics(sol, case, mesh))
    return reports


def write_report_csv(reports, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(REPORT_FIELDS)
        for r in reports:
            w.writerow(r.row())


def rhs_consistency_residual(case, mesh, n_fields=20, seed=0, degree=8):
    """max over random test fields v (zero on the boundary) of |int q.grad v - int f v|.

    Integration by parts turns this into int (-div q - f) v, which vanishes
    when f matches the exact flux.
    """
    disc = discretization(mesh, quadrature_rule(degree))
    x, y = disc.xq[..., 0], disc.xq[..., 1]
    g = case.exact_gradient(x, y)
    q = flux_coefficient(g, case.mu)[..., None] * g
    f = case.rhs_f(x, y)
    rng = np.random.default_rng(seed)
    boundary = np.array([m is not None for m in mesh.markers])
    worst = 0.0
    for _ in range(n_fields):
        v = rng.uniform(-1.0, 1.0, mesh.n_nodes)
        v[boundary] = 0.0
        grad_v = disc.gradient_at_quadrature(v)
        v_q = np.einsum("qa,ea->eq", disc.values, v[mesh.cells])
        r = np.sum(disc.dx * (np.einsum("eqi,eqi->eq", q, grad_v) - f * v_q))
        worst = max(worst, abs(r))
    return worst
