import csv
import math

import numpy as np
import pytest

from curvedfem.generators import generate_square_mesh
from curvedfem.mesh import build_cubic_mesh
from curvedfem.verification import (
    REPORT_FIELDS,
    VERIFY_CONFIG,
    convergence_study,
    error_metrics,
    manufactured_square_case,
    rhs_consistency_residual,
    write_report_csv,
)


@pytest.fixture(scope="module")
def reports():
    return convergence_study(manufactured_square_case(), (8, 16, 32), VERIFY_CONFIG)


def test_exact_values():
    case = manufactured_square_case()
    assert case.exact(0.5, 1.0) == pytest.approx(math.pi / 2, abs=1e-15)
    np.testing.assert_allclose(case.exact_gradient(0.3, 0.5), [0.0, math.pi / 2])
    assert case.rhs_f(0.7, 0.0) == pytest.approx(-math.pi, abs=1e-15)


def test_rhs_is_derivative_of_flux():
    # finite-difference check of f = -d/dy [pi y / (2 mu (1 + pi y))]
    for mu in (0.5, 2.0):
        case = manufactured_square_case(mu)
        y, h = np.linspace(0.05, 0.95, 7), 1e-5
        q = lambda t: math.pi * t / (2 * mu * (1 + math.pi * t))
        np.testing.assert_allclose(case.rhs_f(0 * y, y), -(q(y + h) - q(y - h)) / (2 * h), rtol=1e-8)


def test_exact_solution_has_zero_metrics(square_meshes):
    case = manufactured_square_case()
    m = square_meshes[8]
    r = error_metrics(case.exact(*m.points.T), case, m)
    assert (r.e_abs, r.e_rel, r.l2) == (0.0, 0.0, 0.0)


def test_single_node_perturbation(square_meshes):
    case = manufactured_square_case()
    m = square_meshes[8]
    values = case.exact(*m.points.T)
    values[17] += 1e-7
    r = error_metrics(values, case, m)
    assert r.e_abs == pytest.approx(1e-7, rel=1e-8)
    assert r.e_rel == pytest.approx(6.366e-8, rel=1e-4)
    assert r.l2 == pytest.approx(1e-7 / 7, rel=1e-8)
    assert r.e_rel * math.pi / 2 == pytest.approx(r.e_abs, rel=1e-14)
    assert (r.elements, r.dof) == (8, 49)


def fine_square(n):
    """n x n grid split along one diagonal, boundary edges labelled."""
    g = np.linspace(0.0, 1.0, n + 1)
    pts = np.column_stack([np.tile(g, n + 1), np.repeat(g, n + 1)])
    tris, labels = [], {}
    for j in range(n):
        for i in range(n):
            a = j * (n + 1) + i
            tris += [(a, a + 1, a + n + 2), (a, a + n + 2, a + n + 1)]
    top = n * (n + 1)
    for i in range(n):
        for e in ((i, i + 1), (top + i, top + i + 1), (i * (n + 1), (i + 1) * (n + 1)),
                  (i * (n + 1) + n, (i + 1) * (n + 1) + n)):
            labels[frozenset(e)] = "boundary"
    return build_cubic_mesh(pts, tris, labels)


def test_rhs_consistency():
    case = manufactured_square_case()
    mesh = fine_square(16)
    assert mesh.n_elements == 512
    assert rhs_consistency_residual(case, mesh) <= 1e-8


def test_rhs_consistency_detects_wrong_rhs():
    case = manufactured_square_case()
    wrong = type(case)(case.exact, case.exact_gradient, lambda x, y: 2 * case.rhs_f(x, y), case.bc, case.mu)
    assert rhs_consistency_residual(wrong, generate_square_mesh(32)) > 1e-3


def test_convergence_study(reports):
    assert [(r.elements, r.dof) for r in reports] == [(8, 49), (16, 85), (32, 169)]
    for r in reports:
        assert r.l2 <= 1e-6
        assert r.e_rel <= 1e-4
        assert r.e_rel * math.pi / 2 == pytest.approx(r.e_abs, rel=1e-14)
    for a, b in zip(reports, reports[1:]):
        assert b.e_abs <= 2 * a.e_abs


def test_report_csv(tmp_path, reports):
    path = tmp_path / "report.csv"
    write_report_csv(reports, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == REPORT_FIELDS
    assert len(rows) == 4
    # full precision survives the round trip
    assert float(rows[3][4]) == reports[2].l2
