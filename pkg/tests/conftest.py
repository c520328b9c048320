import numpy as np
import pytest

from curvedfem.assembly import BoundaryData
from curvedfem.generators import DomainSpec, generate_square_mesh, generate_vnotch_inclusions_mesh, generate_vnotch_mesh
from curvedfem.mesh import build_cubic_mesh


def _zero(x, y):
    return np.zeros_like(x)


def _one_minus_x(x, y):
    return 1.0 - x


def _one(x, y):
    return np.ones_like(x)


TABLE4 = {"G1": _zero, "G2": _zero, "G3": _one_minus_x, "G4": _one, "G5": _one_minus_x, "G6": _zero, "G7": _zero}


def table4_bc(mesh):
    natural = frozenset(k for k in mesh.boundary_groups if k.startswith("inclusion"))
    return BoundaryData(dict(TABLE4), natural)


@pytest.fixture(scope="session")
def square_meshes():
    return {n: generate_square_mesh(n) for n in (8, 16, 32)}


@pytest.fixture(scope="session")
def vnotch_mesh():
    return generate_vnotch_mesh(DomainSpec.default("v_notch"))


@pytest.fixture(scope="session")
def inclusions_mesh():
    return generate_vnotch_inclusions_mesh(DomainSpec.default("v_notch_with_inclusions"))


@pytest.fixture
def identity_mesh():
    """One straight element whose map is the identity."""
    return build_cubic_mesh([(1.0, 0.0), (0.0, 1.0), (0.0, 0.0)], [(0, 1, 2)])


@pytest.fixture
def quarter_circle_coords():
    from curvedfem.geometry import circle, element_nodes

    return element_nodes((1.0, 0.0), (0.0, 1.0), (0.0, 0.0), circle((0.0, 0.0), 1.0))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
