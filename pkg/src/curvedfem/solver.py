"""Direct sparse solve and the Picard fixed-point loop."""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import SparseSystem, apply_dirichlet, assemble_bilinear, assemble_load
from .errors import ConfigurationError, SolverError
from .quadrature import quadrature_rule

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class PicardConfig:
    max_iterations: int = 100
    tolerance: float = 1e-5
    mu: float = 0.5
    quadrature_degree: int = 8
    # freeze the coefficient at 1/(2 mu); turns the loop into a linear solve
    linear: bool = False

    def __post_init__(self):
        if self.max_iterations <= 0:
            raise ConfigurationError("max_iterations must be positive")
        if not self.tolerance > 0:
            raise ConfigurationError("tolerance must be positive")
        if not self.mu > 0:
            raise ConfigurationError("mu must be positive")


@dataclass
class IterationTrace:
    diffs: list = field(default_factory=list)
    converged: bool = False

    @property
    def iterations_used(self):
        return len(self.diffs)

    def ratios(self):
        d = np.asarray(self.diffs)
        return d[1:] / d[:-1]


@dataclass
class Solution:
    nodal_values: np.ndarray
    trace: IterationTrace


def solve_linear(system):
    """Solve an SPD system with a symmetric-ordering sparse LU.

    Pivots stay on the diagonal, so U's diagonal is the D of an LDL^T
    factorisation and its sign certifies positive definiteness.
    Accepts a ``SparseSystem`` (returns the full nodal vector when it is
    reduced) or a ``(matrix, rhs)`` pair.
    """
    if isinstance(system, SparseSystem):
        K, b = system.matrix, system.rhs
    else:
        K, b = system
    K = sp.csc_matrix(K, dtype=float)
    b = np.asarray(b, dtype=float)
    if K.shape[0] == 0:
        u = np.zeros(0)
    else:
        try:
            lu = spla.splu(K, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                           options={"SymmetricMode": True})
        except RuntimeError as exc:
            raise SolverError(f"factorisation failed: {exc}") from None
        d = lu.U.diagonal()
        if np.any(lu.perm_r != lu.perm_c) or np.any(d <= 0):
            raise SolverError("matrix is not symmetric positive definite")
        u = lu.solve(b)
        res = np.abs(K @ u - b).max() / max(1.0, np.abs(b).max())
        if not res <= RESIDUAL_TOL:
            raise SolverError(f"linear residual {res:.3e} exceeds {RESIDUAL_TOL}")
    if isinstance(system, SparseSystem) and system.is_reduced:
        return system.expand(u)
    return u


def residual(phi_new, phi_old):
    """Largest nodal change between two iterates."""
    a = np.asarray(phi_new, dtype=float)
    b = np.asarray(phi_old, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"field length mismatch: {a.shape} vs {b.shape}")
    return float(np.abs(a - b).max()) if a.size else 0.0


def _solve_step(mesh, bc, load, phi, config, rule, linear):
    K = assemble_bilinear(mesh, phi, config.mu, rule, frozen=linear)
    return solve_linear(apply_dirichlet(SparseSystem(K, load), bc, mesh))


def initial_guess(mesh, bc, config=None, f=None, g=None):
    """Solution of the linear problem with coefficient 1/(2 mu)."""
    config = config or PicardConfig()
    rule = quadrature_rule(config.quadrature_degree)
    load = assemble_load(mesh, f, g, rule)
    return _solve_step(mesh, bc, load, np.zeros(mesh.n_nodes), config, rule, linear=True)


def picard_solve(mesh, bc, f=None, g=None, config=None, callback=None):
    """Picard iteration started from the linear solution.

    Stops once the max nodal change drops to ``config.tolerance`` or after
    ``config.max_iterations`` solves; running out of iterations is reported
    through ``trace.converged`` rather than raised.
    """
    config = config or PicardConfig()
    rule = quadrature_rule(config.quadrature_degree)
    load = assemble_load(mesh, f, g, rule)
    phi = _solve_step(mesh, bc, load, np.zeros(mesh.n_nodes), config, rule, linear=True)
    trace = IterationTrace()
    for it in range(config.max_iterations):
        new = _solve_step(mesh, bc, load, phi, config, rule, linear=config.linear)
        diff = residual(new, phi)
        trace.diffs.append(diff)
        phi = new
        log.debug("picard %d: max diff %.6e", it + 1, diff)
        if callback is not None:
            callback(it + 1, diff, phi)
        if diff <= config.tolerance:
            trace.converged = True
            break
    return Solution(phi, trace)
