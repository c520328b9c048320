"""Symmetric quadrature rules on the reference triangle (1,0), (0,1), (0,0).

Weights are scaled so they sum to the reference area 1/2.
"""

from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray  # (n, 2) columns xi, eta
    weights: np.ndarray  # (n,)
    degree: int

    def __len__(self):
        return len(self.weights)


def _expand(orbits):
    pts, wts = [], []
    for bary, w in orbits:
        for p in sorted(set(permutations(bary))):
            pts.append(p[:2])
            wts.append(w)
    return np.array(pts, dtype=float), np.array(wts, dtype=float)


def _s21(a, w):
    return (a, a, 1.0 - 2.0 * a), w


def _s111(a, b, w):
    return (a, b, 1.0 - a - b), w


_R15 = np.sqrt(15.0)

# Orbits given in barycentric form with weights already halved.
_ORBITS = {
    2: [_s21(1.0 / 6.0, 1.0 / 6.0)],
    5: [
        ((1.0 / 3.0,) * 3, 9.0 / 80.0),
        _s21((6.0 - _R15) / 21.0, (155.0 - _R15) / 2400.0),
        _s21((6.0 + _R15) / 21.0, (155.0 + _R15) / 2400.0),
    ],
    # 16-point rule, orbit parameters refined to full precision by Newton
    # iteration on the 45 moment equations of degree <= 8.
    8: [
        ((1.0 / 3.0,) * 3, 0.072157803838893584126),
        _s21(0.45929258829272315603, 0.047545817133642312397),
        _s21(0.17056930775176020662, 0.051608685267359125141),
        _s21(0.050547228317030975458, 0.016229248811599040155),
        _s111(0.0083947774099576053372, 0.26311282963463811342, 0.013615157087217497132),
    ],
}

SUPPORTED_DEGREES = tuple(sorted(_ORBITS))


def quadrature_rule(degree=8):
    """Return the symmetric positive-weight rule exact to ``degree``."""
    if degree not in _ORBITS:
        raise ConfigurationError(
            f"unsupported quadrature degree {degree}; choose one of {SUPPORTED_DEGREES}"
        )
    pts, wts = _expand(_ORBITS[degree])
    pts.setflags(write=False)
    wts.setflags(write=False)
    return QuadratureRule(pts, wts, degree)


def gauss_legendre_1d(n):
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w
