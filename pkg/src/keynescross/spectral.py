import math
from dataclasses import dataclass
from enum import Enum

from loguru import logger

from keynescross.equilibrium import EquilibriumPoint, equilibria
from keynescross.model import Jacobian2, jacobian


class Classification(str, Enum):
    STABLE_NODE = 'stable_node'
    UNSTABLE_NODE = 'unstable_node'
    STABLE_SPIRAL = 'stable_spiral'
    UNSTABLE_SPIRAL = 'unstable_spiral'
    STABLE_STAR = 'stable_star'
    UNSTABLE_STAR = 'unstable_star'
    CENTER = 'center'
    SADDLE = 'saddle'
    DEGENERATE = 'degenerate'

    @property
    def is_stable(self):
        return self in (Classification.STABLE_NODE, Classification.STABLE_SPIRAL, Classification.STABLE_STAR)


@dataclass(frozen=True)
class Eigen2:
    """
    Eigen decomposition of a 2x2 matrix.

    lambda1 carries the "+" branch of the quadratic formula, lambda2 the "-" branch.
    Eigenvectors have unit Euclidean length and a real-positive first nonzero component.

    Args:
        lambda1, lambda2 (complex): Eigenvalues.
        v1, v2 (tuple): Complex eigenvectors (x, y).
        discriminant (float): trace^2 - 4 det.
        defective (bool): Repeated eigenvalue with a one-dimensional eigenspace.
    """
    lambda1: complex
    lambda2: complex
    v1: tuple
    v2: tuple
    discriminant: float
    defective: bool = False

    @property
    def attracting(self):
        return (self.lambda1.real < 0, self.lambda2.real < 0)

    @property
    def is_real(self):
        return self.lambda1.imag == 0 and self.lambda2.imag == 0


@dataclass(frozen=True)
class EquilibriumReport:
    point: EquilibriumPoint
    jac: Jacobian2
    eigen: Eigen2
    classification: Classification

    @property
    def stable(self):
        return self.classification.is_stable


def default_tol(j):
    return 1e-9 * max(1.0, j.trace ** 2, abs(j.det))


def _normalize(x, y):
    norm = math.hypot(abs(x), abs(y))
    x, y = x / norm, y / norm
    # rotate so the first nonzero component is real and positive
    if abs(x) > 1e-14:
        u = abs(x) / x
        return (complex(abs(x), 0.0), y * u)
    u = abs(y) / y
    return (x * u, complex(abs(y), 0.0))


def _eigenvector(j, lam, fallback):
    # null space of (J - lam I) from the row with the larger norm
    r1 = (j.a11 - lam, j.a12)
    r2 = (j.a21, j.a22 - lam)
    n1 = abs(r1[0]) + abs(r1[1])
    n2 = abs(r2[0]) + abs(r2[1])
    p, q = r1 if n1 >= n2 else r2
    scale = max(abs(j.a11), abs(j.a12), abs(j.a21), abs(j.a22), abs(lam), 1.0)
    if max(n1, n2) <= 1e-14 * scale:
        return fallback
    return _normalize(complex(-q), complex(p))


def eigen_2x2(j):
    """
    Eigenvalues and eigenvectors of a 2x2 Jacobian.

    Real roots use the cancellation-free form: the larger-magnitude root from the
    quadratic formula, the other from the product det.
    """
    tr, det = j.trace, j.det
    disc = tr * tr - 4.0 * det
    if disc >= 0:
        s = math.sqrt(disc)
        if tr >= 0:
            l1 = 0.5 * (tr + s)
            l2 = det / l1 if l1 != 0 else 0.5 * (tr - s)
        else:
            l2 = 0.5 * (tr - s)
            l1 = det / l2
        l1, l2 = complex(l1), complex(l2)
    else:
        w = 0.5 * math.sqrt(-disc)
        l1 = complex(0.5 * tr, w)
        l2 = complex(0.5 * tr, -w)

    v1 = _eigenvector(j, l1, (1 + 0j, 0j))
    v2 = _eigenvector(j, l2, (0j, 1 + 0j))

    tol = default_tol(j)
    off_diagonal = abs(j.a12) + abs(j.a21) + abs(j.a11 - j.a22)
    defective = abs(disc) <= tol and off_diagonal > tol
    return Eigen2(l1, l2, v1, v2, disc, defective)


def classify(j, tol=None):
    """
    Trace-determinant classification of a planar linear system.

    Boundaries det = 0, trace = 0 and discriminant = 0 are decided with the band `tol`
    (default 1e-9 * max(1, trace^2, |det|)).
    """
    if tol is None:
        tol = default_tol(j)
    tr, det = j.trace, j.det
    disc = tr * tr - 4.0 * det
    if det < -tol:
        return Classification.SADDLE
    if abs(det) <= tol:
        return Classification.DEGENERATE
    if abs(tr) <= tol:
        return Classification.CENTER
    stable = tr < 0
    if disc > tol:
        return Classification.STABLE_NODE if stable else Classification.UNSTABLE_NODE
    if disc < -tol:
        return Classification.STABLE_SPIRAL if stable else Classification.UNSTABLE_SPIRAL
    return Classification.STABLE_STAR if stable else Classification.UNSTABLE_STAR


def report(params, policy, point):
    jac = jacobian(params, policy, point.state)
    return EquilibriumReport(point, jac, eigen_2x2(jac), classify(jac))


def analyze(params, policy):
    """Equilibria with Jacobian, eigenpairs and classification, sorted by ascending I."""
    reports = [report(params, policy, p) for p in equilibria(params, policy)]
    reports.sort(key=lambda r: r.point.state.i)
    for r in reports:
        logger.debug(f'({r.point.state.i:.6g}, {r.point.state.c:.6g}): {r.classification.value}')
    return reports
