"""Lie quadrics of a frame lattice.

The quadric attached to a frame ``F = (r, r1, r2, r12)`` is parametrized by

    Q(mu, nu) = r12 + mu r1 + nu r2 + mu nu r.

Labels may be infinite; internally a label is a homogeneous pair ``(p, q)``
standing for ``p / q``.  Neighbouring quadrics share an edge: ``nu = 0`` on
``Q`` and ``nu_1 = inf`` on ``Q_1`` for the n1-direction, ``mu = 0`` and
``mu_2 = inf`` for the n2-direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DegenerateQuadric, ZeroNu
from .gmc import GmcState
from .lattice import DEFAULT_TOL, GUARD, projective_distance


def as_pair(label) -> np.ndarray:
    """Homogeneous pair for a finite or infinite label (or a pair already)."""
    arr = np.asarray(label, dtype=float)
    if arr.shape == (2,):
        return arr
    if np.isinf(arr):
        return np.array([1.0, 0.0])
    return np.array([float(arr), 1.0])


def pair_value(pair) -> float:
    """Inverse of :func:`as_pair`; returns ``inf`` for ``q == 0``."""
    p, q = pair
    return np.inf if q == 0 else p / q


def quadric_coords(mu, nu) -> np.ndarray:
    """Coefficients of ``(r, r1, r2, r12)`` for the point with labels (mu, nu).

    Accepts finite floats, ``inf`` or homogeneous pairs.
    """
    (pm, qm), (pn, qn) = as_pair(mu), as_pair(nu)
    return np.array([pm * pn, pm * qn, qm * pn, qm * qn])


def quadric_point(F, mu, nu) -> np.ndarray:
    """The point ``r12 + mu r1 + nu r2 + mu nu r`` of the quadric of frame F."""
    return quadric_coords(mu, nu) @ np.asarray(F, dtype=float)


# quadratic form of the frame coefficients: c0 c3 - c1 c2 = 0 on the quadric
_COEFF_FORM = 0.5 * np.array([[0, 0, 0, 1], [0, 0, -1, 0], [0, -1, 0, 0], [1, 0, 0, 0]], dtype=float)


def implicit_matrix(F) -> np.ndarray:
    """Symmetric S with ``x^T S x = 0`` on the quadric of frame F.

    A point ``x = c F`` has frame coefficients ``c = x F^-1`` and lies on the
    quadric iff ``c0 c3 = c1 c2``, so ``S = F^-1 E F^-T``.  S has unit
    Frobenius norm and its first entry above roundoff is positive.

    Raises
    ------
    DegenerateQuadric
        If the frame is singular.
    """
    F = np.asarray(F, dtype=float)
    if np.linalg.cond(F) > 1 / GUARD:
        raise DegenerateQuadric("frame is singular")
    G = np.linalg.inv(F)
    S = G @ _COEFF_FORM @ G.T
    S = 0.5 * (S + S.T)
    S /= np.linalg.norm(S)
    flat = S.ravel()
    first = flat[np.argmax(np.abs(flat) > 1e-12)]
    return S if first > 0 else -S


@dataclass
class LieQuadric:
    """A Lie quadric given by its frame rows ``(r, r1, r2, r12)``."""

    frame: np.ndarray = field(repr=False)

    def point(self, mu, nu) -> np.ndarray:
        return quadric_point(self.frame, mu, nu)

    @cached_property
    def implicit(self) -> np.ndarray:
        return implicit_matrix(self.frame)


def c1_residual(Q: LieQuadric, Q1: LieQuadric, samples: int = 8, direction: int = 1) -> float:
    """Largest tangent-plane mismatch along the common edge of two quadrics.

    Points ``P`` of the shared edge (``nu = 0``, resp. ``mu = 0``, on ``Q``)
    are sampled and the sine of the angle between the tangent planes
    ``S P`` and ``S_1 P`` is returned.
    """
    S, S1 = Q.implicit, Q1.implicit
    worst = 0.0
    for t in np.linspace(-2.0, 2.0, samples):
        P = Q.point(t, 0.0) if direction == 1 else Q.point(0.0, t)
        worst = max(worst, float(projective_distance(S @ P, S1 @ P)))
    return worst


def common_generators(state: GmcState, direction: int = 1, tol: float = DEFAULT_TOL) -> tuple[float, ...]:
    """Real roots of ``b mu^2 - 2 g mu - a = 0`` (direction 1) or the barred analogue.

    Two roots when T > 0, a double root when T = 0 and none when T < 0.
    """
    if direction == 1:
        a, b, g, T = state.a, state.b, state.g, state.T
        scale = abs(a * b) + g * g
    else:
        a, b, g, T = state.a_bar, state.b_bar, state.g_bar, state.T_bar
        scale = abs(a * b) + g * g
    if abs(T) <= tol * scale:
        return (g / b,)
    if T < 0:
        return ()
    s = np.sqrt(T)
    return tuple(sorted(((g - s) / b, (g + s) / b)))


def neighbor_nu_map(state: GmcState, mu: float, nu: float) -> float:
    """Label ``nu_1 = -alpha (alpha / nu + b mu + v)`` on the n1-neighbour."""
    if nu == 0:
        raise ZeroNu("nu must be nonzero")
    return -state.alpha * (state.alpha / nu + state.b * mu + state.v)
