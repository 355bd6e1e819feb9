"""Projective primitives: homogeneous points, Pluecker lines, determinants.

Points of P^3 are numpy arrays whose last axis has length 4; lattices of
points are arrays of shape ``(n1, n2, 4)`` indexed as ``grid[n1, n2]``.
Pluecker coordinates are ordered ``(p01, p23, p02, p13, p03, p12)``.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateLine, GridTooSmall

DEFAULT_TOL = 1e-9
GUARD = 1e-12

PLUECKER_PAIRS = ((0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2))


def wedge_norm(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Norm of x^y, i.e. the root sum of squares of all 2x2 minors of [x|y]."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    m = x[..., :, None] * y[..., None, :]
    m = m - np.swapaxes(m, -1, -2)
    return np.sqrt(0.5 * np.sum(m * m, axis=(-1, -2)))


def projective_distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Sine of the angle between representatives x and y.

    Computed from the 2x2 minors, which keeps full relative accuracy for
    nearly equal points (unlike ``sqrt(1 - cos^2)``).
    """
    nx = np.linalg.norm(x, axis=-1)
    ny = np.linalg.norm(y, axis=-1)
    return wedge_norm(x, y) / (nx * ny)


def projectively_equal(x: np.ndarray, y: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True when the points agree up to scale within ``tol``."""
    return bool(np.all(projective_distance(x, y) <= tol))


def plucker_from_points(a, b, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Pluecker coordinates of the line through two points.

    Parameters
    ----------
    a, b : array_like, shape (..., 4)
        Homogeneous coordinates.

    Returns
    -------
    numpy.ndarray, shape (..., 6)
        ``p^{ik} = a^i b^k - a^k b^i`` in the order of ``PLUECKER_PAIRS``.

    Raises
    ------
    DegenerateLine
        If any pair of points is projectively equal.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(projective_distance(a, b) <= tol):
        raise DegenerateLine("points are projectively equal")
    return wedge(a, b)


def wedge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Unchecked exterior product of 4-vectors in Pluecker order."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack([a[..., i] * b[..., k] - a[..., k] * b[..., i] for i, k in PLUECKER_PAIRS], axis=-1)


def plucker_form(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Symmetric bilinear form whose quadratic form is the Pluecker identity."""
    return 0.5 * (
        p[..., 0] * q[..., 1] + p[..., 1] * q[..., 0]
        - p[..., 2] * q[..., 3] - p[..., 3] * q[..., 2]
        + p[..., 4] * q[..., 5] + p[..., 5] * q[..., 4]
    )


def plucker_residual(p: np.ndarray) -> np.ndarray:
    """|p01 p23 - p02 p13 + p03 p12| / |p|^2."""
    p = np.asarray(p, dtype=float)
    return np.abs(plucker_form(p, p)) / np.sum(p * p, axis=-1)


def det4(m) -> float:
    """Determinant of a 4x4 matrix (LU factorization)."""
    m = np.asarray(m, dtype=float)
    if m.shape[-2:] != (4, 4):
        raise ValueError("expected a 4x4 matrix")
    return np.linalg.det(m)


def normalized_det(*rows: np.ndarray) -> np.ndarray:
    """det[rows] divided by the product of the row norms (a value in [-1, 1])."""
    m = np.stack(rows, axis=-2)
    with np.errstate(invalid="ignore"):
        return np.linalg.det(m) / np.prod(np.linalg.norm(m, axis=-1), axis=-1)


def asymptotic_residuals(surface: np.ndarray) -> np.ndarray:
    """Normalized star-planarity determinants of a point lattice.

    Parameters
    ----------
    surface : numpy.ndarray, shape (n1, n2, 4)

    Returns
    -------
    numpy.ndarray, shape (n1, n2, 2)
        ``[..., 0]`` is |r, r1, r11, r12| and ``[..., 1]`` is |r, r2, r22, r12|,
        each divided by the product of the point norms.  Sites where a stencil
        does not fit are NaN.
    """
    r = np.asarray(surface, dtype=float)
    n1, n2 = r.shape[:2]
    if not ((n1 >= 3 and n2 >= 2) or (n1 >= 2 and n2 >= 3)):
        raise GridTooSmall(f"grid {n1}x{n2} too small for asymptotic residuals")
    out = np.full((n1, n2, 2), np.nan)
    if n1 >= 3 and n2 >= 2:
        out[: n1 - 2, : n2 - 1, 0] = normalized_det(
            r[: n1 - 2, : n2 - 1], r[1 : n1 - 1, : n2 - 1], r[2:, : n2 - 1], r[1 : n1 - 1, 1:]
        )
    if n1 >= 2 and n2 >= 3:
        out[: n1 - 1, : n2 - 2, 1] = normalized_det(
            r[: n1 - 1, : n2 - 2], r[: n1 - 1, 1 : n2 - 1], r[: n1 - 1, 2:], r[1:, 1 : n2 - 1]
        )
    return out
