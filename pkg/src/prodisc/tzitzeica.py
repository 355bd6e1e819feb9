"""Tzitzeica reduction ``K = H``: scaled frame, affine spheres and tau functions.

Tzitzeica lattices are stored as :class:`~prodisc.demoulin.DemoulinLattice`
with ``K`` equal to ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .demoulin import DemoulinLattice, chi_fields, dem_step, wilczynski_matrices
from .errors import (
    AffineChartFailure,
    DimensionMismatch,
    InconsistentRecurrences,
    NonConstantC,
    NotTzitzeica,
    PathInconsistency,
    ZeroTau,
)
from .gmc import GmcLattice, MinimalClass, classify, tzitzeica_constraint_residual
from .lattice import DEFAULT_TOL, GUARD


def tz_evolve(H_row, H_col, A_row, Q_col, tol: float = DEFAULT_TOL) -> DemoulinLattice:
    """Sweep the discrete Tzitzeica system from Cauchy data.

    ``H_row`` and ``A_row`` are given along ``n2 = 0``, ``H_col`` and ``Q_col``
    along ``n1 = 0``.
    """
    H_row, A_row = (np.asarray(x, dtype=float).ravel() for x in (H_row, A_row))
    H_col, Q_col = (np.asarray(x, dtype=float).ravel() for x in (H_col, Q_col))
    n1, n2 = H_row.size, H_col.size
    if n1 < 1 or n2 < 1 or A_row.size != n1 or Q_col.size != n2:
        raise DimensionMismatch("row data must have length n1 and column data length n2")
    if abs(H_row[0] - H_col[0]) > tol * max(abs(H_row[0]), abs(H_col[0])):
        raise DimensionMismatch("H at the origin differs between row and column data")
    H = np.full((n1, n2), np.nan)
    A, Q = H.copy(), H.copy()
    H[:, 0], A[:, 0] = H_row, A_row
    H[0, :], Q[0, :] = H_col, Q_col
    for j in range(n2 - 1):
        for i in range(n1 - 1):
            h, h1, h2 = H[i, j], H[i + 1, j], H[i, j + 1]
            H[i + 1, j + 1], _, A[i, j + 1], Q[i + 1, j] = dem_step(h, h1, h2, h, h1, h2, A[i, j], Q[i, j], (i, j))
    return DemoulinLattice(H, H.copy(), A, Q)


# -- scaled Wilczynski frame ---------------------------------------------------------


def affine_seed(H00: float) -> np.ndarray:
    """Seed frame for which the last coordinate of r^ is identically 1.

    The constant function 1 solves the scaled frame equations with initial
    data ``(r^, r^1, r^2, r^12) = (1, 0, 0, 1/H - 1)``; placing that vector in
    the last column makes the chart coordinate constant.
    """
    F = np.eye(4)
    F[:, 3] = (1.0, 0.0, 0.0, 1.0 / H00 - 1.0)
    return F


def integrate_phi(chi: np.ndarray, chib: np.ndarray, phi0: float = 1.0, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Integrate ``phi_1 = phi/chi`` and ``phi_2 = phi/chi_bar`` from the origin.

    Raises
    ------
    PathInconsistency
        If the n1-relation fails off the integration path.
    """
    n1, n2 = chib.shape[0], chi.shape[1]
    phi = np.empty((n1, n2))
    phi[0, 0] = phi0
    for i in range(n1 - 1):
        phi[i + 1, 0] = phi[i, 0] / chi[i, 0]
    for j in range(n2 - 1):
        phi[:, j + 1] = phi[:, j] / chib[:, j]
    if n1 > 1:
        err = np.max(np.abs(phi[1:] * chi - phi[:-1]) / np.abs(phi[:-1]))
        if err > tol:
            raise PathInconsistency(f"phi integration mismatch {err:.3g}")
    return phi


def scaled_frame(
    lattice: DemoulinLattice, seed=None, phi0: float = 1.0, tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray, dict[str, float]]:
    """Scaled Wilczynski frame ``F^ = phi F~`` of a Tzitzeica lattice.

    Parameters
    ----------
    seed : array_like, shape (4, 4), optional
        ``F^`` at the origin; defaults to :func:`affine_seed`.

    Returns
    -------
    F : numpy.ndarray, shape (n1, n2, 4, 4)
    phi : numpy.ndarray, shape (n1, n2)
    report : dict
        Largest relative residuals of the difference form of the frame
        equations (``frame_difference``) and of the second-order equations (``second_order``).
    """
    chi, chib = chi_fields(lattice, tol)
    phi = integrate_phi(chi, chib, phi0, tol)
    L, M = wilczynski_matrices(lattice, chi, chib)
    n1, n2 = lattice.shape
    seed = affine_seed(lattice.H[0, 0]) if seed is None else np.asarray(seed, dtype=float)
    Ft = np.empty((n1, n2, 4, 4))
    Ft[0, 0] = seed / phi0
    for j in range(1, n2):
        Ft[0, j] = M[0, j - 1] @ Ft[0, j - 1]
    for i in range(1, n1):
        Ft[i] = L[i - 1] @ Ft[i - 1]
    F = phi[..., None, None] * Ft
    r = F[..., 0, :]
    frame_difference = _frame_difference_residual(lattice.H, F)
    second_order = max(_nanmax(x) for x in second_order_residuals(lattice, r))
    return F, phi, {"frame_difference": frame_difference, "second_order": second_order}


def _rel(lhs: np.ndarray, rhs: np.ndarray, scale: np.ndarray) -> np.ndarray:
    return np.linalg.norm(lhs - rhs, axis=-1) / np.maximum(scale, GUARD)


def _nanmax(x: np.ndarray) -> float:
    return float(np.max(x)) if x.size else 0.0


def _frame_difference_residual(H: np.ndarray, F: np.ndarray) -> float:
    r, r1, r2, r12 = (F[..., k, :] for k in range(4))
    n = np.linalg.norm
    out = [
        _rel(r1[:-1], r[1:] - r[:-1], n(r[1:], axis=-1) + n(r[:-1], axis=-1)),
        _rel(r2[:, :-1], r[:, 1:] - r[:, :-1], n(r[:, 1:], axis=-1) + n(r[:, :-1], axis=-1)),
    ]
    if F.shape[0] > 1 and F.shape[1] > 1:
        h = H[:-1, :-1, None]
        rhs = r[1:, 1:] / h - r[1:, :-1] - r[:-1, 1:] + r[:-1, :-1]
        scale = sum(n(x, axis=-1) for x in (r[1:, 1:] / h, r[1:, :-1], r[:-1, 1:], r[:-1, :-1]))
        out.append(_rel(r12[:-1, :-1], rhs, scale))
    return max(_nanmax(x) for x in out)


def second_order_residuals(lattice: DemoulinLattice, r: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Residuals of the two second-order equations for points ``r`` of shape (n1, n2, d).

    The n1-equation is evaluated at sites ``(i, j)`` with ``i <= n1-3``,
    ``j <= n2-2``; the n2-equation symmetrically.
    """
    H, A, Q = lattice.H, lattice.A, lattice.Q
    n = np.linalg.norm
    n1, n2 = H.shape
    out = []
    if n1 >= 3 and n2 >= 2:
        h, h1, a = H[:-2, :-1, None], H[1:-1, :-1, None], A[:-2, :-1, None]
        r0, ra, raa, rab = r[:-2, :-1], r[1:-1, :-1], r[2:, :-1], r[1:-1, 1:]
        c1 = (h1 - 1) / (h1 * (h - 1))
        c2 = a / (h - 1)
        lhs = raa - ra
        rhs = c1 * (ra - r0) + c2 * (rab - ra)
        scale = n(raa, axis=-1) + n(ra, axis=-1) + n(c1 * ra, axis=-1) + n(c1 * r0, axis=-1) + n(c2 * rab, axis=-1)
        out.append(_rel(lhs, rhs, scale))
    else:
        out.append(np.zeros((0,)))
    if n1 >= 2 and n2 >= 3:
        h, h2, q = H[:-1, :-2, None], H[:-1, 1:-1, None], Q[:-1, :-2, None]
        r0, rb, rbb, rab = r[:-1, :-2], r[:-1, 1:-1], r[:-1, 2:], r[1:, 1:-1]
        c1 = (h2 - 1) / (h2 * (h - 1))
        c2 = q / (h - 1)
        lhs = rbb - rb
        rhs = c1 * (rb - r0) + c2 * (rab - rb)
        scale = n(rbb, axis=-1) + n(rb, axis=-1) + n(c1 * rb, axis=-1) + n(c1 * r0, axis=-1) + n(c2 * rab, axis=-1)
        out.append(_rel(lhs, rhs, scale))
    else:
        out.append(np.zeros((0,)))
    return out[0], out[1]


# -- affine spheres ----------------------------------------------------------------------


def conserved_vector(H: np.ndarray, r: np.ndarray) -> np.ndarray:
    """``(r_12 + r - H (r_1 + r_2)) / (H - 1)`` per face, shape (n1-1, n2-1, d)."""
    h = H[:-1, :-1, None]
    return (r[1:, 1:] + r[:-1, :-1] - h * (r[1:, :-1] + r[:-1, 1:])) / (h - 1)


def affine_spheres(
    lattice: DemoulinLattice, frames: np.ndarray, chart: int = 3, tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, dict[str, float]]:
    """Discrete affine sphere from a scaled frame grid.

    The points ``r^`` (frame row 0) are divided by the chart coordinate, the
    conserved vector ``c`` is checked to be face constant and the translation
    ``-c/c[chart]`` is applied, after which the three affine Gauss-Weingarten
    equations hold.

    Returns
    -------
    ra : numpy.ndarray, shape (n1, n2, 3)
    report : dict
        ``c_deviation`` and the residuals ``affine_1``, ``affine_2``, ``affine_3``.

    Raises
    ------
    AffineChartFailure
        If the chart coordinate of some point (or of c) vanishes.
    NonConstantC
        If c varies over the faces by more than ``tol``.
    """
    r = np.asarray(frames, dtype=float)[..., 0, :]
    H = lattice.H
    t = r[..., chart]
    bad = np.argwhere(np.abs(t) <= GUARD * np.linalg.norm(r, axis=-1))
    if bad.size:
        raise AffineChartFailure(f"chart coordinate {chart} vanishes", tuple(int(x) for x in bad[0]))
    keep = [k for k in range(4) if k != chart]
    c = conserved_vector(H, r)
    dev = 0.0
    if c.size:
        c0 = c[0, 0]
        dev = float(np.max(np.linalg.norm(c - c0, axis=-1)) / np.linalg.norm(c0))
        if dev > tol:
            raise NonConstantC(f"conserved vector varies by {dev:.3g}")
        if abs(c0[chart]) <= GUARD * np.linalg.norm(c0):
            raise AffineChartFailure("chart coordinate of the conserved vector vanishes")
        shift = c0[keep] / c0[chart]
    else:
        shift = np.zeros(3)
    ra = r[..., keep] / t[..., None] - shift
    e1, e3 = second_order_residuals(lattice, ra)
    e2 = np.zeros((0,))
    if ra.shape[0] > 1 and ra.shape[1] > 1:
        h = H[:-1, :-1, None]
        lhs = ra[1:, 1:] + ra[:-1, :-1]
        rhs = h * (ra[1:, :-1] + ra[:-1, 1:])
        scale = np.linalg.norm(lhs, axis=-1) + np.linalg.norm(rhs, axis=-1)
        e2 = _rel(lhs, rhs, scale)
    report = {"c_deviation": dev, "affine_1": _nanmax(e1), "affine_2": _nanmax(e2), "affine_3": _nanmax(e3)}
    return ra, report


# -- tau functions ---------------------------------------------------------------------


@dataclass
class TauField:
    """tau on a grid with first integrals ``s`` (over n1) and ``s_bar`` (over n2)."""

    tau: np.ndarray
    s: np.ndarray
    s_bar: np.ndarray


def _check_tau(tau: np.ndarray) -> None:
    with np.errstate(invalid="ignore"):
        bad = np.argwhere(~np.isfinite(tau) | (tau == 0))
    if bad.size:
        raise ZeroTau("tau vanished or overflowed", tuple(int(x) for x in bad[0]))


def tau_from_solution(
    lattice: DemoulinLattice, tau00: float, tau10: float, tau01: float, s=1.0, s_bar=1.0, tol: float = DEFAULT_TOL
) -> TauField:
    """tau with ``tau_11 = s tau_1^2/(tau A)``, ``tau_12 = tau_1 tau_2/(tau H)``, ``tau_22 = s_bar tau_2^2/(tau Q)``.

    For an n1 x n2 lattice tau is defined on the (n1+1) x (n2+1) grid.

    Row ``n2 = 0`` is filled by the first recurrence, column ``n1 = 0`` by the
    last and the interior by the mixed one; the first and last recurrences
    are then checked everywhere else.

    Raises
    ------
    ZeroTau
        A seed or a computed value vanishes.
    InconsistentRecurrences
        The unused recurrences fail by more than ``tol``.
    """
    H, A, Q = lattice.H, lattice.A, lattice.Q
    n1, n2 = H.shape
    s = np.broadcast_to(np.asarray(s, dtype=float), (n1,))
    sb = np.broadcast_to(np.asarray(s_bar, dtype=float), (n2,))
    if min(abs(tau00), abs(tau10), abs(tau01)) < GUARD:
        raise ZeroTau("tau seeds must be nonzero")
    tau = np.full((n1 + 1, n2 + 1), np.nan)
    tau[0, 0], tau[1, 0], tau[0, 1] = tau00, tau10, tau01
    for i in range(n1 - 1):
        tau[i + 2, 0] = s[i] * tau[i + 1, 0] ** 2 / (tau[i, 0] * A[i, 0])
    for j in range(n2 - 1):
        tau[0, j + 2] = sb[j] * tau[0, j + 1] ** 2 / (tau[0, j] * Q[0, j])
    for j in range(n2):
        for i in range(n1):
            tau[i + 1, j + 1] = tau[i + 1, j] * tau[i, j + 1] / (tau[i, j] * H[i, j])
    _check_tau(tau)
    r11 = tau[2:, :-1] - s[: n1 - 1, None] * tau[1:-1, :-1] ** 2 / (tau[:-2, :-1] * A[: n1 - 1])
    r22 = tau[:-1, 2:] - sb[None, : n2 - 1] * tau[:-1, 1:-1] ** 2 / (tau[:-1, :-2] * Q[:, : n2 - 1])
    err = max(
        _nanmax(np.abs(r11) / np.abs(tau[2:, :-1])),
        _nanmax(np.abs(r22) / np.abs(tau[:-1, 2:])),
    )
    if not err <= tol:
        raise InconsistentRecurrences(f"tau recurrences disagree by {err:.3g}")
    return TauField(tau, np.array(s), np.array(sb))


def recover_from_tau(field: TauField) -> dict[str, np.ndarray]:
    """``H``, ``A``, ``Q`` from tau via the three recurrences.

    tau lives on an (n1+1) x (n2+1) grid and the output on n1 x n2; entries
    without a complete stencil are NaN.
    """
    t, s, sb = field.tau, field.s, field.s_bar
    n1, n2 = t.shape[0] - 1, t.shape[1] - 1
    H = t[1:, :-1] * t[:-1, 1:] / (t[1:, 1:] * t[:-1, :-1])
    A = np.full((n1, n2), np.nan)
    Q = A.copy()
    A[: n1 - 1] = s[: n1 - 1, None] * t[1:-1, :n2] ** 2 / (t[2:, :n2] * t[:-2, :n2])
    Q[:, : n2 - 1] = sb[None, : n2 - 1] * t[:n1, 1:-1] ** 2 / (t[:n1, 2:] * t[:n1, :-2])
    return {"H": H, "A": A, "Q": Q}


def _det3(m: np.ndarray) -> np.ndarray:
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 1])
        - m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] - m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] - m[..., 1, 1] * m[..., 2, 0])
    )


def _perm3(m: np.ndarray) -> np.ndarray:
    """Sum of the absolute values of the six determinant products."""
    m = np.abs(m)
    return (
        m[..., 0, 0] * (m[..., 1, 1] * m[..., 2, 2] + m[..., 1, 2] * m[..., 2, 1])
        + m[..., 0, 1] * (m[..., 1, 0] * m[..., 2, 2] + m[..., 1, 2] * m[..., 2, 0])
        + m[..., 0, 2] * (m[..., 1, 0] * m[..., 2, 1] + m[..., 1, 1] * m[..., 2, 0])
    )


def stencil3(t: np.ndarray) -> np.ndarray:
    """3x3 stencils ``[[t, t1, t11], [t2, t12, t112], [t22, t122, t1122]]``, shape (n1-2, n2-2, 3, 3)."""
    n1, n2 = t.shape
    rows = [[t[a : n1 - 2 + a, b : n2 - 2 + b] for a in range(3)] for b in range(3)]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def tau_identity_residual(field: TauField, normalize: str = "cube") -> np.ndarray:
    """Residual of ``det(stencil3) + s s_bar tau_12^3 = 0``.

    ``normalize="cube"`` divides by ``|tau_12|^3``; ``"terms"`` by the sum of
    the magnitudes of all terms, which stays meaningful when tau grows fast.
    """
    t = field.tau
    m = stencil3(t)
    if m.size == 0:
        return np.zeros((0, 0))
    ss = field.s[: m.shape[0], None] * field.s_bar[None, : m.shape[1]]
    t12 = t[1:-1, 1:-1]
    res = _det3(m) + ss * t12**3
    if normalize == "cube":
        return np.abs(res) / np.abs(t12) ** 3
    return np.abs(res) / (_perm3(m) + np.abs(ss * t12**3))


def tau_layer_canonical(
    states: GmcLattice, tau10: float = 1.0, tol: float = DEFAULT_TOL
) -> tuple[TauField, dict[str, float]]:
    """tau potential of a Tzitzeica lattice in canonical GMC form.

    tau is fixed by ``g/b = tau_12/tau_1`` and ``g_bar/b_bar = tau_12/tau_2`` up
    to a global scale, given here by ``tau(1, 0)``; ``tau(0, 0)`` then follows
    from ``tau_11 + alpha (f tau_1 + alpha tau) = 0`` at the origin.  The
    first integrals are evaluated at every site.

    Returns
    -------
    field : TauField
        tau on the (n1+1) x (n2+1) grid; ``s`` and ``s_bar`` taken along the
        axes.
    report : dict
        ``gb_constraint``, ``tau_potential``, ``tau_linear`` residuals and the deviations ``s_dev``,
        ``s_bar_dev`` of the first integrals from constancy.

    Raises
    ------
    NotTzitzeica
        If the lattice is not of Demoulin class or violates the constraint
        on ``g/b`` and ``g_bar/b_bar``.
    """
    if classify(states, tol) not in (MinimalClass.DEMOULIN, MinimalClass.TZITZEICA):
        raise NotTzitzeica("lattice is not of Demoulin class")
    gb_constraint = _nanmax(tzitzeica_constraint_residual(states))
    if gb_constraint > tol:
        raise NotTzitzeica(f"g/b constraint residual {gb_constraint:.3g}")
    m1, m2 = states.shape
    if m1 < 2 or m2 < 1:
        raise DimensionMismatch("need at least 2 x 1 sites")
    p = states.g / states.b
    q = states.g_bar / states.b_bar
    tau = np.full((m1 + 1, m2 + 1), np.nan)
    tau[1, 0] = tau10
    for i in range(1, m1):
        tau[i + 1, 0] = tau[i, 0] * p[i - 1, 0] * q[i, 0] / p[i, 0]
    for j in range(m2):
        tau[1:, j + 1] = tau[1:, j] * p[:, j]
        tau[0, j + 1] = tau[1, j + 1] / q[0, j]
    al, f = states.alpha, states.f
    tau[0, 0] = -(tau[2, 0] + al[0, 0] * f[0, 0] * tau[1, 0]) / al[0, 0] ** 2
    _check_tau(tau)

    tau_potential = np.abs(tau[1:, 1:] - tau[:-1, 1:] * q) / np.abs(tau[1:, 1:])
    alb, fb = states.alpha_bar, states.f_bar
    r1 = tau[2:, :-1] + al[:-1] * (f[:-1] * tau[1:-1, :-1] + al[:-1] * tau[:-2, :-1])
    r1 /= np.abs(tau[2:, :-1]) + np.abs(al[:-1] * f[:-1] * tau[1:-1, :-1]) + np.abs(al[:-1] ** 2 * tau[:-2, :-1])
    r2 = tau[:-1, 2:] + alb[:, :-1] * (fb[:, :-1] * tau[:-1, 1:-1] + alb[:, :-1] * tau[:-1, :-2])
    r2 /= np.abs(tau[:-1, 2:]) + np.abs(alb[:, :-1] * fb[:, :-1] * tau[:-1, 1:-1]) + np.abs(alb[:, :-1] ** 2 * tau[:-1, :-2])

    s = states.alpha * states.g * (tau[:-1, 1:] / tau[1:, 1:] - tau[:-1, :-1] / tau[1:, :-1])
    sb = states.alpha_bar * states.g_bar * (tau[1:, :-1] / tau[1:, 1:] - tau[:-1, :-1] / tau[:-1, 1:])
    s_dev = float(np.max(np.abs(s - s[:, :1])) / np.max(np.abs(s)))
    sb_dev = float(np.max(np.abs(sb - sb[:1, :])) / np.max(np.abs(sb)))
    report = {
        "gb_constraint": gb_constraint,
        "tau_potential": _nanmax(tau_potential),
        "tau_linear": max(_nanmax(np.abs(r1)), _nanmax(np.abs(r2))),
        "s_dev": s_dev,
        "s_bar_dev": sb_dev,
    }
    s_full = np.append(s[:, 0], np.nan)
    sb_full = np.append(sb[0, :], np.nan)
    return TauField(tau, s_full, sb_full), report
