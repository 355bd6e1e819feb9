"""Discrete Demoulin system, Wilczynski frames and the gauge to the canonical frame.

A Demoulin lattice stores ``H, K, A, Q`` on an ``n1 x n2`` grid.  ``A`` is
propagated in the n2-direction from the axis ``n2 = 0`` and ``Q`` in the
n1-direction from ``n1 = 0``; entries that cannot be reached by a full
stencil are NaN (``A`` on the last row ``n1 = n1_max`` off the axis, ``Q`` on
the last column ``n2 = n2_max`` off the axis).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    DenominatorBlowup,
    DimensionMismatch,
    NegativeRadicand,
    PathInconsistency,
    SignObstruction,
    ZeroKappa,
)
from .gmc import FIELDS, GmcLattice, L_matrix, M_matrix
from .lattice import DEFAULT_TOL, GUARD

DEM_FIELDS = ("H", "K", "A", "Q")


@dataclass
class DemoulinLattice:
    """``H, K, A, Q`` arrays of shape (n1, n2)."""

    H: np.ndarray
    K: np.ndarray
    A: np.ndarray
    Q: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.H.shape

    def fields(self) -> dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in DEM_FIELDS}

    @classmethod
    def from_fields(cls, fields: dict[str, np.ndarray]) -> "DemoulinLattice":
        arrs = [np.asarray(fields[name], dtype=float) for name in DEM_FIELDS]
        if len({a.shape for a in arrs}) != 1 or arrs[0].ndim != 2:
            raise DimensionMismatch("H, K, A, Q must be 2-d arrays of one shape")
        return cls(*arrs)

    @classmethod
    def constant(cls, n1: int, n2: int, h: float, k: float, a: float, q: float) -> "DemoulinLattice":
        return cls(*(np.full((n1, n2), float(v)) for v in (h, k, a, q)))

    def scaled(self, lam: float) -> "DemoulinLattice":
        """The symmetry ``A -> lam A``, ``Q -> Q / lam``."""
        return DemoulinLattice(self.H, self.K, lam * self.A, self.Q / lam)


def _nonzero(value: float, name: str, site=None) -> float:
    if not np.isfinite(value) or abs(value) < GUARD:
        raise DenominatorBlowup(f"denominator {name} = {value:.3g}", site)
    return value


def dem_step(H, H1, H2, K, K1, K2, A, Q, site=None) -> tuple[float, float, float, float]:
    """One face of the discrete Demoulin system.

    Returns
    -------
    (H12, K12, A2, Q1)
    """
    for v, name in ((H - 1, "H-1"), (K - 1, "K-1"), (H1 - 1, "H1-1"), (K2 - 1, "K2-1"), (H, "H"), (K, "K")):
        _nonzero(v, name, site)
    den_h = K * (H * (H1 - 1) * (H2 - 1) - (H - 1)) * (K2 - 1) - A * Q * H1 * K2 * (H2 - 1)
    den_k = H * (K * (K1 - 1) * (K2 - 1) - (K - 1)) * (H1 - 1) - A * Q * H1 * K2 * (K1 - 1)
    _nonzero(den_h, "of H12", site)
    _nonzero(den_k, "of K12", site)
    H12 = -K * (H - 1) * (K2 - 1) / den_h
    K12 = -H * (K - 1) * (H1 - 1) / den_k
    return H12, K12, H1 / K * A, K2 / H * Q


def dem_evolve(H_row, K_row, H_col, K_col, A_row, Q_col, tol: float = DEFAULT_TOL) -> DemoulinLattice:
    """Sweep the Demoulin system from Cauchy data.

    Parameters
    ----------
    H_row, K_row, A_row : array_like, shape (n1,)
        Values along ``n2 = 0``.
    H_col, K_col, Q_col : array_like, shape (n2,)
        Values along ``n1 = 0``; the entries at the origin must agree with the
        row data.
    """
    H_row, K_row, A_row = (np.asarray(x, dtype=float).ravel() for x in (H_row, K_row, A_row))
    H_col, K_col, Q_col = (np.asarray(x, dtype=float).ravel() for x in (H_col, K_col, Q_col))
    n1, n2 = H_row.size, H_col.size
    if n1 < 1 or n2 < 1 or K_row.size != n1 or A_row.size != n1 or K_col.size != n2 or Q_col.size != n2:
        raise DimensionMismatch("row data must have length n1 and column data length n2")
    for a, b, name in ((H_row[0], H_col[0], "H"), (K_row[0], K_col[0], "K")):
        if abs(a - b) > tol * max(abs(a), abs(b)):
            raise DimensionMismatch(f"{name} at the origin differs between row and column data")
    H = np.full((n1, n2), np.nan)
    K, A, Q = H.copy(), H.copy(), H.copy()
    H[:, 0], K[:, 0], A[:, 0] = H_row, K_row, A_row
    H[0, :], K[0, :], Q[0, :] = H_col, K_col, Q_col
    for j in range(n2 - 1):
        for i in range(n1 - 1):
            H[i + 1, j + 1], K[i + 1, j + 1], A[i, j + 1], Q[i + 1, j] = dem_step(
                H[i, j], H[i + 1, j], H[i, j + 1], K[i, j], K[i + 1, j], K[i, j + 1], A[i, j], Q[i, j], (i, j)
            )
    return DemoulinLattice(H, K, A, Q)


def dem_residuals(lattice: DemoulinLattice) -> dict[str, np.ndarray]:
    """Relative residuals of the four face equations, arrays of shape (n1-1, n2-1).

    The H- and K-equations are checked in polynomial form (numerator minus
    H12 times denominator) normalized by the magnitude of the terms.
    """
    H, K, A, Q = lattice.H, lattice.K, lattice.A, lattice.Q
    h, h1, h2, h12 = H[:-1, :-1], H[1:, :-1], H[:-1, 1:], H[1:, 1:]
    k, k1, k2, k12 = K[:-1, :-1], K[1:, :-1], K[:-1, 1:], K[1:, 1:]
    a, a2, q, q1 = A[:-1, :-1], A[:-1, 1:], Q[:-1, :-1], Q[1:, :-1]
    aq = a * q * h1 * k2
    t1 = h12 * k * h * (h1 - 1) * (h2 - 1) * (k2 - 1)
    t2 = h12 * k * (h - 1) * (k2 - 1)
    t3 = h12 * aq * (h2 - 1)
    t4 = k * (h - 1) * (k2 - 1)
    rh = np.abs(t1 - t2 - t3 + t4) / (np.abs(t1) + np.abs(t2) + np.abs(t3) + np.abs(t4))
    s1 = k12 * h * k * (k1 - 1) * (k2 - 1) * (h1 - 1)
    s2 = k12 * h * (k - 1) * (h1 - 1)
    s3 = k12 * aq * (k1 - 1)
    s4 = h * (k - 1) * (h1 - 1)
    rk = np.abs(s1 - s2 - s3 + s4) / (np.abs(s1) + np.abs(s2) + np.abs(s3) + np.abs(s4))
    ra = np.abs(a2 * k - h1 * a) / np.maximum(np.abs(a2 * k) + np.abs(h1 * a), GUARD)
    rq = np.abs(q1 * h - k2 * q) / np.maximum(np.abs(q1 * h) + np.abs(k2 * q), GUARD)
    return {"H12": rh, "K12": rk, "A2": ra, "Q1": rq}


# -- Wilczynski frame ---------------------------------------------------------------


def chi_fields(lattice: DemoulinLattice, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Signed square roots chi (shape (n1-1, n2)) and chi_bar (shape (n1, n2-1)).

    chi_bar is taken positive and chi positive along ``n2 = 0``; the sign of
    chi on the remaining rows follows from ``chi_2 chi_bar H = chi_bar_1 chi K``
    face by face.

    Raises
    ------
    NegativeRadicand
        If either radicand is negative somewhere (complex chi is not supported).
    SignObstruction
        If the magnitudes are inconsistent at a face, i.e. the lattice does
        not satisfy the Demoulin system there.
    """
    H, K = lattice.H, lattice.K
    c2 = (1 - H[:-1]) * H[1:] / ((1 - H[1:]) * K[:-1])
    cb2 = (1 - K[:, :-1]) * K[:, 1:] / ((1 - K[:, 1:]) * H[:, :-1])
    for r, name in ((c2, "chi^2"), (cb2, "chi_bar^2")):
        bad = np.argwhere(r < 0)
        if bad.size:
            i, j = (int(x) for x in bad[0])
            raise NegativeRadicand(f"{name} = {r[i, j]:.6g} < 0", (i, j))
    chi, chib = np.sqrt(c2), np.sqrt(cb2)
    n1, n2 = H.shape
    for j in range(n2 - 1):
        for i in range(n1 - 1):
            rhs = chib[i + 1, j] * chi[i, j] * K[i, j]
            lhs = chi[i, j + 1] * chib[i, j] * H[i, j]
            if abs(abs(lhs) - abs(rhs)) > tol * abs(rhs):
                raise SignObstruction(f"|chi_2 chi_bar H| = {abs(lhs):.6g} != {abs(rhs):.6g}", (i, j))
            if np.sign(lhs) != np.sign(rhs):
                chi[i, j + 1] = -chi[i, j + 1]
    return chi, chib


def chi_relation_residual(lattice: DemoulinLattice, chi: np.ndarray, chib: np.ndarray) -> np.ndarray:
    """``|chi_2 chi_bar H - chi_bar_1 chi K|`` relative, shape (n1-1, n2-1)."""
    H, K = lattice.H[:-1, :-1], lattice.K[:-1, :-1]
    lhs = chi[:, 1:] * chib[:-1] * H
    rhs = chib[1:] * chi[:, :-1] * K
    return np.abs(lhs - rhs) / np.abs(rhs)


def wilczynski_matrices(
    lattice: DemoulinLattice, chi: np.ndarray, chib: np.ndarray, lam: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Transition matrices of the Wilczynski frame.

    Returns ``Lt`` of shape (n1-1, n2, 4, 4) and ``Mt`` of shape (n1, n2-1, 4, 4)
    acting as ``F(n1+1, n2) = Lt F`` and ``F(n1, n2+1) = Mt F``.  ``lam``
    applies the scaling ``A -> lam A``, ``Q -> Q / lam``.
    """
    H, K, A, Q = lattice.H, lattice.K, lam * lattice.A, lattice.Q / lam
    h, h1, k, a = H[:-1], H[1:], K[:-1], A[:-1]
    L = np.zeros(h.shape + (4, 4))
    c = (h1 - 1) / (h1 * (h - 1))
    L[..., 0, 0] = L[..., 0, 1] = 1
    L[..., 1, 0] = a
    L[..., 1, 1] = a + c
    L[..., 1, 2] = L[..., 1, 3] = a * k / (k - 1)
    L[..., 2, 0] = L[..., 2, 1] = k - 1
    L[..., 2, 2] = L[..., 2, 3] = k
    L[..., 3, 1] = c * (k - 1)
    L[..., 3, 3] = c * k
    L *= chi[..., None, None]
    h, k, k2, q = H[:, :-1], K[:, :-1], K[:, 1:], Q[:, :-1]
    M = np.zeros(h.shape + (4, 4))
    d = (k2 - 1) / (k2 * (k - 1))
    M[..., 0, 0] = M[..., 0, 2] = 1
    M[..., 1, 0] = M[..., 1, 2] = h - 1
    M[..., 1, 1] = M[..., 1, 3] = h
    M[..., 2, 0] = q
    M[..., 2, 1] = M[..., 2, 3] = q * h / (h - 1)
    M[..., 2, 2] = q + d
    M[..., 3, 2] = d * (h - 1)
    M[..., 3, 3] = d * h
    M *= chib[..., None, None]
    return L, M


def face_residual(L: np.ndarray, M: np.ndarray) -> np.ndarray:
    """``||M_1 L - L_2 M|| / ||M_1 L||`` per face for transition grids as above."""
    n1, n2 = L.shape[0], M.shape[1]
    a = M[1:, :n2] @ L[:, :n2]
    b = L[:, 1:] @ M[:n1, :]
    return np.linalg.norm(a - b, axis=(-1, -2)) / np.linalg.norm(a, axis=(-1, -2))


def wilczynski_frames(
    lattice: DemoulinLattice, seed=None, lam: float = 1.0, tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Frame grid ``F~`` of shape (n1, n2, 4, 4) and the face residual (n1-1, n2-1).

    The frame is propagated along ``n1 = 0`` with ``Mt`` and then along each
    row with ``Lt``; the residual compares both transition orders around
    each face.
    """
    chi, chib = chi_fields(lattice, tol)
    L, M = wilczynski_matrices(lattice, chi, chib, lam)
    n1, n2 = lattice.shape
    F = np.zeros((n1, n2, 4, 4))
    F[0, 0] = np.eye(4) if seed is None else np.asarray(seed, dtype=float)
    for j in range(1, n2):
        F[0, j] = M[0, j - 1] @ F[0, j - 1]
    for i in range(1, n1):
        F[i] = L[i - 1] @ F[i - 1]
    return F, face_residual(L, M)


# -- gauge to the canonical frame -------------------------------------------------------


@dataclass
class GaugeField:
    """``kappa`` and ``xi`` on the grid; ``kappa_bar = 1 / kappa``."""

    kappa: np.ndarray
    xi: np.ndarray

    @property
    def kappa_bar(self) -> np.ndarray:
        return 1.0 / self.kappa


def gauge_matrix(xi, kappa) -> np.ndarray:
    """The lower-triangular gauge G with ``F~ = G F``."""
    xi, kappa = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(kappa, dtype=float))
    G = np.zeros(xi.shape + (4, 4))
    G[..., 0, 0] = xi
    G[..., 1, 0] = G[..., 2, 0] = -xi
    G[..., 3, 0] = xi
    G[..., 1, 1] = kappa
    G[..., 3, 1] = -kappa
    G[..., 2, 2] = 1 / kappa
    G[..., 3, 2] = -1 / kappa
    G[..., 3, 3] = 1 / xi
    return G


def extend_kappa(lattice: DemoulinLattice, kappa_row=None, kappa_col=None) -> np.ndarray:
    """Extend kappa from the axes by the compatibility of the xi-system.

    The face equation is ``kappa_12^2 = kappa_1^2 kappa_2^2 K H_1 / (kappa^2 H K_2)``;
    the root with the sign of ``kappa_1 kappa_2 / kappa`` is taken.
    """
    H, K = lattice.H, lattice.K
    n1, n2 = H.shape
    ka = np.full((n1, n2), np.nan)
    ka[:, 0] = 1.0 if kappa_row is None else np.asarray(kappa_row, dtype=float)
    ka[0, :] = 1.0 if kappa_col is None else np.asarray(kappa_col, dtype=float)
    bad = np.argwhere(np.abs(np.concatenate([ka[:, 0], ka[0, :]])) < GUARD)
    if bad.size:
        raise ZeroKappa("kappa must be nonzero on the axes")
    for j in range(n2 - 1):
        for i in range(n1 - 1):
            r = K[i, j] * H[i + 1, j] / (H[i, j] * K[i, j + 1])
            if r < 0:
                raise NegativeRadicand(f"kappa face radicand {r:.6g} < 0", (i, j))
            ka[i + 1, j + 1] = ka[i + 1, j] * ka[i, j + 1] / ka[i, j] * np.sqrt(r)
            if abs(ka[i + 1, j + 1]) < GUARD:
                raise ZeroKappa("kappa vanished", (i + 1, j + 1))
    return ka


def integrate_xi(lattice: DemoulinLattice, kappa: np.ndarray, xi0: float = 1.0) -> tuple[np.ndarray, float]:
    """Integrate ``xi_1 = kappa xi/(kappa_1 K)``, ``xi_2 = kappa_2 xi/(kappa H)``.

    Returns xi and the largest relative mismatch of the n1-relation off the
    integration path.
    """
    H, K = lattice.H, lattice.K
    n1, n2 = H.shape
    xi = np.full((n1, n2), np.nan)
    xi[0, 0] = xi0
    for i in range(n1 - 1):
        xi[i + 1, 0] = kappa[i, 0] * xi[i, 0] / (kappa[i + 1, 0] * K[i, 0])
    for j in range(n2 - 1):
        xi[:, j + 1] = kappa[:, j + 1] * xi[:, j] / (kappa[:, j] * H[:, j])
    pred = kappa[:-1] * xi[:-1] / (kappa[1:] * K[:-1])
    err = float(np.max(np.abs(xi[1:] - pred) / np.abs(xi[1:]))) if n1 > 1 else 0.0
    return xi, err


def canonical_states(
    lattice: DemoulinLattice, chi: np.ndarray, chib: np.ndarray, gauge: GaugeField
) -> GmcLattice:
    """GMC data of the gauged frame on the (n1-1) x (n2-1) grid of complete stencils."""
    H, K, A, Q = lattice.H, lattice.K, lattice.A, lattice.Q
    ka, xi = gauge.kappa, gauge.xi
    kb = 1.0 / ka
    s = np.s_[:-1, :-1]
    h, k, a_, q_, X = H[s], K[s], A[s], Q[s], xi[s]
    h1, k2 = H[1:, :-1], K[:-1, 1:]
    c, cb = chi[:, :-1], chib[:-1, :]
    k_, k1 = ka[s], ka[1:, :-1]
    kb_, kb2 = kb[s], kb[:-1, 1:]
    vals = np.empty(h.shape + (10,))
    vals[..., FIELDS.index("alpha")] = X / (c * k1 * k)
    vals[..., FIELDS.index("a")] = c * X * k_**2 / k1 * a_ / ((1 - k) * k)
    vals[..., FIELDS.index("b")] = c / (X * k1) * a_ * k / (k - 1)
    vals[..., FIELDS.index("f")] = c * k_ / k1 * (1 - h * h1) / ((1 - h) * h1)
    vals[..., FIELDS.index("g")] = c * k_ / k1 * a_ / (1 - k)
    vals[..., FIELDS.index("alpha_bar")] = X / (cb * kb2 * h)
    vals[..., FIELDS.index("a_bar")] = cb * X * kb_**2 / kb2 * q_ / ((1 - h) * h)
    vals[..., FIELDS.index("b_bar")] = cb / (X * kb2) * q_ * h / (h - 1)
    vals[..., FIELDS.index("f_bar")] = cb * kb_ / kb2 * (1 - k * k2) / ((1 - k) * k2)
    vals[..., FIELDS.index("g_bar")] = cb * kb_ / kb2 * q_ / (1 - h)
    alpha = vals[..., 0]
    w = np.full(h.shape, np.nan)
    w[:, :-1] = alpha[:, 1:] / alpha[:, :-1]
    signs = np.unique(np.sign(w[np.isfinite(w)]))
    branch = int(signs[0]) if signs.size == 1 else 0
    return GmcLattice(vals, w, branch=branch)


def gauge_to_canonical(
    lattice: DemoulinLattice,
    kappa_row=None,
    kappa_col=None,
    xi0: float = 1.0,
    tol: float = DEFAULT_TOL,
) -> tuple[GaugeField, GmcLattice, dict[str, float]]:
    """Gauge the Wilczynski frame to the canonical frame.

    Returns
    -------
    gauge : GaugeField
    states : GmcLattice
        Canonical GMC data on the (n1-1) x (n2-1) sites with complete stencils.
    report : dict
        ``xi_path`` (path-independence of xi), ``t_zero`` (max of
        ``|ab+g^2|/(|ab|+g^2)`` and its barred analogue) and ``pattern``
        (largest entry of ``G_1^{-1} L~ G - L`` and ``G_2^{-1} M~ G - M``
        relative to the matrix norm).

    Raises
    ------
    PathInconsistency
        If xi is not path independent to ``tol``.
    """
    chi, chib = chi_fields(lattice, tol)
    ka = extend_kappa(lattice, kappa_row, kappa_col)
    xi, xi_err = integrate_xi(lattice, ka, xi0)
    if xi_err > tol:
        raise PathInconsistency(f"xi integration mismatch {xi_err:.3g}")
    gauge = GaugeField(ka, xi)
    states = canonical_states(lattice, chi, chib, gauge)
    T = np.abs(states.T) / (np.abs(states.a * states.b) + states.g**2)
    Tb = np.abs(states.T_bar) / (np.abs(states.a_bar * states.b_bar) + states.g_bar**2)
    pattern = gauge_pattern_residual(lattice, chi, chib, gauge, states)
    report = {"xi_path": xi_err, "t_zero": float(max(np.max(T), np.max(Tb))), "pattern": pattern}
    return gauge, states, report


def gauge_pattern_residual(
    lattice: DemoulinLattice, chi: np.ndarray, chib: np.ndarray, gauge: GaugeField, states: GmcLattice
) -> float:
    """Largest relative entry of ``G_1^{-1} L~ G - L(states)`` and the M analogue."""
    Lt, Mt = wilczynski_matrices(lattice, chi, chib)
    G = gauge_matrix(gauge.xi, gauge.kappa)
    n1, n2 = states.shape
    Lg = np.linalg.solve(G[1 : n1 + 1, :n2], Lt[:n1, :n2] @ G[:n1, :n2])
    Mg = np.linalg.solve(G[:n1, 1 : n2 + 1], Mt[:n1, :n2] @ G[:n1, :n2])
    s = states
    Lc = L_matrix(s.alpha, s.a, s.b, s.f, s.g)
    Mc = M_matrix(s.alpha_bar, s.a_bar, s.b_bar, s.f_bar, s.g_bar)
    rl = np.max(np.abs(Lg - Lc), axis=(-1, -2)) / np.linalg.norm(Lc, axis=(-1, -2))
    rm = np.max(np.abs(Mg - Mc), axis=(-1, -2)) / np.linalg.norm(Mc, axis=(-1, -2))
    return float(max(np.max(rl), np.max(rm)))


# -- continuum limit -----------------------------------------------------------------


Seed = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _continuum_defect(h: Seed, k: Seed, a: Seed, q: Seed, eps: float) -> dict[str, float]:
    n = int(round(1.0 / eps)) + 1
    x = eps * np.arange(n)
    X, Y = np.meshgrid(x, x, indexing="ij")
    hv, kv, av, qv = h(X, Y), k(X, Y), a(X, Y), q(X, Y)
    H = 1 + eps * eps * hv / 2
    K = 1 + eps * eps * kv / 2
    A = eps**3 * av / 2
    Q = eps**3 * qv / 2
    # forward stencil at (i, j) for 1 <= i, j <= n-2 so centered differences fit
    s = np.s_[1:-1, 1:-1]
    h0, h1, h2, h12 = H[s], H[2:, 1:-1], H[1:-1, 2:], H[2:, 2:]
    k0, k1, k2, k12 = K[s], K[2:, 1:-1], K[1:-1, 2:], K[2:, 2:]
    aq = A[s] * Q[s] * h1 * k2
    den_h = k0 * (h0 * (h1 - 1) * (h2 - 1) - (h0 - 1)) * (k2 - 1) - aq * (h2 - 1)
    den_k = h0 * (k0 * (k1 - 1) * (k2 - 1) - (k0 - 1)) * (h1 - 1) - aq * (k1 - 1)
    scale = eps**8
    disc_h = -8 * (h12 * den_h + k0 * (h0 - 1) * (k2 - 1)) / (scale * hv[s] ** 2 * kv[s])
    disc_k = -8 * (k12 * den_k + h0 * (k0 - 1) * (h1 - 1)) / (scale * kv[s] ** 2 * hv[s])
    disc_a = (A[1:-1, 2:] - h1 * A[s] / k0) / (eps**4 / 2)
    disc_q = (Q[2:, 1:-1] - k2 * Q[s] / h0) / (eps**4 / 2)

    def mixed(f):
        return (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4 * eps * eps)

    src = av[s] * qv[s] / (hv[s] * kv[s])
    cont_h = mixed(np.log(np.abs(hv))) - hv[s] + src
    cont_k = mixed(np.log(np.abs(kv))) - kv[s] + src
    cont_a = (av[1:-1, 2:] - av[1:-1, :-2]) / (2 * eps)
    cont_q = (qv[2:, 1:-1] - qv[:-2, 1:-1]) / (2 * eps)
    out = {
        "h": float(np.max(np.abs(disc_h - cont_h))),
        "k": float(np.max(np.abs(disc_k - cont_k))),
        "a": float(np.max(np.abs(disc_a - cont_a))),
        "q": float(np.max(np.abs(disc_q - cont_q))),
    }
    out["defect"] = max(out.values())
    return out


def continuum_convergence(h: Seed, k: Seed, a: Seed, q: Seed, eps_list=None) -> list[dict[str, float]]:
    """Defect of the discrete Demoulin system against the continuous one.

    For each mesh size ``eps`` (with ``delta = eps``) on ``[0, 1]^2`` the seed is
    sampled into ``H = 1 + eps delta h/2``, ``K = 1 + eps delta k/2``,
    ``A = eps^3 a/2``, ``Q = delta^3 q/2``.  The face equations are rescaled
    so that their leading term is the continuous equation, and compared
    with centered finite differences of the seed.

    Returns
    -------
    list of dict
        One row per mesh with keys ``eps``, ``h``, ``k``, ``a``, ``q``,
        ``defect`` (maximum of the four) and ``order`` (log2 ratio against
        the previous row, NaN for the first).
    """
    if eps_list is None:
        eps_list = [1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]
    rows = []
    for eps in eps_list:
        row = {"eps": float(eps), **_continuum_defect(h, k, a, q, eps)}
        if rows:
            row["order"] = float(np.log(rows[-1]["defect"] / row["defect"]) / np.log(rows[-1]["eps"] / eps))
        else:
            row["order"] = float("nan")
        rows.append(row)
    return rows
