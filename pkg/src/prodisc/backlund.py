"""Pluecker lift, the lambda-dependent linear system and the Baecklund transformation.

The linear system couples two fields ``phi`` and ``psi`` (scalars or 6-vectors)
on a Demoulin lattice through two discrete Moutard equations and four
second-order equations.  Fields have shape ``(n1, n2) + vshape``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .demoulin import DemoulinLattice, dem_residuals
from .errors import (
    ConstraintViolated,
    DenominatorBlowup,
    DimensionMismatch,
    InconsistentRecurrences,
    NoRootInBracket,
    NotApplicable,
    NotConstant,
    OverdeterminedInconsistency,
    PathInconsistency,
    ZeroEigenfunction,
    ZeroLambda,
    ZeroTau,
)
from .lattice import DEFAULT_TOL, GUARD, plucker_form, wedge
from .tzitzeica import _det3, _perm3, stencil3


def _check_den(x: np.ndarray, name: str) -> None:
    bad = np.argwhere(np.isfinite(x) & (np.abs(x) < GUARD))
    if bad.size:
        raise DenominatorBlowup(f"denominator {name} vanishes", tuple(int(v) for v in bad[0]))


def bp_of(lattice: DemoulinLattice) -> tuple[np.ndarray, np.ndarray]:
    """``B`` (NaN on the last column) and ``P`` (NaN on the last row).

    ``B = (H_2-1)(K-1)K_2 / ((H-1)(K_2-1)H_2) Q`` and
    ``P = (H-1)(K_1-1)H_1 / ((H_1-1)(K-1)K_1) A``.
    """
    H, K, A, Q = lattice.H, lattice.K, lattice.A, lattice.Q
    B = np.full(H.shape, np.nan)
    P = B.copy()
    den_b = (H[:, :-1] - 1) * (K[:, 1:] - 1) * H[:, 1:]
    den_p = (H[1:] - 1) * (K[:-1] - 1) * K[1:]
    _check_den(den_b, "of B")
    _check_den(den_p, "of P")
    B[:, :-1] = (H[:, 1:] - 1) * (K[:, :-1] - 1) * K[:, 1:] / den_b * Q[:, :-1]
    P[:-1] = (H[:-1] - 1) * (K[1:] - 1) * H[1:] / den_p * A[:-1]
    return B, P


def bp_relation_residual(lattice: DemoulinLattice, B: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Relative residuals of ``P_2 = (K_1/H) P`` and ``B_1 = (H_2/K) B``, shape (n1-1, n2-1, 2)."""
    H, K = lattice.H[:-1, :-1], lattice.K[:-1, :-1]
    k1, h2 = lattice.K[1:, :-1], lattice.H[:-1, 1:]
    p, p2 = P[:-1, :-1], P[:-1, 1:]
    b, b1 = B[:-1, :-1], B[1:, :-1]
    rp = np.abs(p2 * H - k1 * p) / np.maximum(np.abs(p2 * H) + np.abs(k1 * p), GUARD)
    rb = np.abs(b1 * K - h2 * b) / np.maximum(np.abs(b1 * K) + np.abs(h2 * b), GUARD)
    return np.stack([rp, rb], axis=-1)


@dataclass
class LinearCoefficients:
    """Per-site coefficients of the linear system at a given lambda."""

    c11_phi: np.ndarray
    c11_psi: np.ndarray
    c22_phi: np.ndarray
    c22_psi: np.ndarray
    x_phi1: np.ndarray
    x_psi1: np.ndarray
    x_phi2: np.ndarray
    x_psi2: np.ndarray
    H: np.ndarray
    K: np.ndarray


def linear_coefficients(lattice: DemoulinLattice, lam: float, B=None, P=None) -> LinearCoefficients:
    """Coefficients with NaN where the stencil is incomplete."""
    if lam == 0:
        raise ZeroLambda("lambda must be nonzero")
    H, K, A, Q = lattice.H, lattice.K, lattice.A, lattice.Q
    if B is None or P is None:
        B, P = bp_of(lattice)
    for x, name in ((H - 1, "H-1"), (K - 1, "K-1"), (H, "H"), (K, "K")):
        _check_den(x, name)
    n1, n2 = H.shape
    nan = np.full((n1, n2), np.nan)
    c11p, c11s, c22p, c22s = nan.copy(), nan.copy(), nan.copy(), nan.copy()
    c11p[:-1] = (1 - H[1:]) / ((1 - H[:-1]) * H[1:])
    c11s[:-1] = (1 - K[1:]) / ((1 - K[:-1]) * K[1:])
    c22p[:, :-1] = (1 - H[:, 1:]) / ((1 - H[:, :-1]) * H[:, 1:])
    c22s[:, :-1] = (1 - K[:, 1:]) / ((1 - K[:, :-1]) * K[:, 1:])
    return LinearCoefficients(
        c11p, c11s, c22p, c22s,
        lam * A / (K - 1), lam * P / (H - 1),
        B / (lam * (K - 1)), Q / (lam * (H - 1)),
        H, K,
    )


def _ex(c: np.ndarray, v: np.ndarray) -> np.ndarray:
    return c.reshape(c.shape + (1,) * (v.ndim - c.ndim))


def linear_propagate(
    lattice: DemoulinLattice, lam: float, seeds, B=None, P=None, check: bool = True, tol: float = DEFAULT_TOL
) -> tuple[np.ndarray, np.ndarray]:
    """Solve the linear system from values at (0,0), (1,0) and (0,1).

    Parameters
    ----------
    seeds : array_like, shape (3, 2) + vshape
        ``seeds[k] = (phi, psi)`` at the sites (0,0), (1,0), (0,1).

    Rows ``n2 = 0, 1`` are filled together (second-order n1-equation on
    ``n2 = 0``, Moutard equations on ``n2 = 1``), then columns ``n1 = 0, 1``,
    then the interior by the Moutard equations.  With ``check`` the unused
    equations are verified.

    Raises
    ------
    OverdeterminedInconsistency
        If ``check`` and a residual exceeds ``tol``.
    """
    co = linear_coefficients(lattice, lam, B, P)
    seeds = np.asarray(seeds, dtype=float)
    if seeds.shape[:2] != (3, 2):
        raise DimensionMismatch("seeds must have shape (3, 2) + vshape")
    n1, n2 = lattice.shape
    if n1 < 2 or n2 < 2:
        raise DimensionMismatch("need at least a 2 x 2 grid")
    vshape = seeds.shape[2:]
    ph = np.full((n1, n2) + vshape, np.nan)
    ps = ph.copy()
    (ph[0, 0], ps[0, 0]), (ph[1, 0], ps[1, 0]), (ph[0, 1], ps[0, 1]) = seeds
    H, K = co.H, co.K

    def moutard(F, G, i, j):
        return -F[i, j] + G[i, j] * (F[i + 1, j] + F[i, j + 1])

    for i in range(n1 - 1):
        ph[i + 1, 1], ps[i + 1, 1] = moutard(ph, H, i, 0), moutard(ps, K, i, 0)
        if i + 2 < n1:
            ph[i + 2, 0] = ph[i + 1, 0] + co.c11_phi[i, 0] * (ph[i + 1, 0] - ph[i, 0]) + co.x_phi1[i, 0] * (
                ps[i + 1, 1] - ps[i + 1, 0]
            )
            ps[i + 2, 0] = ps[i + 1, 0] + co.c11_psi[i, 0] * (ps[i + 1, 0] - ps[i, 0]) + co.x_psi1[i, 0] * (
                ph[i + 1, 1] - ph[i + 1, 0]
            )
    for j in range(n2 - 2):
        ph[0, j + 2] = ph[0, j + 1] + co.c22_phi[0, j] * (ph[0, j + 1] - ph[0, j]) + co.x_phi2[0, j] * (
            ps[1, j + 1] - ps[0, j + 1]
        )
        ps[0, j + 2] = ps[0, j + 1] + co.c22_psi[0, j] * (ps[0, j + 1] - ps[0, j]) + co.x_psi2[0, j] * (
            ph[1, j + 1] - ph[0, j + 1]
        )
        ph[1, j + 2], ps[1, j + 2] = moutard(ph, H, 0, j + 1), moutard(ps, K, 0, j + 1)
    for j in range(1, n2 - 1):
        for i in range(1, n1 - 1):
            ph[i + 1, j + 1], ps[i + 1, j + 1] = moutard(ph, H, i, j), moutard(ps, K, i, j)
    if check:
        res = linear_residuals(lattice, lam, ph, ps, B, P)
        worst = max(_max(r) for r in res.values())
        if worst > tol:
            raise OverdeterminedInconsistency(f"linear system residual {worst:.3g}")
    return ph, ps


def _max(x: np.ndarray) -> float:
    x = x[np.isfinite(x)]
    return float(np.max(x)) if x.size else 0.0


def _norm(x: np.ndarray, vdims: int) -> np.ndarray:
    if vdims == 0:
        return np.abs(x)
    return np.linalg.norm(x.reshape(x.shape[:2] + (-1,)), axis=-1)


def linear_residuals(lattice: DemoulinLattice, lam: float, phi, psi, B=None, P=None) -> dict[str, np.ndarray]:
    """Relative residuals of the six equations, each normalized by its term magnitudes.

    Keys ``phi11``, ``phi22``, ``phi12``, ``psi11``, ``psi22``, ``psi12``.
    """
    co = linear_coefficients(lattice, lam, B, P)
    phi, psi = np.asarray(phi, dtype=float), np.asarray(psi, dtype=float)
    vd = phi.ndim - 2
    out = {}

    def second(F, G, c, x, axis, name):
        if axis == 1:
            f0, f1, f11, g1, g12 = F[:-2, :-1], F[1:-1, :-1], F[2:, :-1], G[1:-1, :-1], G[1:-1, 1:]
            c, x = c[:-2, :-1], x[:-2, :-1]
        else:
            f0, f1, f11, g1, g12 = F[:-1, :-2], F[:-1, 1:-1], F[:-1, 2:], G[:-1, 1:-1], G[1:, 1:-1]
            c, x = c[:-1, :-2], x[:-1, :-2]
        c, x = _ex(c, f0), _ex(x, f0)
        terms = [f11, f1, c * f1, c * f0, x * g12, x * g1]
        r = f11 - f1 - c * (f1 - f0) - x * (g12 - g1)
        out[name] = _norm(r, vd) / np.maximum(sum(_norm(t, vd) for t in terms), GUARD)

    def moutard(F, G, name):
        g = _ex(G[:-1, :-1], F)
        terms = [F[1:, 1:], F[:-1, :-1], g * F[1:, :-1], g * F[:-1, 1:]]
        r = F[1:, 1:] + F[:-1, :-1] - g * (F[1:, :-1] + F[:-1, 1:])
        out[name] = _norm(r, vd) / np.maximum(sum(_norm(t, vd) for t in terms), GUARD)

    second(phi, psi, co.c11_phi, co.x_phi1, 1, "phi11")
    second(phi, psi, co.c22_phi, co.x_phi2, 2, "phi22")
    moutard(phi, co.H, "phi12")
    second(psi, phi, co.c11_psi, co.x_psi1, 1, "psi11")
    second(psi, phi, co.c22_psi, co.x_psi2, 2, "psi22")
    moutard(psi, co.K, "psi12")
    return out


# -- Pluecker lift ------------------------------------------------------------------------


def wedge_lift(frames: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``phi = (r1^r2 + r^r12)/2`` and ``psi = (r2^r1 + r^r12)/2`` for a frame grid."""
    F = np.asarray(frames, dtype=float)
    r, r1, r2, r12 = (F[..., k, :] for k in range(4))
    x = wedge(r1, r2)
    y = wedge(r, r12)
    return 0.5 * (x + y), 0.5 * (y - x)


def lift_invariants(phi: np.ndarray, psi: np.ndarray) -> dict[str, float]:
    """Quadric relations of a wedge lift.

    ``phi + psi`` and ``phi - psi`` are decomposable, equivalently
    ``<phi, phi> = -<psi, psi>`` and ``<phi, psi> = 0`` for the Pluecker form.
    Values are relative to ``|phi|^2 + |psi|^2``.
    """
    scale = np.sum(phi * phi, axis=-1) + np.sum(psi * psi, axis=-1)
    s = np.abs(plucker_form(phi + psi, phi + psi)) / scale
    d = np.abs(plucker_form(phi - psi, phi - psi)) / scale
    m = np.abs(plucker_form(phi, psi)) / scale
    return {"sum": float(np.max(s)), "difference": float(np.max(d)), "mixed": float(np.max(m))}


# -- plane waves on constant lattices --------------------------------------------------


@dataclass(frozen=True)
class PlaneWave:
    """``phi = rho^n1 sigma^n2`` and ``psi = r phi`` with ``r = +-1``."""

    r: int
    rho: complex
    sigma: complex

    def fields(self, n1: int, n2: int) -> tuple[np.ndarray, np.ndarray]:
        i, j = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
        phi = self.rho**i * self.sigma**j
        return phi, self.r * phi

    @property
    def is_real(self) -> bool:
        return abs(self.rho.imag) <= 1e-12 * abs(self.rho) and abs(self.sigma.imag) <= 1e-12 * abs(self.sigma)


def plane_wave_modes(h: float, a: float, q: float, lam0: float, tol: float = 1e-8) -> list[PlaneWave]:
    """Plane-wave solutions on the constant lattice ``H = K = h``, ``A = a``, ``Q = q``.

    On such a lattice ``B = Q`` and ``P = A`` and the two second-order
    equations for psi force ``psi = +-phi``.  For each sign the Moutard
    equation gives ``sigma = (h rho - 1)/(rho - h)`` and the n1-equation
    becomes a cubic in rho; roots that also satisfy the n2-equation are kept.
    """
    if lam0 == 0:
        raise ZeroLambda("lambda0 must be nonzero")
    if h in (0.0, 1.0):
        raise DenominatorBlowup("h must avoid 0 and 1")
    ca = lam0 * a / (h - 1)
    cq = q / (lam0 * (h - 1))
    out = []
    for r in (1, -1):
        # (rho^2 - rho - (rho - 1)/h)(rho - h) = ca r rho (h - 1)(rho + 1)
        left = np.polymul([1.0, -1.0 - 1.0 / h, 1.0 / h], [1.0, -h])
        right = ca * r * (h - 1) * np.array([0.0, 1.0, 1.0, 0.0])
        for rho in np.roots(np.polysub(left, right)):
            if abs(rho - h) < GUARD:
                continue
            sigma = (h * rho - 1) / (rho - h)
            res = sigma**2 - sigma - (sigma - 1) / h - cq * r * (rho * sigma - sigma)
            if abs(res) <= tol * (abs(sigma) ** 2 + abs(sigma) + 1):
                out.append(PlaneWave(r, complex(rho), complex(sigma)))
    out.sort(key=lambda m: (-m.r, not m.is_real, m.rho.real, m.rho.imag))
    return out


# -- admissibility constraint -------------------------------------------------------------


def _admissibility_terms(lattice: DemoulinLattice, phi, psi, phi_b=None, psi_b=None):
    """Pointwise symmetric bilinear form whose diagonal is the admissibility quantity."""
    H, K = lattice.H[:-1, :-1], lattice.K[:-1, :-1]
    phi_b = phi if phi_b is None else phi_b
    psi_b = psi if psi_b is None else psi_b

    def d(F):
        return F[:-1, :-1], F[1:, :-1] - F[:-1, :-1], F[:-1, 1:] - F[:-1, :-1]

    p, p1, p2 = d(np.asarray(phi, dtype=float))
    pb, pb1, pb2 = d(np.asarray(phi_b, dtype=float))
    s, s1, s2 = d(np.asarray(psi, dtype=float))
    sb, sb1, sb2 = d(np.asarray(psi_b, dtype=float))
    hh, kk = H / (H - 1), K / (K - 1)
    terms = [p * pb, -0.5 * hh * (p1 * pb2 + p2 * pb1), -s * sb, 0.5 * kk * (s1 * sb2 + s2 * sb1)]
    return sum(terms), sum(np.abs(t) for t in terms)


def admissibility_quantity(lattice: DemoulinLattice, phi, psi) -> tuple[np.ndarray, np.ndarray]:
    """``phi^2 - H/(H-1) D1phi D2phi - (psi^2 - K/(K-1) D1psi D2psi)`` and its term scale."""
    return _admissibility_terms(lattice, phi, psi)


def admissibility_constant(lattice: DemoulinLattice, phi, psi, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """Value of the admissibility quantity and its relative spread over the grid.

    The value is taken at the origin relative to the term scale there.  The
    spread is the largest ``|C - C(0,0)|`` relative to the local term scale.

    Raises
    ------
    NotConstant
        If the spread exceeds ``tol``.
    """
    C, scale = admissibility_quantity(lattice, phi, psi)
    spread = float(np.max(np.abs(C - C[0, 0]) / scale))
    if spread > tol:
        raise NotConstant(f"admissibility quantity varies by {spread:.3g}")
    return float(C[0, 0] / scale[0, 0]), spread


def constraint_seed(
    lattice: DemoulinLattice, phi_a, psi_a, phi_b, psi_b, bracket=None, tol: float = DEFAULT_TOL
) -> tuple[float, np.ndarray, np.ndarray]:
    """Choose t so that ``(phi_a + t phi_b, psi_a + t psi_b)`` is admissible.

    The admissibility quantity of the family is a quadratic ``C0 + 2 t C1 + t^2 C2``
    whose coefficients are checked to be grid constants.  With ``bracket``
    the root is found by Brent's method inside it; otherwise the real root of
    smallest magnitude is returned.

    Raises
    ------
    NotConstant
        A coefficient varies over the grid (the inputs are not solutions).
    NoRootInBracket
        No sign change in the bracket, or no real root.
    """
    coef = []
    for x, y in ((phi_a, psi_a), (phi_a, psi_a)), ((phi_a, psi_a), (phi_b, psi_b)), ((phi_b, psi_b), (phi_b, psi_b)):
        C, scale = _admissibility_terms(lattice, x[0], x[1], y[0], y[1])
        coef.append((C, scale))
    total = coef[0][1] + 2 * coef[1][1] + coef[2][1]
    values = []
    for C, _ in coef:
        spread = float(np.max(np.abs(C - C[0, 0]) / total))
        if spread > tol:
            raise NotConstant(f"admissibility coefficient varies by {spread:.3g}")
        values.append(float(C[0, 0] / total[0, 0]))
    c0, c1, c2 = values

    def f(t: float) -> float:
        return c0 + 2 * t * c1 + t * t * c2

    if bracket is not None:
        lo, hi = bracket
        if f(lo) * f(hi) > 0:
            raise NoRootInBracket(f"no sign change on [{lo}, {hi}]")
        t = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    else:
        roots = np.roots([c2, 2 * c1, c0]) if abs(c2) > GUARD else np.array([-c0 / (2 * c1)] if abs(c1) > GUARD else [])
        roots = [r.real for r in np.atleast_1d(roots) if abs(r.imag) <= 1e-12 * max(1.0, abs(r))]
        if not roots:
            raise NoRootInBracket("the admissibility quadratic has no real root")
        t = min(roots, key=abs)
    phi = np.asarray(phi_a, dtype=float) + t * np.asarray(phi_b, dtype=float)
    psi = np.asarray(psi_a, dtype=float) + t * np.asarray(psi_b, dtype=float)
    return float(t), phi, psi


# -- Baecklund transformation --------------------------------------------------------------


def bt_coefficients(lam: float, lam0: float) -> tuple[float, float, float, float]:
    """``(c0, c1, c2, c3)`` of the bilinear potentials."""
    d = lam * lam - lam0 * lam0
    if d == 0:
        raise ZeroLambda("lambda must differ from +-lambda0")
    return lam0 * lam0 / d, lam0 * lam / d, lam * lam / d, (lam * lam + lam0 * lam0) / d


def _outer(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    return _ex(s, v) * v


def bilinear_closed_form(lattice: DemoulinLattice, phi0, psi0, phi, psi, lam: float, lam0: float):
    """``S`` and ``T`` on the (n1-1) x (n2-1) grid from the closed form."""
    c0, c1, c2, c3 = bt_coefficients(lam, lam0)
    H, K = lattice.H[:-1, :-1], lattice.K[:-1, :-1]

    def d(F):
        return F[:-1, :-1], F[1:, :-1] - F[:-1, :-1], F[:-1, 1:] - F[:-1, :-1]

    p0, p01, p02 = d(np.asarray(phi0, dtype=float))
    s0, s01, s02 = d(np.asarray(psi0, dtype=float))
    p, p1, p2 = d(np.asarray(phi, dtype=float))
    s, s1, s2 = d(np.asarray(psi, dtype=float))
    hh, kk = H / (H - 1), K / (K - 1)
    S = (
        c3 * _outer(p0, p) - 2 * c1 * _outer(s0, s)
        - _outer(hh, c2 * _outer(p01, p2) + c0 * _outer(p02, p1))
        + _outer(kk * c1, _outer(s01, s2) + _outer(s02, s1))
    )
    T = (
        c3 * _outer(s0, s) - 2 * c1 * _outer(p0, p)
        - _outer(kk, c2 * _outer(s01, s2) + c0 * _outer(s02, s1))
        + _outer(hh * c1, _outer(p01, p2) + _outer(p02, p1))
    )
    return S, T


def _sum_potential(f0: np.ndarray, f: np.ndarray, start, tol: float, name: str) -> np.ndarray:
    """Integrate ``D1 S = f0 f_1 - f0_1 f``, ``D2 S = f0_2 f - f0 f_2`` from ``start``."""
    n1, n2 = f0.shape[0] - 1, f0.shape[1] - 1
    d1 = _outer(f0[:-1], f[1:]) - _outer(f0[1:], f[:-1])
    d2 = _outer(f0[:, 1:], f[:, :-1]) - _outer(f0[:, :-1], f[:, 1:])
    S = np.empty((n1, n2) + f.shape[2:])
    S[0, 0] = start
    for i in range(n1 - 1):
        S[i + 1, 0] = S[i, 0] + d1[i, 0]
    for j in range(n2 - 1):
        S[:, j + 1] = S[:, j] + d2[:n1, j]
    if n1 > 1:
        vd = f.ndim - 2
        mismatch = _norm(S[1:] - S[:-1] - d1[: n1 - 1, :n2], vd)
        scale = _norm(np.abs(_outer(f0[: n1 - 1, :n2], f[1:n1, :n2])) + np.abs(_outer(f0[1:n1, :n2], f[: n1 - 1, :n2])), vd)
        err = float(np.max(mismatch / np.maximum(scale, GUARD)))
        if err > tol:
            raise PathInconsistency(f"{name} summation is not closed ({err:.3g})")
    return S


def bilinear_potentials(
    lattice: DemoulinLattice, phi0, psi0, phi, psi, lam: float, lam0: float, tol: float = DEFAULT_TOL
) -> dict[str, np.ndarray | float]:
    """Bilinear potentials by summation and by the closed form.

    The sums start from the closed-form values at the origin; since both
    solve the same difference equations they must then agree everywhere
    (the closed form is the solution with vanishing integration constants).

    Returns
    -------
    dict
        ``S``, ``T`` (closed form), ``S_sum``, ``T_sum`` and ``agreement``, the
        largest difference relative to the local magnitude of the terms.
    """
    S, T = bilinear_closed_form(lattice, phi0, psi0, phi, psi, lam, lam0)
    phi0, psi0, phi, psi = (np.asarray(x, dtype=float) for x in (phi0, psi0, phi, psi))
    S_sum = _sum_potential(phi0, phi, S[0, 0], tol, "S")
    T_sum = _sum_potential(psi0, psi, T[0, 0], tol, "T")
    vd = phi.ndim - 2
    n1, n2 = S.shape[:2]
    scale = _norm(np.abs(_outer(phi0[:n1, :n2], phi[:n1, :n2])) + np.abs(_outer(psi0[:n1, :n2], psi[:n1, :n2])), vd)
    scale = scale + _norm(np.abs(S), vd) + _norm(np.abs(T), vd)
    agree = max(np.max(_norm(S - S_sum, vd) / scale), np.max(_norm(T - T_sum, vd) / scale))
    return {"S": S, "T": T, "S_sum": S_sum, "T_sum": T_sum, "agreement": float(agree)}


@dataclass
class BacklundResult:
    """Primed lattice with its ``B, P`` and the primed lift on an (n1-2) x (n2-2) grid."""

    lattice: DemoulinLattice
    B: np.ndarray
    P: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    report: dict[str, float]


def backlund_apply(
    lattice: DemoulinLattice,
    phi0,
    psi0,
    phi,
    psi,
    lam: float,
    lam0: float,
    B=None,
    P=None,
    tol: float = DEFAULT_TOL,
) -> BacklundResult:
    """Apply the Baecklund transformation with eigenfunctions ``(phi0, psi0)`` at ``lam0``.

    ``(phi, psi)`` is a solution of the linear system at ``lam`` (scalar or
    6-vector); it is mapped to ``(S/phi0, T/psi0)``.

    Raises
    ------
    ConstraintViolated
        The admissibility quantity is not zero to ``tol``.
    ZeroEigenfunction
        ``phi0`` or ``psi0`` vanishes on the grid.
    """
    phi0, psi0 = np.asarray(phi0, dtype=float), np.asarray(psi0, dtype=float)
    n1, n2 = lattice.shape
    if phi0.shape != (n1, n2) or psi0.shape != (n1, n2):
        raise DimensionMismatch("eigenfunctions must live on the lattice grid")
    if n1 < 3 or n2 < 3:
        raise DimensionMismatch("need at least a 3 x 3 grid")
    for f, name in ((phi0, "phi0"), (psi0, "psi0")):
        bad = np.argwhere(~np.isfinite(f) | (np.abs(f) < GUARD))
        if bad.size:
            raise ZeroEigenfunction(f"{name} vanishes", tuple(int(x) for x in bad[0]))
    value, spread = admissibility_constant(lattice, phi0, psi0, tol)
    if abs(value) > tol:
        raise ConstraintViolated(f"admissibility constant {value:.3g} is not zero")
    if B is None or P is None:
        B, P = bp_of(lattice)
    pot = bilinear_potentials(lattice, phi0, psi0, phi, psi, lam, lam0, tol)
    m1, m2 = n1 - 2, n2 - 2
    p, s = phi0, psi0
    H, K, A, Q = lattice.H[:m1, :m2], lattice.K[:m1, :m2], lattice.A[:m1, :m2], lattice.Q[:m1, :m2]
    p00, p10, p01, p11 = p[:m1, :m2], p[1 : m1 + 1, :m2], p[:m1, 1 : m2 + 1], p[1 : m1 + 1, 1 : m2 + 1]
    s00, s10, s01, s11 = s[:m1, :m2], s[1 : m1 + 1, :m2], s[:m1, 1 : m2 + 1], s[1 : m1 + 1, 1 : m2 + 1]
    p20, p02 = p[2 : m1 + 2, :m2], p[:m1, 2 : m2 + 2]
    s20, s02 = s[2 : m1 + 2, :m2], s[:m1, 2 : m2 + 2]
    Hp = p10 * p01 / (p11 * p00) * H
    Kp = s10 * s01 / (s11 * s00) * K
    Ap = p10 * s10 / (p20 * s00) * A
    Bp = p01 * s01 / (p02 * s00) * B[:m1, :m2]
    Pp = s10 * p10 / (s20 * p00) * P[:m1, :m2]
    Qp = s01 * p01 / (s02 * p00) * Q
    new = DemoulinLattice(Hp, Kp, Ap, Qp)
    phi_p = pot["S"][:m1, :m2] / _ex(p00, pot["S"])
    psi_p = pot["T"][:m1, :m2] / _ex(s00, pot["T"])

    dem = dem_residuals(new)
    Bq, Pq = bp_of(new)
    bp = max(_max(np.abs(Bq - Bp) / np.abs(Bp)), _max(np.abs(Pq - Pp) / np.abs(Pp)))
    lin = linear_residuals(new, lam, phi_p, psi_p, Bp, Pp)
    report = {
        "admissibility": abs(value),
        "admissibility_spread": spread,
        "potentials": pot["agreement"],
        "demoulin": max(_max(dem["H12"]), _max(dem["K12"])),
        "compatibility": max(_max(dem["A2"]), _max(dem["Q1"])),
        "bp": bp,
        "bp_relation": _max(bp_relation_residual(new, Bp, Pp)),
        "linear_system": max(_max(r) for r in lin.values()),
    }
    return BacklundResult(new, Bp, Pp, phi_p, psi_p, report)


# -- two-component tau functions ---------------------------------------------------------


@dataclass
class TauSigmaField:
    tau: np.ndarray
    sigma: np.ndarray


def tau_sigma_layer(
    lattice: DemoulinLattice, tau_seeds, sigma_seeds, B=None, P=None, tol: float = DEFAULT_TOL
) -> TauSigmaField:
    """tau and sigma with ``H = tau_1 tau_2/(tau_12 tau)``, ``A = tau_1 sigma_1/(tau_11 sigma)`` etc.

    Seeds are the values at (0,0), (1,0), (0,1).  Row ``n2 = 0`` uses the
    A/P recurrences, column ``n1 = 0`` the B/Q recurrences and the interior the
    H/K recurrences; all six relations are then checked on the grid.

    Raises
    ------
    ZeroTau
        A seed or computed value vanishes or overflows.
    InconsistentRecurrences
        The recovered ``A, B, P, Q`` differ from the input by more than ``tol``.
    """
    if B is None or P is None:
        B, P = bp_of(lattice)
    H, K, A, Q = lattice.H, lattice.K, lattice.A, lattice.Q
    n1, n2 = H.shape
    t = np.full((n1, n2), np.nan)
    s = t.copy()
    ts, ss = np.asarray(tau_seeds, dtype=float), np.asarray(sigma_seeds, dtype=float)
    if np.any(np.abs(np.concatenate([ts, ss])) < GUARD):
        raise ZeroTau("seeds must be nonzero")
    (t[0, 0], t[1, 0], t[0, 1]), (s[0, 0], s[1, 0], s[0, 1]) = ts, ss
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        _fill_tau_sigma(t, s, H, K, A, B, P, Q)
    for f, name in ((t, "tau"), (s, "sigma")):
        bad = np.argwhere(~np.isfinite(f) | (f == 0))
        if bad.size:
            raise ZeroTau(f"{name} vanished or overflowed", tuple(int(x) for x in bad[0]))
    field = TauSigmaField(t, s)
    rec = parametrize(field)
    err = 0.0
    for name, given in (("A", A), ("B", B), ("P", P), ("Q", Q)):
        got = rec[name]
        ok = np.isfinite(got) & np.isfinite(given)
        err = max(err, _max(np.abs(got[ok] - given[ok]) / np.abs(given[ok])))
    if not err <= tol:
        raise InconsistentRecurrences(f"recovered coefficients differ by {err:.3g}")
    return field


def _fill_tau_sigma(t, s, H, K, A, B, P, Q) -> None:
    n1, n2 = t.shape
    for i in range(n1 - 2):
        t[i + 2, 0] = t[i + 1, 0] * s[i + 1, 0] / (A[i, 0] * s[i, 0])
        s[i + 2, 0] = s[i + 1, 0] * t[i + 1, 0] / (P[i, 0] * t[i, 0])
    for j in range(n2 - 2):
        t[0, j + 2] = t[0, j + 1] * s[0, j + 1] / (B[0, j] * s[0, j])
        s[0, j + 2] = s[0, j + 1] * t[0, j + 1] / (Q[0, j] * t[0, j])
    for j in range(n2 - 1):
        for i in range(n1 - 1):
            t[i + 1, j + 1] = t[i + 1, j] * t[i, j + 1] / (H[i, j] * t[i, j])
            s[i + 1, j + 1] = s[i + 1, j] * s[i, j + 1] / (K[i, j] * s[i, j])


def parametrize(field: TauSigmaField) -> dict[str, np.ndarray]:
    """``H, K, A, B, P, Q`` from tau and sigma (NaN where the stencil is missing)."""
    t, s = field.tau, field.sigma
    n1, n2 = t.shape
    out = {k: np.full((n1, n2), np.nan) for k in ("H", "K", "A", "B", "P", "Q")}
    out["H"][:-1, :-1] = t[1:, :-1] * t[:-1, 1:] / (t[1:, 1:] * t[:-1, :-1])
    out["K"][:-1, :-1] = s[1:, :-1] * s[:-1, 1:] / (s[1:, 1:] * s[:-1, :-1])
    out["A"][:-2] = t[1:-1] * s[1:-1] / (t[2:] * s[:-2])
    out["P"][:-2] = s[1:-1] * t[1:-1] / (s[2:] * t[:-2])
    out["B"][:, :-2] = t[:, 1:-1] * s[:, 1:-1] / (t[:, 2:] * s[:, :-2])
    out["Q"][:, :-2] = s[:, 1:-1] * t[:, 1:-1] / (s[:, 2:] * t[:, :-2])
    return out


def _d2(a, b, c, d):
    return a * d - b * c, np.abs(a * d) + np.abs(b * c)


def tau_sigma_residuals(field: TauSigmaField) -> dict[str, np.ndarray]:
    """Residuals of the two-component determinant equations and of the constraints.

    ``identity_1``, ``identity_2`` and ``coupling_1``, ``coupling_2`` are normalized by the sum of
    the magnitudes of their terms; ``identity_cube`` is the first equation
    normalized by ``|tau_12|^3 |sigma_12|^2`` for comparison.
    """
    t, s = field.tau, field.sigma
    n1, n2 = t.shape
    m1, m2 = n1 - 2, n2 - 2

    def T(a, b):
        return t[a : a + m1, b : b + m2]

    def S(a, b):
        return s[a : a + m1, b : b + m2]

    mt = stencil3(t)
    ms = np.swapaxes(stencil3(s), -1, -2)
    a2, a2s = _d2(S(0, 1), S(1, 1), S(0, 2), S(1, 2))
    b2, b2s = _d2(T(0, 1), T(1, 1), T(0, 2), T(1, 2))
    x1 = a2 * _det3(mt) + b2 * S(1, 1) ** 2 * T(1, 1)
    sc1 = a2s * _perm3(mt) + b2s * S(1, 1) ** 2 * np.abs(T(1, 1))
    c2, c2s = _d2(T(1, 0), T(2, 0), T(1, 1), T(2, 1))
    d2, d2s = _d2(S(1, 0), S(2, 0), S(1, 1), S(2, 1))
    x2 = c2 * _det3(ms) + d2 * T(1, 1) ** 2 * S(1, 1)
    sc2 = c2s * _perm3(ms) + d2s * T(1, 1) ** 2 * np.abs(S(1, 1))
    p, ps = _d2(T(0, 0), T(1, 0), T(0, 1), T(1, 1))
    q, qs = _d2(S(0, 0), S(1, 0), S(0, 1), S(1, 1))
    u, us = _d2(S(0, 1), S(0, 2), S(1, 1), S(1, 2))
    v, vs = _d2(T(0, 1), T(0, 2), T(1, 1), T(1, 2))
    y1 = p * u - q * v
    w, ws = _d2(S(1, 0), S(2, 0), S(1, 1), S(2, 1))
    z, zs = _d2(T(1, 0), T(2, 0), T(1, 1), T(2, 1))
    y2 = p * w - q * z
    return {
        "identity_1": np.abs(x1) / sc1,
        "identity_2": np.abs(x2) / sc2,
        "coupling_1": np.abs(y1) / (ps * us + qs * vs),
        "coupling_2": np.abs(y2) / (ps * ws + qs * zs),
        "identity_cube": np.abs(x1) / (np.abs(T(1, 1)) ** 3 * S(1, 1) ** 2),
    }


def require_constant_lattice(lattice: DemoulinLattice, tol: float = DEFAULT_TOL) -> tuple[float, float, float]:
    """``(h, a, q)`` of a constant lattice with ``H = K``; NotApplicable otherwise."""
    vals = []
    for name in ("H", "K", "A", "Q"):
        x = getattr(lattice, name)
        x = x[np.isfinite(x)]
        if x.size == 0 or np.max(np.abs(x - x[0])) > tol * max(1.0, abs(x[0])):
            raise NotApplicable(f"{name} is not constant")
        vals.append(float(x[0]))
    if abs(vals[0] - vals[1]) > tol * abs(vals[0]):
        raise NotApplicable("plane waves need H = K")
    return vals[0], vals[2], vals[3]
