"""Discrete projective Gauss-Mainardi-Codazzi system.

A lattice stores the decuple ``(alpha, a, b, f, g | alpha_bar, a_bar, b_bar,
f_bar, g_bar)`` at every site in an array of shape ``(n1, n2, 10)``.  The
unbarred block drives the n1-step of the canonical frame and the barred block
the n2-step::

    F(n1+1, n2) = L F(n1, n2),     F(n1, n2+1) = M F(n1, n2)

with frame rows ``(r, r1, r2, r12)``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ComplexBranch,
    DimensionMismatch,
    NotApplicable,
    PathInconsistency,
    RuledDegeneracy,
    SingularW,
    ZeroLambda,
)
from .lattice import DEFAULT_TOL, GUARD

FIELDS = ("alpha", "a", "b", "f", "g", "alpha_bar", "a_bar", "b_bar", "f_bar", "g_bar")
UNBARRED = FIELDS[:5]
BARRED = FIELDS[5:]


class MinimalClass(str, enum.Enum):
    GENERIC = "Generic"
    GODEAUX_ROZET_T0 = "GodeauxRozetT0"
    GODEAUX_ROZET_TBAR0 = "GodeauxRozetTbar0"
    DEMOULIN = "Demoulin"
    TZITZEICA = "Tzitzeica"
    NON_MINIMAL = "NonMinimal"


@dataclass(frozen=True)
class GmcState:
    """GMC data at a single site."""

    alpha: float
    a: float
    b: float
    f: float
    g: float
    alpha_bar: float
    a_bar: float
    b_bar: float
    f_bar: float
    g_bar: float

    @property
    def u(self) -> float:
        return self.f + self.g

    @property
    def v(self) -> float:
        return self.f - self.g

    @property
    def u_bar(self) -> float:
        return self.f_bar + self.g_bar

    @property
    def v_bar(self) -> float:
        return self.f_bar - self.g_bar

    @property
    def T(self) -> float:
        return self.a * self.b + self.g**2

    @property
    def T_bar(self) -> float:
        return self.a_bar * self.b_bar + self.g_bar**2

    @property
    def unbarred(self) -> tuple[float, ...]:
        return (self.alpha, self.a, self.b, self.f, self.g)

    @property
    def barred(self) -> tuple[float, ...]:
        return (self.alpha_bar, self.a_bar, self.b_bar, self.f_bar, self.g_bar)

    @classmethod
    def from_blocks(cls, unbarred: Sequence[float], barred: Sequence[float]) -> "GmcState":
        return cls(*map(float, unbarred), *map(float, barred))


class GmcLattice:
    """GMC data on an ``n1 x n2`` grid.

    Parameters
    ----------
    values : numpy.ndarray, shape (n1, n2, 10)
        Field values in the order of ``FIELDS``.
    w : numpy.ndarray, optional
        The branch value w used at each site during evolution.
    """

    def __init__(self, values: np.ndarray, w: np.ndarray | None = None, branch: int = 1):
        values = np.asarray(values, dtype=float)
        if values.ndim != 3 or values.shape[2] != 10:
            raise DimensionMismatch(f"expected shape (n1, n2, 10), got {values.shape}")
        self.values = values
        self.w = w
        self.branch = branch

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape[:2]

    def __getattr__(self, name: str) -> np.ndarray:
        if name in FIELDS:
            return self.values[..., FIELDS.index(name)]
        raise AttributeError(name)

    @property
    def T(self) -> np.ndarray:
        return self.a * self.b + self.g**2

    @property
    def T_bar(self) -> np.ndarray:
        return self.a_bar * self.b_bar + self.g_bar**2

    def state(self, n1: int, n2: int) -> GmcState:
        return GmcState(*self.values[n1, n2])

    def fields(self) -> dict[str, np.ndarray]:
        return {name: self.values[..., k] for k, name in enumerate(FIELDS)}

    @classmethod
    def from_fields(cls, fields: dict[str, np.ndarray]) -> "GmcLattice":
        return cls(np.stack([np.asarray(fields[name], dtype=float) for name in FIELDS], axis=-1))


# -- single-site operations ---------------------------------------------------


def w_of(state: GmcState, branch: int = 1, site=None) -> float:
    """Root w of ``alpha alpha_bar (w^2 - 1) + a a_bar = 0`` on the chosen branch."""
    rad = 1.0 - state.a * state.a_bar / (state.alpha * state.alpha_bar)
    if rad < 0:
        raise ComplexBranch(f"radicand {rad:.6g} < 0", site)
    w = branch * np.sqrt(rad)
    if abs(w) < GUARD:
        raise SingularW(f"|w| = {abs(w):.3g}", site)
    return float(w)


def _check_alphas(state: GmcState, site) -> None:
    if abs(state.alpha) < GUARD or abs(state.alpha_bar) < GUARD:
        raise SingularW("alpha or alpha_bar below guard", site)


def _update(state: GmcState, branch: int, site) -> tuple[tuple, tuple, float]:
    """Step without the closure: blocks ``(alpha, b, f, g)`` and w."""
    _check_alphas(state, site)
    w = w_of(state, branch, site)
    al, a, b, f, g = state.unbarred
    alb, ab, bb, fb, gb = state.barred
    un = (w * al, -a / (alb**2 * w), (f - a / alb * gb) / w, (-g + a / alb * fb) / w)
    ba = (w * alb, -ab / (al**2 * w), (fb - ab / al * g) / w, (-gb + ab / al * f) / w)
    return un, ba, w


def _close(block: tuple, T: float, barred: bool, site) -> tuple[float, ...]:
    al, b, f, g = block
    suffix = "_bar" if barred else ""
    if not np.isfinite(b) or b == 0.0:
        raise RuledDegeneracy(f"b{suffix} vanished after update", site)
    a = (T - g**2) / b
    if not np.isfinite(a) or abs(a * b) <= GUARD * max(abs(T) + g**2, GUARD):
        raise RuledDegeneracy(f"a{suffix} vanished after update", site)
    return (al, a, b, f, g)


def step(
    state: GmcState,
    T_target: float | None = None,
    Tbar_target: float | None = None,
    branch: int = 1,
    site=None,
) -> tuple[tuple[float, ...], tuple[float, ...], float]:
    """One GMC step.

    Returns the unbarred block at ``(n1, n2+1)``, the barred block at
    ``(n1+1, n2)`` and w.  The free variables ``a_2`` and ``a_bar_1`` are
    closed by ``T_2 = T_target`` and ``T_bar_1 = Tbar_target``; the defaults
    keep T and T_bar constant (the minimal case).
    """
    un, ba, w = _update(state, branch, site)
    T = state.T if T_target is None else T_target
    Tb = state.T_bar if Tbar_target is None else Tbar_target
    return _close(un, T, False, site), _close(ba, Tb, True, site), w


# -- evolution ------------------------------------------------------------------


def _axis_data(cauchy_unbarred, cauchy_barred) -> tuple[np.ndarray, np.ndarray]:
    cu = np.asarray(cauchy_unbarred, dtype=float)
    cb = np.asarray(cauchy_barred, dtype=float)
    if cu.ndim != 2 or cu.shape[1] != 5 or cb.ndim != 2 or cb.shape[1] != 5:
        raise DimensionMismatch("Cauchy data must have shape (n, 5)")
    if cu.shape[0] < 1 or cb.shape[0] < 1:
        raise DimensionMismatch("Cauchy data must be non-empty")
    return cu, cb


def _check_class(cu: np.ndarray, cb: np.ndarray, cls: MinimalClass, tol: float) -> None:
    T = cu[:, 1] * cu[:, 2] + cu[:, 4] ** 2
    Tb = cb[:, 1] * cb[:, 2] + cb[:, 4] ** 2
    T_zero = np.all(np.abs(T) <= tol * (np.abs(cu[:, 1] * cu[:, 2]) + cu[:, 4] ** 2))
    Tb_zero = np.all(np.abs(Tb) <= tol * (np.abs(cb[:, 1] * cb[:, 2]) + cb[:, 4] ** 2))
    if cls == MinimalClass.NON_MINIMAL:
        raise NotApplicable("non-minimal lattices have no evolution closure; use evolve_net")
    need_T = cls in (MinimalClass.DEMOULIN, MinimalClass.TZITZEICA, MinimalClass.GODEAUX_ROZET_T0)
    need_Tb = cls in (MinimalClass.DEMOULIN, MinimalClass.TZITZEICA, MinimalClass.GODEAUX_ROZET_TBAR0)
    if need_T and not T_zero:
        raise NotApplicable(f"class {cls.value} requires T = 0 on the n1 axis")
    if need_Tb and not Tb_zero:
        raise NotApplicable(f"class {cls.value} requires T_bar = 0 on the n2 axis")


def evolve_net(
    cauchy_unbarred,
    cauchy_barred,
    rule: Callable[[int, int, GmcState, tuple], float] | None = None,
    prescribe: str = "T",
    branch: int = 1,
) -> GmcLattice:
    """Evolve a general discrete asymptotic net from Cauchy data.

    Parameters
    ----------
    cauchy_unbarred : array_like, shape (n1, 5)
        ``(alpha, a, b, f, g)`` along n2 = 0.
    cauchy_barred : array_like, shape (n2, 5)
        ``(alpha_bar, a_bar, b_bar, f_bar, g_bar)`` along n1 = 0.
    rule : callable, optional
        ``rule(n1, n2, state, new_block)`` returns the prescribed value of T at
        ``(n1, n2+1)`` (``prescribe="T"``) or of T_bar at ``(n1+1, n2)``
        (``prescribe="T_bar"``).  ``new_block`` is the provisional updated
        block ``(alpha, b, f, g)`` (``a`` is what the closure determines).  The other quantity follows
        from ``a_bar alpha_bar D2 T = a alpha D1 T_bar``.  ``None`` keeps T and
        T_bar constant (minimal evolution).
    """
    cu, cb = _axis_data(cauchy_unbarred, cauchy_barred)
    n1, n2 = cu.shape[0], cb.shape[0]
    vals = np.full((n1, n2, 10), np.nan)
    W = np.full((n1, n2), np.nan)
    vals[:, 0, :5] = cu
    vals[0, :, 5:] = cb
    for j in range(n2):
        for i in range(n1):
            if i + 1 >= n1 and j + 1 >= n2:
                continue
            s = GmcState(*vals[i, j])
            site = (i, j)
            un, ba, w = _update(s, branch, site)
            T_t, Tb_t = s.T, s.T_bar
            if rule is not None:
                if prescribe == "T":
                    T_t = float(rule(i, j, s, un))
                    Tb_t = s.T_bar + s.a_bar * s.alpha_bar * (T_t - s.T) / (s.a * s.alpha)
                elif prescribe == "T_bar":
                    Tb_t = float(rule(i, j, s, ba))
                    T_t = s.T + s.a * s.alpha * (Tb_t - s.T_bar) / (s.a_bar * s.alpha_bar)
                else:
                    raise ValueError("prescribe must be 'T' or 'T_bar'")
            W[i, j] = w
            if j + 1 < n2:
                vals[i, j + 1, :5] = _close(un, T_t, False, site)
            if i + 1 < n1:
                vals[i + 1, j, 5:] = _close(ba, Tb_t, True, site)
    if n1 * n2 > 0:
        s = GmcState(*vals[n1 - 1, n2 - 1])
        try:
            W[n1 - 1, n2 - 1] = w_of(s, branch)
        except (ComplexBranch, SingularW):
            pass
    return GmcLattice(vals, W, branch)


def evolve(
    cauchy_unbarred,
    cauchy_barred,
    cls: MinimalClass | str = MinimalClass.GENERIC,
    branch: int = 1,
    tol: float = DEFAULT_TOL,
) -> GmcLattice:
    """Evolve a discrete projective minimal surface from Cauchy data.

    The class is checked against the axis data (Demoulin needs T = T_bar = 0,
    the Godeaux-Rozet classes one of them).  Non-minimal data is refused.
    """
    cu, cb = _axis_data(cauchy_unbarred, cauchy_barred)
    _check_class(cu, cb, MinimalClass(cls), tol)
    return evolve_net(cu, cb, None, "T", branch)


def evolve_asymptotic(cauchy_unbarred, cauchy_barred, drift, branch: int = 1) -> GmcLattice:
    """Non-minimal evolution with ``T(n1, n2+1) = T(n1, n2) + drift(n1, n2)``."""
    drift_fn = drift if callable(drift) else (lambda i, j, d=float(drift): d)
    return evolve_net(
        cauchy_unbarred, cauchy_barred, lambda i, j, s, new: s.T + drift_fn(i, j), "T", branch
    )


# -- diagnostics -------------------------------------------------------------------


def minimality_deviation(lattice: GmcLattice) -> tuple[float, float]:
    """max|T - T(n1, 0)| / max|T| and max|T_bar - T_bar(0, n2)| / max|T_bar|."""
    T, Tb = lattice.T, lattice.T_bar
    dT = np.nanmax(np.abs(T - T[:, :1]))
    dTb = np.nanmax(np.abs(Tb - Tb[:1, :]))
    sT = max(np.nanmax(np.abs(T)), np.nanmax(np.abs(lattice.a * lattice.b)), GUARD)
    sTb = max(np.nanmax(np.abs(Tb)), np.nanmax(np.abs(lattice.a_bar * lattice.b_bar)), GUARD)
    return float(dT / sT), float(dTb / sTb)


def teqn_residual(lattice: GmcLattice) -> np.ndarray:
    """Relative residual of ``a_bar alpha_bar D2 T - a alpha D1 T_bar`` per face."""
    T, Tb = lattice.T, lattice.T_bar
    c1 = lattice.a_bar * lattice.alpha_bar
    c2 = lattice.a * lattice.alpha
    d2 = T[:-1, 1:] - T[:-1, :-1]
    d1 = Tb[1:, :-1] - Tb[:-1, :-1]
    num = c1[:-1, :-1] * d2 - c2[:-1, :-1] * d1
    tAB = np.abs(lattice.a * lattice.b) + lattice.g**2
    tbAB = np.abs(lattice.a_bar * lattice.b_bar) + lattice.g_bar**2
    scale = np.abs(c1[:-1, :-1]) * (tAB[:-1, 1:] + tAB[:-1, :-1]) + np.abs(c2[:-1, :-1]) * (
        tbAB[1:, :-1] + tbAB[:-1, :-1]
    )
    return np.abs(num) / scale


def edge_constraint_residual(lattice: GmcLattice) -> np.ndarray:
    """Relative residual of ``alpha alpha_bar_1 = alpha_bar alpha_2`` per face."""
    lhs = lattice.alpha[:-1, :-1] * lattice.alpha_bar[1:, :-1]
    rhs = lattice.alpha_bar[:-1, :-1] * lattice.alpha[:-1, 1:]
    return np.abs(lhs - rhs) / np.abs(lhs)


def tzitzeica_constraint_residual(lattice: GmcLattice) -> np.ndarray:
    """Relative residual of ``(g/b)_12 (gb/bb)_1 = (gb/bb)_12 (g/b)_2`` per face."""
    p = lattice.g / lattice.b
    q = lattice.g_bar / lattice.b_bar
    lhs = p[1:, 1:] * q[1:, :-1]
    rhs = q[1:, 1:] * p[:-1, 1:]
    return np.abs(lhs - rhs) / (np.abs(lhs) + np.abs(rhs) + GUARD)


def classify(lattice: GmcLattice, tol: float = DEFAULT_TOL) -> MinimalClass:
    """Algebraic class of a lattice from the T / T_bar tests."""
    dT, dTb = minimality_deviation(lattice)
    if dT > tol or dTb > tol:
        return MinimalClass.NON_MINIMAL
    T_scale = np.abs(lattice.a * lattice.b) + lattice.g**2
    Tb_scale = np.abs(lattice.a_bar * lattice.b_bar) + lattice.g_bar**2
    T_zero = bool(np.all(np.abs(lattice.T) <= tol * T_scale))
    Tb_zero = bool(np.all(np.abs(lattice.T_bar) <= tol * Tb_scale))
    if T_zero and Tb_zero:
        n1, n2 = lattice.shape
        if n1 > 1 and n2 > 1 and np.all(tzitzeica_constraint_residual(lattice) <= tol):
            return MinimalClass.TZITZEICA
        return MinimalClass.DEMOULIN
    if T_zero:
        return MinimalClass.GODEAUX_ROZET_T0
    if Tb_zero:
        return MinimalClass.GODEAUX_ROZET_TBAR0
    return MinimalClass.GENERIC


def scale_states(lattice: GmcLattice, lam: float) -> GmcLattice:
    """Apply ``(a, b, g) -> lam (a, b, g)``, ``(a_bar, b_bar, g_bar) -> (a_bar, b_bar, g_bar) / lam``."""
    if lam == 0:
        raise ZeroLambda("scaling parameter must be nonzero")
    vals = lattice.values.copy()
    for name in ("a", "b", "g"):
        vals[..., FIELDS.index(name)] *= lam
    for name in ("a_bar", "b_bar", "g_bar"):
        vals[..., FIELDS.index(name)] /= lam
    return GmcLattice(vals, lattice.w, lattice.branch)


# -- frames -------------------------------------------------------------------------


def L_matrix(alpha, a, b, f, g, lam: float = 1.0) -> np.ndarray:
    """n1-step matrix of the lambda-dependent canonical frame equations."""
    alpha, a, b, f, g = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha, a, b, f, g)))
    m = np.zeros(alpha.shape + (4, 4))
    m[..., 0, 1] = 1 / alpha
    m[..., 1, 0] = -alpha
    m[..., 1, 1] = f + lam * g
    m[..., 1, 3] = lam * b
    m[..., 2, 3] = 1 / alpha
    m[..., 3, 1] = lam * a
    m[..., 3, 2] = -alpha
    m[..., 3, 3] = f - lam * g
    return m


def M_matrix(alpha_bar, a_bar, b_bar, f_bar, g_bar, lam: float = 1.0) -> np.ndarray:
    """n2-step matrix of the lambda-dependent canonical frame equations."""
    if lam == 0:
        raise ZeroLambda("lambda must be nonzero for the n2-step matrix")
    arrs = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (alpha_bar, a_bar, b_bar, f_bar, g_bar)))
    alb, ab, bb, fb, gb = arrs
    m = np.zeros(alb.shape + (4, 4))
    m[..., 0, 2] = 1 / alb
    m[..., 1, 3] = 1 / alb
    m[..., 2, 0] = -alb
    m[..., 2, 2] = fb + gb / lam
    m[..., 2, 3] = bb / lam
    m[..., 3, 1] = -alb
    m[..., 3, 2] = ab / lam
    m[..., 3, 3] = fb - gb / lam
    return m


def transition_matrices(lattice: GmcLattice, lam: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Per-site L and M, arrays of shape (n1, n2, 4, 4)."""
    return (
        L_matrix(*(getattr(lattice, n) for n in UNBARRED), lam),
        M_matrix(*(getattr(lattice, n) for n in BARRED), lam),
    )


def transition_determinants(lattice: GmcLattice, lam: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    L, M = transition_matrices(lattice, lam)
    return np.linalg.det(L), np.linalg.det(M)


def build_frames(
    lattice: GmcLattice, seed: np.ndarray | None = None, lam: float = 1.0
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the frame equations over the lattice.

    Integration runs up the n1 = 0 column with M and then along each row with
    L.  Path independence is measured, not assumed: for every face both
    orders ``M_1 L F`` and ``L_2 M F`` are applied to the stored ``F``.  The
    frames themselves are badly conditioned on large grids (entries grow
    while det F stays fixed), so comparing frames integrated along two long
    paths would mostly measure accumulated roundoff.

    Returns
    -------
    frames : numpy.ndarray, shape (n1, n2, 4, 4)
        Rows ``(r, r1, r2, r12)`` at each site.
    residual : numpy.ndarray, shape (n1-1, n2-1)
        ``|M(n1+1,n2) L(n1,n2) F - L(n1,n2+1) M(n1,n2) F| / |M_1 L F|`` per face.
    """
    n1, n2 = lattice.shape
    seed = np.eye(4) if seed is None else np.asarray(seed, dtype=float)
    L, M = transition_matrices(lattice, lam)
    F = np.zeros((n1, n2, 4, 4))
    F[0, 0] = seed
    for j in range(n2):
        if j > 0:
            F[0, j] = M[0, j - 1] @ F[0, j - 1]
        for i in range(1, n1):
            F[i, j] = L[i - 1, j] @ F[i - 1, j]
    F12 = M[1:, :-1] @ (L[:-1, :-1] @ F[:-1, :-1])
    F21 = L[:-1, 1:] @ (M[:-1, :-1] @ F[:-1, :-1])
    res = np.linalg.norm(F12 - F21, axis=(-1, -2)) / np.linalg.norm(F12, axis=(-1, -2))
    return F, res


def face_residual_local(lattice: GmcLattice, lam: float = 1.0) -> np.ndarray:
    """|L_2 M - M_1 L| / |L_2 M| per face (frame-independent compatibility)."""
    L, M = transition_matrices(lattice, lam)
    a = L[:-1, 1:] @ M[:-1, :-1]
    b = M[1:, :-1] @ L[:-1, :-1]
    return np.linalg.norm(a - b, axis=(-1, -2)) / np.linalg.norm(a, axis=(-1, -2))


# -- reduced 2x2 systems ------------------------------------------------------------


def reduced_matrices_inf(lattice: GmcLattice) -> tuple[np.ndarray, np.ndarray]:
    """The lambda -> infinity 2x2 system acting on (rho1, rho12)."""
    P = np.stack([np.stack([lattice.g, lattice.b], -1), np.stack([lattice.a, -lattice.g], -1)], -2)
    zero = np.zeros_like(lattice.alpha_bar)
    R = np.stack(
        [np.stack([zero, 1 / lattice.alpha_bar], -1), np.stack([-lattice.alpha_bar, lattice.f_bar], -1)], -2
    )
    return P, R


def reduced_matrices_zero(lattice: GmcLattice) -> tuple[np.ndarray, np.ndarray]:
    """The lambda = 0 2x2 system acting on (rho2, rho12)."""
    zero = np.zeros_like(lattice.alpha)
    P = np.stack([np.stack([zero, 1 / lattice.alpha], -1), np.stack([-lattice.alpha, lattice.f], -1)], -2)
    R = np.stack(
        [np.stack([lattice.g_bar, lattice.b_bar], -1), np.stack([lattice.a_bar, -lattice.g_bar], -1)], -2
    )
    return P, R


def _propagate2(P: np.ndarray, R: np.ndarray, seed, tol: float, strict: bool):
    n1, n2 = P.shape[:2]
    x = np.zeros((n1, n2, 2))
    x[0, 0] = seed
    for j in range(n2):
        if j > 0:
            x[0, j] = R[0, j - 1] @ x[0, j - 1]
        for i in range(1, n1):
            x[i, j] = P[i - 1, j] @ x[i - 1, j]
    a = np.einsum("...ij,...j->...i", R[1:, :-1], x[1:, :-1])
    b = np.einsum("...ij,...j->...i", P[:-1, 1:], x[:-1, 1:])
    res = np.linalg.norm(a - b, axis=-1) / np.linalg.norm(a, axis=-1)
    if strict and res.size and np.nanmax(res) > tol:
        face = np.unravel_index(np.nanargmax(res), res.shape)
        raise PathInconsistency(f"reduced system residual {np.nanmax(res):.3g}", face)
    return x, res


def reduced_system_inf(lattice: GmcLattice, seed, tol: float = DEFAULT_TOL, strict: bool = True):
    """Propagate (rho1, rho12) of the lambda -> infinity limit. Needs D2 T = 0."""
    return _propagate2(*reduced_matrices_inf(lattice), seed, tol, strict)


def reduced_system_zero(lattice: GmcLattice, seed, tol: float = DEFAULT_TOL, strict: bool = True):
    """Propagate (rho2, rho12) of the lambda = 0 limit. Needs D1 T_bar = 0."""
    return _propagate2(*reduced_matrices_zero(lattice), seed, tol, strict)


def generic_cauchy_data(n1: int, n2: int, rng: np.random.Generator, g_scale: float = 0.3):
    """Random Cauchy data for a Generic lattice that keeps w real on the + branch.

    Magnitudes are uniform in [0.5, 1.5].  Signs are fixed so that T < 0,
    T_bar < 0 and a a_bar < 0, which the evolution preserves; g and g_bar are
    shrunk by ``g_scale`` to keep T and T_bar away from zero.
    """
    cu = rng.uniform(0.5, 1.5, (n1, 5))
    cb = rng.uniform(0.5, 1.5, (n2, 5))
    cu[:, 1] *= -1
    cb[:, 2] *= -1
    cu[:, 3] *= rng.choice([-1.0, 1.0], n1)
    cb[:, 3] *= rng.choice([-1.0, 1.0], n2)
    cu[:, 4] *= g_scale * rng.choice([-1.0, 1.0], n1)
    cb[:, 4] *= g_scale * rng.choice([-1.0, 1.0], n2)
    return cu, cb
