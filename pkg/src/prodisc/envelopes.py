"""Envelopes of the Lie-quadric lattice.

An envelope assigns labels ``(mu, nu)`` to every site; its vertex is the
point ``omega = r12 + mu r1 + nu r2 + mu nu r`` of the site's quadric.  Labels
are stored as homogeneous pairs so a Riccati pole simply yields the label
``inf``.

All tangency and coincidence checks are evaluated in the local frame of the
base site, with the neighbouring frame reached through L or M.  The
transition matrices are unimodular, so the determinants are the same as in
global coordinates while avoiding the conditioning of long frame products.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotApplicable, RiccatiPole, ZeroNu
from .gmc import GmcLattice, GmcState, MinimalClass, classify, transition_matrices
from .lattice import DEFAULT_TOL, GUARD, normalized_det, projective_distance
from .quadrics import as_pair


def _normalize(pair: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(pair, axis=-1, keepdims=True)
    return pair / n


def _values(pairs: np.ndarray) -> np.ndarray:
    p, q = pairs[..., 0], pairs[..., 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(q == 0, np.inf, p / np.where(q == 0, 1.0, q))


def _coords(mu: np.ndarray, nu: np.ndarray) -> np.ndarray:
    pm, qm = mu[..., 0], mu[..., 1]
    pn, qn = nu[..., 0], nu[..., 1]
    return np.stack([pm * pn, pm * qn, qm * pn, qm * qn], axis=-1)


def _d_mu(mu: np.ndarray, nu: np.ndarray) -> np.ndarray:
    z = np.zeros_like(nu[..., 0])
    return np.stack([nu[..., 0], nu[..., 1], z, z], axis=-1)


def _d_nu(mu: np.ndarray, nu: np.ndarray) -> np.ndarray:
    z = np.zeros_like(mu[..., 0])
    return np.stack([mu[..., 0], z, mu[..., 1], z], axis=-1)


def _apply(M: np.ndarray, pair: np.ndarray) -> np.ndarray:
    return _normalize(np.einsum("...ij,...j->...i", M, pair))


# -- Riccati maps as 2x2 Moebius matrices acting on (p, q) ----------------------


def mu_step_matrices(lattice: GmcLattice) -> tuple[np.ndarray, np.ndarray]:
    """Per-site matrices of ``mu_1 = (g mu + a)/(b mu - g)`` and ``mu_2 = -alpha_bar^2/mu - alpha_bar f_bar``."""
    lt = lattice
    m1 = np.stack([np.stack([lt.g, lt.a], -1), np.stack([lt.b, -lt.g], -1)], -2)
    zero = np.zeros_like(lt.alpha_bar)
    m2 = np.stack(
        [np.stack([-lt.alpha_bar * lt.f_bar, -lt.alpha_bar**2], -1), np.stack([np.ones_like(zero), zero], -1)],
        -2,
    )
    return m1, m2


def nu_step_matrices(lattice: GmcLattice) -> tuple[np.ndarray, np.ndarray]:
    """Per-site matrices of ``nu_1 = -alpha^2/nu - alpha f`` and ``nu_2 = (g_bar nu + a_bar)/(b_bar nu - g_bar)``."""
    lt = lattice
    zero = np.zeros_like(lt.alpha)
    m1 = np.stack(
        [np.stack([-lt.alpha * lt.f, -lt.alpha**2], -1), np.stack([np.ones_like(zero), zero], -1)], -2
    )
    m2 = np.stack([np.stack([lt.g_bar, lt.a_bar], -1), np.stack([lt.b_bar, -lt.g_bar], -1)], -2)
    return m1, m2


def riccati_nu(state: GmcState, nu: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(nu_1, nu_2)`` from the discrete Riccati equations.

    Raises
    ------
    ZeroNu
        ``nu == 0``.
    RiccatiPole
        ``b_bar nu == g_bar``.
    NotApplicable
        ``T_bar == 0``; the n2-fraction degenerates (Godeaux-Rozet direction).
    """
    if nu == 0:
        raise ZeroNu("nu must be nonzero")
    s = state
    if abs(s.T_bar) <= tol * (abs(s.a_bar * s.b_bar) + s.g_bar**2):
        raise NotApplicable("T_bar = 0: the n2 Riccati map degenerates")
    den = s.b_bar * nu - s.g_bar
    if den == 0:
        raise RiccatiPole("b_bar nu = g_bar")
    return -s.alpha**2 / nu - s.alpha * s.f, (s.g_bar * nu + s.a_bar) / den


def riccati_mu(state: GmcState, mu: float, tol: float = DEFAULT_TOL) -> tuple[float, float]:
    """``(mu_1, mu_2)`` from the discrete Riccati equations (mirror of :func:`riccati_nu`)."""
    if mu == 0:
        raise ZeroNu("mu must be nonzero")
    s = state
    if abs(s.T) <= tol * (abs(s.a * s.b) + s.g**2):
        raise NotApplicable("T = 0: the n1 Riccati map degenerates")
    den = s.b * mu - s.g
    if den == 0:
        raise RiccatiPole("b mu = g")
    return (s.g * mu + s.a) / den, -s.alpha_bar**2 / mu - s.alpha_bar * s.f_bar


def _sweep(m1: np.ndarray, m2: np.ndarray, seed, name: str) -> np.ndarray:
    n1, n2 = m1.shape[:2]
    out = np.zeros((n1, n2, 2))
    out[0, 0] = _normalize(as_pair(seed))
    for j in range(n2):
        if j > 0:
            out[0, j] = _apply(m2[0, j - 1], out[0, j - 1])
        for i in range(1, n1):
            out[i, j] = _apply(m1[i - 1, j], out[i - 1, j])
    poles = np.argwhere(np.abs(out[..., 1]) <= GUARD)
    for site in poles:
        warnings.warn(f"Riccati pole: {name} = inf at site {tuple(int(s) for s in site)}", stacklevel=3)
    return out


def sweep_residual(m1: np.ndarray, m2: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Projective mismatch of the two orders of the Riccati maps around each face.

    Both orders start from the stored label at the lower-left corner.
    """
    x = labels[:-1, :-1]
    a = _apply(m2[1:, :-1], _apply(m1[:-1, :-1], x))
    b = _apply(m1[:-1, 1:], _apply(m2[:-1, :-1], x))
    return projective_distance(a, b)


def riccati_linear_equivalence(lattice: GmcLattice, rho_inf: np.ndarray, rho_zero: np.ndarray) -> float:
    """Pointwise agreement of the Riccati maps with the linear 2x2 systems.

    ``rho_inf`` holds ``(rho1, rho12)`` and ``rho_zero`` holds ``(rho2, rho12)``
    on the grid.  The labels ``mu = -rho12/rho1`` and ``nu = -rho12/rho2`` are
    formed at every site and each Riccati step applied to them is compared
    with the label formed from the linear solution at the neighbour.
    """
    worst = 0.0
    for rho, (m1, m2) in ((rho_inf, mu_step_matrices(lattice)), (rho_zero, nu_step_matrices(lattice))):
        lab = _normalize(np.stack([-rho[..., 1], rho[..., 0]], axis=-1))
        d1 = projective_distance(_apply(m1[:-1], lab[:-1]), lab[1:])
        d2 = projective_distance(_apply(m2[:, :-1], lab[:, :-1]), lab[:, 1:])
        worst = max(worst, float(np.max(d1)), float(np.max(d2)))
    return worst


# -- envelope fields ----------------------------------------------------------------


@dataclass
class EnvelopeField:
    """Labels of an envelope as homogeneous pairs, arrays of shape (n1, n2, 2)."""

    mu_pairs: np.ndarray
    nu_pairs: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.mu_pairs.shape[:2]

    @property
    def mu(self) -> np.ndarray:
        return _values(self.mu_pairs)

    @property
    def nu(self) -> np.ndarray:
        return _values(self.nu_pairs)

    def local_coords(self) -> np.ndarray:
        """Coefficients of each vertex in its own frame ``(r, r1, r2, r12)``."""
        return _coords(self.mu_pairs, self.nu_pairs)

    def points(self, frames: np.ndarray) -> np.ndarray:
        """Vertices in the coordinates of a frame grid, shape (n1, n2, 4)."""
        return np.einsum("...i,...ij->...j", self.local_coords(), frames)

    @classmethod
    def from_values(cls, mu, nu) -> "EnvelopeField":
        mu, nu = np.asarray(mu, dtype=float), np.asarray(nu, dtype=float)
        return cls(_pairs_from_values(mu), _pairs_from_values(nu))


def _pairs_from_values(x: np.ndarray) -> np.ndarray:
    inf = np.isinf(x)
    p = np.where(inf, 1.0, x)
    q = np.where(inf, 0.0, 1.0)
    q = np.where(np.isnan(x), np.nan, q)
    return np.stack([p, q], axis=-1)


def build_envelope_generic(lattice: GmcLattice, mu0, nu0, tol: float = DEFAULT_TOL) -> EnvelopeField:
    """Envelope of a Generic lattice through the labels ``(mu0, nu0)`` at the origin."""
    cls = classify(lattice, tol)
    if cls != MinimalClass.GENERIC:
        raise NotApplicable(f"generic envelope needs a Generic lattice, got {cls.value}")
    mu = _sweep(*mu_step_matrices(lattice), mu0, "mu")
    nu = _sweep(*nu_step_matrices(lattice), nu0, "nu")
    return EnvelopeField(mu, nu)


def riccati_compatibility(lattice: GmcLattice, env: EnvelopeField) -> tuple[np.ndarray, np.ndarray]:
    """Face residuals of mu_12 = mu_21 and nu_12 = nu_21."""
    return (
        sweep_residual(*mu_step_matrices(lattice), env.mu_pairs),
        sweep_residual(*nu_step_matrices(lattice), env.nu_pairs),
    )


def _ratio_pairs(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    return _normalize(np.stack([num, den], axis=-1))


def _shift_back(pairs: np.ndarray, axis: int) -> np.ndarray:
    out = np.full_like(pairs, np.nan)
    if axis == 0:
        out[1:] = pairs[:-1]
    else:
        out[:, 1:] = pairs[:, :-1]
    return out


def build_envelopes_gr(lattice: GmcLattice, seed, tol: float = DEFAULT_TOL) -> tuple[EnvelopeField, EnvelopeField]:
    """The two envelope parametrizations of a Godeaux-Rozet lattice.

    For T = 0 the labels are ``mu = (g/b)(n1-1, n2)`` and ``mu~ = g/b`` with
    nu from its Riccati system seeded by ``seed``.  For T_bar = 0 the roles
    of mu and nu are exchanged.  The first field is undefined (NaN) on the
    first column (resp. row).
    """
    cls = classify(lattice, tol)
    if cls == MinimalClass.GODEAUX_ROZET_T0:
        nu = _sweep(*nu_step_matrices(lattice), seed, "nu")
        mt = _ratio_pairs(lattice.g, lattice.b)
        return EnvelopeField(_shift_back(mt, 0), nu), EnvelopeField(mt, nu)
    if cls == MinimalClass.GODEAUX_ROZET_TBAR0:
        mu = _sweep(*mu_step_matrices(lattice), seed, "mu")
        nt = _ratio_pairs(lattice.g_bar, lattice.b_bar)
        return EnvelopeField(mu, _shift_back(nt, 1)), EnvelopeField(mu, nt)
    raise NotApplicable(f"Godeaux-Rozet envelopes need T = 0 or T_bar = 0 only, got {cls.value}")


def shift_coincidence(lattice: GmcLattice, shifted: EnvelopeField, plain: EnvelopeField, direction: int) -> np.ndarray:
    """Projective distance between ``shifted`` at the next site and ``plain`` here.

    Returns an array of shape (n1-1, n2) for direction 1 and (n1, n2-1) for
    direction 2.
    """
    L, M = transition_matrices(lattice)
    c_s, c_p = shifted.local_coords(), plain.local_coords()
    if direction == 1:
        nxt = np.einsum("...i,...ij->...j", c_s[1:], L[:-1])
        return projective_distance(nxt, c_p[:-1])
    nxt = np.einsum("...i,...ij->...j", c_s[:, 1:], M[:, :-1])
    return projective_distance(nxt, c_p[:, :-1])


def build_envelopes_demoulin(lattice: GmcLattice, tol: float = DEFAULT_TOL) -> dict[tuple[str, str], EnvelopeField]:
    """The four envelopes of a Demoulin lattice.

    Keys are ``(mu_choice, nu_choice)`` with each choice ``"shifted"``
    (``g/b`` taken at the previous site) or ``"plain"``.
    """
    cls = classify(lattice, tol)
    if cls not in (MinimalClass.DEMOULIN, MinimalClass.TZITZEICA):
        raise NotApplicable(f"four envelopes need a Demoulin lattice, got {cls.value}")
    mt = _ratio_pairs(lattice.g, lattice.b)
    nt = _ratio_pairs(lattice.g_bar, lattice.b_bar)
    mus = {"shifted": _shift_back(mt, 0), "plain": mt}
    nus = {"shifted": _shift_back(nt, 1), "plain": nt}
    return {(km, kn): EnvelopeField(mus[km], nus[kn]) for km in mus for kn in nus}


def demoulin_coincidence(lattice: GmcLattice, fields: dict) -> float:
    """Largest shift-coincidence distance among the four Demoulin envelopes."""
    worst = 0.0
    for kn in ("shifted", "plain"):
        d = shift_coincidence(lattice, fields[("shifted", kn)], fields[("plain", kn)], 1)
        worst = max(worst, float(np.nanmax(d)) if np.isfinite(d).any() else 0.0)
    for km in ("shifted", "plain"):
        d = shift_coincidence(lattice, fields[(km, "shifted")], fields[(km, "plain")], 2)
        worst = max(worst, float(np.nanmax(d)) if np.isfinite(d).any() else 0.0)
    return worst


# -- residuals ------------------------------------------------------------------------


def tangency_residuals(lattice: GmcLattice, env: EnvelopeField) -> dict[str, np.ndarray]:
    """Tangency determinants and their factored forms.

    Returns a dict with

    ``det1`` : (n1-1, n2, 2)
        ``|w, w_1, Q_mu, Q_nu|`` at both ends of each n1-edge, normalized.
    ``det2`` : (n1, n2-1, 2)
        The same for n2-edges.
    ``munu1`` : (n1-1, n2, 2)
        ``(mu_1 - mu)(nu_1 + alpha^2/nu + alpha f)`` and
        ``(mu - g/b)(mu_1 - g/b) - T/b^2``, each relative to its term sizes.
    ``munu2`` : (n1, n2-1, 2)
        The barred analogues.

    Vertices on the common edge (``nu = 0`` for n1-edges, ``mu = 0`` for
    n2-edges) are excluded as NaN.
    """
    L, M = transition_matrices(lattice)
    mu, nu = env.mu_pairs, env.nu_pairs
    c = _coords(mu, nu)
    dm, dn = _d_mu(mu, nu), _d_nu(mu, nu)
    out = {}
    for key, T, sl0, sl1, edge_label in (
        ("det1", L, np.s_[:-1, :], np.s_[1:, :], nu),
        ("det2", M, np.s_[:, :-1], np.s_[:, 1:], mu),
    ):
        Tm = T[sl0]
        c1 = np.einsum("...i,...ij->...j", c[sl1], Tm)
        dm1 = np.einsum("...i,...ij->...j", dm[sl1], Tm)
        dn1 = np.einsum("...i,...ij->...j", dn[sl1], Tm)
        r0 = normalized_det(c[sl0], c1, dm[sl0], dn[sl0])
        r1 = normalized_det(c[sl0], c1, dm1, dn1)
        res = np.abs(np.stack([r0, r1], axis=-1))
        on_edge = np.abs(edge_label[sl0][..., 0]) <= GUARD * np.abs(edge_label[sl0][..., 1])
        res[on_edge] = np.nan
        out[key] = res
    lt = lattice
    m, n = env.mu, env.nu
    with np.errstate(divide="ignore", invalid="ignore"):
        al, f, gb, T, b = lt.alpha[:-1], lt.f[:-1], (lt.g / lt.b)[:-1], lt.T[:-1], lt.b[:-1]
        m0, m1, n0, n1 = m[:-1], m[1:], n[:-1], n[1:]
        e1 = (m1 - m0) * (n1 + al**2 / n0 + al * f)
        s1 = (np.abs(m1) + np.abs(m0)) * (np.abs(n1) + al**2 / np.abs(n0) + np.abs(al * f))
        e2 = (m0 - gb) * (m1 - gb) - T / b**2
        s2 = (np.abs(m0) + np.abs(gb)) * (np.abs(m1) + np.abs(gb)) + np.abs(T) / b**2
        out["munu1"] = np.stack([np.abs(e1) / s1, np.abs(e2) / s2], axis=-1)
        alb, fb = lt.alpha_bar[:, :-1], lt.f_bar[:, :-1]
        gbb, Tb, bb = (lt.g_bar / lt.b_bar)[:, :-1], lt.T_bar[:, :-1], lt.b_bar[:, :-1]
        m0, m1, n0, n1 = m[:, :-1], m[:, 1:], n[:, :-1], n[:, 1:]
        e1 = (n1 - n0) * (m1 + alb**2 / m0 + alb * fb)
        s1 = (np.abs(n1) + np.abs(n0)) * (np.abs(m1) + alb**2 / np.abs(m0) + np.abs(alb * fb))
        e2 = (n0 - gbb) * (n1 - gbb) - Tb / bb**2
        s2 = (np.abs(n0) + np.abs(gbb)) * (np.abs(n1) + np.abs(gbb)) + np.abs(Tb) / bb**2
        out["munu2"] = np.stack([np.abs(e1) / s1, np.abs(e2) / s2], axis=-1)
    return out


@dataclass
class QRuling:
    """Ruling labels of a (semi-)Q surface: ``m`` over n2 and ``n`` over n1 (either may be None)."""

    m: np.ndarray | None
    n: np.ndarray | None


def q_surface_residuals(lattice: GmcLattice, ruling: QRuling, nu_fill: float = 1.0, mu_fill: float = 1.0) -> dict:
    """Residuals of the Q-surface constraints and straightness of the rulings.

    ``generator_1`` holds ``b m^2 - 2 g m - a`` per site (relative), ``generator_2`` the
    barred analogue.  ``line1`` is the relative third singular value of each
    consecutive triple along n1 of the envelope with ``mu = m(n2)`` (any nu,
    default ``nu_fill``), expressed in the frame of the first point; ``line2``
    likewise along n2.
    """
    n1, n2 = lattice.shape
    L, M = transition_matrices(lattice)
    out: dict[str, np.ndarray] = {}
    if ruling.m is not None:
        m = np.asarray(ruling.m, dtype=float)
        if m.shape != (n2,):
            raise DimensionMismatch(f"m must have length n2 = {n2}")
        lt = lattice
        num = lt.b * m**2 - 2 * lt.g * m - lt.a
        out["generator_1"] = np.abs(num) / (np.abs(lt.b) * m**2 + 2 * np.abs(lt.g * m) + np.abs(lt.a))
        labels_mu = np.broadcast_to(m[None, :], (n1, n2))
        env = EnvelopeField.from_values(labels_mu, np.full((n1, n2), nu_fill))
        out["line1"] = _collinearity(env.local_coords(), L, axis=0)
    if ruling.n is not None:
        n = np.asarray(ruling.n, dtype=float)
        if n.shape != (n1,):
            raise DimensionMismatch(f"n must have length n1 = {n1}")
        lt = lattice
        num = lt.b_bar * n[:, None] ** 2 - 2 * lt.g_bar * n[:, None] - lt.a_bar
        out["generator_2"] = np.abs(num) / (
            np.abs(lt.b_bar) * n[:, None] ** 2 + 2 * np.abs(lt.g_bar * n[:, None]) + np.abs(lt.a_bar)
        )
        labels_nu = np.broadcast_to(n[:, None], (n1, n2))
        env = EnvelopeField.from_values(np.full((n1, n2), mu_fill), labels_nu)
        out["line2"] = _collinearity(env.local_coords(), M, axis=1)
    return out


def _collinearity(c: np.ndarray, T: np.ndarray, axis: int) -> np.ndarray:
    if axis == 1:
        c, T = np.swapaxes(c, 0, 1), np.swapaxes(T, 0, 1)
    k = c.shape[0]
    res = np.full((max(k - 2, 0),) + c.shape[1:-1], np.nan)
    for i in range(k - 2):
        p0 = c[i]
        p1 = np.einsum("...i,...ij->...j", c[i + 1], T[i])
        p2 = np.einsum("...i,...ij->...j", np.einsum("...i,...ij->...j", c[i + 2], T[i + 1]), T[i])
        pts = np.stack([p0, p1, p2], axis=-2)
        pts = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
        s = np.linalg.svd(pts, compute_uv=False)
        res[i] = s[..., 2] / s[..., 0]
    return np.swapaxes(res, 0, 1) if axis == 1 else res
