"""Acceptance suite.

Each test checks one criterion at its stated tolerance and prints a single
``PASS`` or ``FAIL`` line (visible under ``pytest -v``) before asserting.
"""

import os

import numpy as np
import pytest

from conftest import demoulin_axis_data
from prodisc import backlund as bk
from prodisc import cli
from prodisc import demoulin as dm
from prodisc import envelopes as ev
from prodisc import gmc
from prodisc import tzitzeica as tz

CONFIGS = os.path.join(os.path.dirname(__file__), os.pardir, "configs")


@pytest.fixture
def verdict(capsys):
    def emit(number, title, checks):
        """checks: list of (label, value, bound, upper)."""
        ok = True
        parts = []
        for label, value, bound, upper in checks:
            good = bool(np.isfinite(value) and (value <= bound if upper else value >= bound))
            ok &= good
            rel = "<=" if upper else ">="
            parts.append(f"{label}={value:.3g}{rel}{bound:g}{'' if good else ' (!)'}")
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: " + ", ".join(parts))
        assert ok, f"criterion {number} failed"

    return emit


def nanmax(x):
    return float(np.nanmax(x))


def test_criterion_01_frame_compatibility(generic16, verdict):
    checks = []
    for lam in (0.5, 1.0, 2.0):
        _, res = gmc.build_frames(generic16, None, lam)
        checks.append((f"face[lam={lam:g}]", nanmax(res), 1e-9, True))
    cu, cb = gmc.generic_cauchy_data(16, 16, np.random.default_rng(11))
    nonminimal = gmc.evolve_asymptotic(cu, cb, 0.01)
    checks.append(("nonminimal face[lam=2]", nanmax(gmc.face_residual_local(nonminimal, 2.0)), 1e-3, False))
    verdict(1, "frame compatibility", checks)


def test_criterion_02_determinant_law(generic16, generic32, gr16, demoulin17, tz16, verdict):
    lattices = {"generic16": generic16, "generic32": generic32, "gr16": gr16}
    lattices["demoulin"] = dm.gauge_to_canonical(demoulin17)[1]
    lattices["tzitzeica"] = dm.gauge_to_canonical(tz16)[1]
    dl = dm_ = dp = 0.0
    for lat in lattices.values():
        for lam in (0.5, 1.0, 2.0):
            d1, d2 = gmc.transition_determinants(lat, lam)
            dl = max(dl, nanmax(np.abs(d1 - 1)))
            dm_ = max(dm_, nanmax(np.abs(d2 - 1)))
        P, _ = gmc.reduced_matrices_inf(lat)
        scale = np.abs(lat.a * lat.b) + lat.g**2
        dp = max(dp, nanmax(np.abs(np.linalg.det(P) + lat.T) / scale))
    verdict(2, "determinant law", [("|det L-1|", dl, 1e-12, True), ("|det M-1|", dm_, 1e-12, True),
                                   ("|det P+T|", dp, 1e-12, True)])


def test_criterion_03_minimality_conservation(generic32, verdict):
    T, Tb = generic32.T, generic32.T_bar
    dev = np.max(np.abs(T - T[:, :1])) / np.max(np.abs(T))
    devb = np.max(np.abs(Tb - Tb[:1])) / np.max(np.abs(Tb))
    verdict(3, "minimality conservation", [
        ("T drift", dev, 1e-9, True), ("T_bar drift", devb, 1e-9, True),
        ("Teqn", nanmax(gmc.teqn_residual(generic32)), 1e-9, True),
    ])


def test_criterion_04_envelope_tangency(generic32, verdict):
    env = ev.build_envelope_generic(generic32, 0.5, 0.5)
    t = ev.tangency_residuals(generic32, env)
    ri, _ = gmc.reduced_system_inf(generic32, [1.0, 0.3])
    rz, _ = gmc.reduced_system_zero(generic32, [1.0, -0.4])
    eq = ev.riccati_linear_equivalence(generic32, ri, rz)
    verdict(4, "envelope tangency", [("det1", nanmax(t["det1"]), 1e-9, True), ("det2", nanmax(t["det2"]), 1e-9, True),
                                     ("riccati/linear", eq, 1e-10, True)])


def test_criterion_05_envelope_coincidence(gr16, demoulin17, verdict):
    shifted, plain = ev.build_envelopes_gr(gr16, 0.5)
    d = ev.shift_coincidence(gr16, shifted, plain, 1)
    _, states, _ = dm.gauge_to_canonical(demoulin17)
    dem = ev.demoulin_coincidence(states, ev.build_envelopes_demoulin(states))
    verdict(5, "envelope coincidence", [("Godeaux-Rozet shift", nanmax(d), 1e-9, True),
                                        ("interior sites", float(np.isfinite(d).sum()), 15 * 16, False),
                                        ("Demoulin four-envelope", dem, 1e-9, True)])


def test_criterion_06_demoulin_constants(verdict):
    checks = []
    for c in ((-1.0, -1.0, 0.0, 0.0), (2.0, 2.0, 0.5, 1.5)):
        h, k, a, q = c
        lat = dm.dem_evolve(*(np.full(32, v) for v in (h, k, h, k, a, q)))
        dev = max(nanmax(np.abs(getattr(lat, n) - v)) for n, v in zip("HKAQ", c))
        checks.append((f"drift{c}", dev, 1e-12, True))
    verdict(6, "Demoulin constants", checks)


def test_criterion_07_gauge(demoulin17, verdict):
    _, states, rep = dm.gauge_to_canonical(demoulin17)
    assert states.shape == (16, 16)
    verdict(7, "gauge correctness", [("T/scale", rep["t_zero"], 1e-10, True), ("off-pattern", rep["pattern"], 1e-10, True)])


def test_criterion_08_continuum_limit(verdict):
    rows = dm.continuum_convergence(
        lambda x, y: 2 + np.sin(x + 2 * y),
        lambda x, y: 1.5 + np.cos(x * y),
        lambda x, y: 0.3 + 0.2 * np.sin(3 * x),
        lambda x, y: 0.4 + 0.1 * np.cos(2 * y),
    )
    defects = [r["defect"] for r in rows]
    drops = min(a - b for a, b in zip(defects, defects[1:]))
    verdict(8, "continuum limit", [("halvings", float(len(rows) - 1), 4, False), ("min decrease", drops, 0.0, False),
                                   ("min order", min(r["order"] for r in rows[1:]), 0.9, False)])


def test_criterion_09_backlund_closure(constant14, verdict):
    ms = bk.plane_wave_modes(2.0, 0.5, 1.5, 1.0)
    pick = lambda r, real: [m for m in ms if m.r == r and m.is_real == real][0]
    fa, fb, fd = (m.fields(14, 14) for m in (pick(1, True), pick(-1, True), pick(-1, False)))
    base = [(fa[i] + 0.2 * fb[i] + 0.3 * fd[i]).real for i in (0, 1)]
    _, phi0, psi0 = bk.constraint_seed(constant14, base[0], base[1], fb[0].real, fb[1].real)
    admissibility, _ = bk.admissibility_constant(constant14, phi0, psi0)
    phi, psi = bk.linear_propagate(constant14, 2.0, np.random.default_rng(5).normal(size=(3, 2, 6)))
    res = bk.backlund_apply(constant14, phi0, psi0, phi, psi, 2.0, 1.0)
    rep = res.report
    assert res.lattice.shape == (12, 12)
    verdict(9, "Backlund closure", [
        ("|admissibility|", abs(admissibility), 1e-10, True),
        ("demoulin+compatibility+bp_relation", rep["demoulin"] + rep["compatibility"] + rep["bp_relation"], 1e-8, True),
        ("range H'", float(np.ptp(res.lattice.H)), 1e-6, False),
        ("potentials", rep["potentials"], 1e-9, True),
    ])


def test_criterion_10_tau_layer(tz16, verdict):
    field = tz.tau_from_solution(tz16, 1.0, 0.8, 1.3, s=0.07, s_bar=-0.13)
    rec = tz.recover_from_tau(field)
    rt = max(nanmax(np.abs(rec[k][:16, :16] - getattr(tz16, k)) / np.abs(getattr(tz16, k))) for k in "HAQ")
    ident = nanmax(tz.tau_identity_residual(field, "cube"))
    _, states, _ = dm.gauge_to_canonical(tz16)
    _, rep = tz.tau_layer_canonical(states)
    # the two-component system carries no first integrals, so tau = sigma
    # reproduces the one-component identity in the gauge s = s_bar = 1; tau
    # then grows too fast for 16 x 16, so use the 8 x 8 corner
    H_row, _, H_col, _, A_row, Q_col = demoulin_axis_data(8, 1, tzitzeica=True)
    small = tz.tz_evolve(H_row, H_col, A_row, Q_col)
    unit = tz.tau_from_solution(small, 1.0, 0.8, 1.3, s=1.0, s_bar=1.0)
    two = bk.tau_sigma_residuals(bk.TauSigmaField(unit.tau, unit.tau))
    one = tz.tau_identity_residual(unit, "terms")
    coupling = max(np.max(np.abs(two["coupling_1"])), np.max(np.abs(two["coupling_2"])))
    two_ident = max(nanmax(two["identity_1"]), nanmax(two["identity_2"]))
    verdict(10, "tau layer", [
        ("round trip", rt, 1e-9, True), ("identity/|tau12|^3", ident, 1e-9, True),
        ("s drift", rep["s_dev"], 1e-10, True), ("s_bar drift", rep["s_bar_dev"], 1e-10, True),
        ("coupling[tau=sigma]", float(coupling), 0.0, True),
        ("two-component identity[tau=sigma]", two_ident, 1e-9, True), ("identity terms", nanmax(one), 1e-9, True),
    ])


def test_criterion_11_affine_spheres(tz16, verdict):
    F, _, _ = tz.scaled_frame(tz16)
    ra, rep = tz.affine_spheres(tz16, F)
    assert ra.shape == (16, 16, 3)
    verdict(11, "affine spheres", [("conserved vector", rep["c_deviation"], 1e-9, True)]
            + [(k, rep[k], 1e-9, True) for k in ("affine_1", "affine_2", "affine_3")])


def test_criterion_12_cli_determinism(tmp_path, verdict):
    mismatched = 0.0
    compared = 0
    for mode in ("evolve", "export"):
        outs = [str(tmp_path / f"{mode}{i}") for i in range(2)]
        for out in outs:
            assert cli.run(mode, os.path.join(CONFIGS, f"{mode}.json"), out, seed=42) == cli.EXIT_OK
        names = sorted(os.listdir(outs[0]))
        assert any(n.endswith(".obj") for n in names) and sorted(os.listdir(outs[1])) == names
        for n in names:
            blobs = [open(os.path.join(o, n), "rb").read() for o in outs]
            compared += 1
            mismatched += blobs[0] != blobs[1]
    verdict(12, "CLI determinism", [("differing files", mismatched, 0.0, True), ("files compared", float(compared), 4, False)])
