"""Command line entry point: ``prodisc <mode> --config <path> [options]``."""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any

import numpy as np

from . import backlund as bk
from . import demoulin as dm
from . import envelopes as env
from . import gmc
from . import io
from . import tzitzeica as tz
from .errors import MathError, NotApplicable, SchemaError

EXIT_OK, EXIT_CONFIG, EXIT_MATH, EXIT_RESIDUAL = 0, 2, 3, 4
DEFAULT_OUT = "prodisc-out"

# unit-determinant seed frame whose rows have no zero coordinate, so every
# chart of the exported surface contains the origin of the lattice
SURFACE_SEED = (np.eye(4) + 0.5) / 3**0.25


class Run:
    """Collects residual suites, info, warnings and output files of one run."""

    def __init__(self, config: io.RunConfig, tol: float):
        self.config = config
        self.tol = tol
        self.suites: dict[str, dict] = {}
        self.info: dict[str, Any] = {}
        self.warnings: list[str] = []
        self.files: dict[str, str] = {}

    def check(self, name: str, values, tol: float | None = None, upper: bool = True) -> None:
        self.suites[name] = io.suite(values, self.tol if tol is None else tol, upper=upper)

    def obj(self, name: str, points, chart: int | None = None) -> None:
        text, warns = io.export_obj(points, self.config.chart if chart is None else chart)
        self.files[name] = text
        self.warnings.extend(f"{name}: {w}" for w in warns)


def _cauchy(run: Run) -> tuple[np.ndarray, np.ndarray]:
    cfg = run.config
    if cfg.cauchy == "generic-random":
        return gmc.generic_cauchy_data(cfg.n1, cfg.n2, io.block_rng(cfg.seed, "cauchy"))
    cu = np.stack([io.field_array(cfg, k, 1) for k in io.AXIS_UNBARRED], axis=-1)
    cb = np.stack([io.field_array(cfg, k, 2) for k in io.AXIS_BARRED], axis=-1)
    return cu, cb


def _evolved(run: Run) -> gmc.GmcLattice:
    cu, cb = _cauchy(run)
    lat = gmc.evolve(cu, cb, run.config.cls, run.config.branch, run.tol)
    run.info["class"] = gmc.classify(lat, run.tol).value
    return lat


def _surface(lat: gmc.GmcLattice, lam: float) -> np.ndarray:
    frames, _ = gmc.build_frames(lat, SURFACE_SEED, lam)
    return frames[..., 0, :]


def mode_evolve(run: Run) -> None:
    lam = run.config.lam
    lat = _evolved(run)
    dT, dTb = gmc.minimality_deviation(lat)
    run.check("minimality_T", dT)
    run.check("minimality_T_bar", dTb)
    run.check("teqn", gmc.teqn_residual(lat))
    dL, dM = gmc.transition_determinants(lat, lam)
    run.check("det_L", np.abs(dL - 1))
    run.check("det_M", np.abs(dM - 1))
    run.check("frame_compatibility", gmc.face_residual_local(lat, lam))
    run.files["lattice.json"] = io.lattice_to_json(lat.fields())
    run.obj("surface.obj", _surface(lat, lam))


def mode_envelopes(run: Run) -> None:
    lat = _evolved(run)
    opts = run.config.options.get("envelope", {})
    field = env.build_envelope_generic(lat, opts.get("mu0", 0.5), opts.get("nu0", 0.5), run.tol)
    for k, v in env.tangency_residuals(lat, field).items():
        run.check(f"tangency_{k}", v)
    mu, nu = env.riccati_compatibility(lat, field)
    run.check("riccati_mu", mu)
    run.check("riccati_nu", nu)
    frames, _ = gmc.build_frames(lat, SURFACE_SEED, run.config.lam)
    run.files["envelope.json"] = io.lattice_to_json({"mu": field.mu, "nu": field.nu})
    run.obj("envelope.obj", field.points(frames))
    run.obj("surface.obj", frames[..., 0, :])


def _dem_checks(run: Run, lat: dm.DemoulinLattice) -> None:
    res = dm.dem_residuals(lat)
    for k, v in res.items():
        run.check(f"dem_{k}", v)
    B, P = bk.bp_of(lat)
    run.check("bp_relation", bk.bp_relation_residual(lat, B, P))


def _axis_fields(cfg: io.RunConfig) -> dict[str, np.ndarray]:
    """Axis data of the Demoulin-type modes with a shared origin value.

    A generated column block takes its first entry from the row block; an
    explicit column must agree there already.
    """
    f = {k: io.field_array(cfg, k, ax) for k, ax in io.REQUIRED_DATA[cfg.mode].items()}
    for name in ("H", "K"):
        row, col = f"{name}_row", f"{name}_col"
        if row not in f:
            continue
        if isinstance(cfg.data[col], list):
            if f[col][0] != f[row][0]:
                raise SchemaError(f"{col} and {row} disagree at the origin", f"/data/{col}/0")
        else:
            f[col][0] = f[row][0]
    return f


def mode_demoulin(run: Run) -> None:
    cfg = run.config
    f = _axis_fields(cfg)
    lat = dm.dem_evolve(f["H_row"], f["K_row"], f["H_col"], f["K_col"], f["A_row"], f["Q_col"], run.tol)
    _dem_checks(run, lat)
    chi, chib = dm.chi_fields(lat, run.tol)
    run.check("chi_relation", dm.chi_relation_residual(lat, chi, chib))
    frames, face = dm.wilczynski_frames(lat, SURFACE_SEED, cfg.lam, run.tol)
    run.check("frame_compatibility", face)
    _, states, rep = dm.gauge_to_canonical(lat, tol=run.tol)
    run.check("gauge_xi_path", rep["xi_path"])
    run.check("gauge_t_zero", rep["t_zero"])
    run.check("gauge_pattern", rep["pattern"])
    run.info["gauge_branch"] = int(states.branch)
    run.files["lattice.json"] = io.lattice_to_json(lat.fields())
    run.obj("surface.obj", frames[..., 0, :])


def mode_verify(run: Run) -> None:
    cfg = run.config
    f = {k: io.field_array(cfg, k, 0) for k in ("H", "K", "A", "Q")}
    _dem_checks(run, dm.DemoulinLattice(**f))


def mode_tzitzeica(run: Run) -> None:
    cfg = run.config
    f = _axis_fields(cfg)
    lat = tz.tz_evolve(f["H_row"], f["H_col"], f["A_row"], f["Q_col"], run.tol)
    _dem_checks(run, lat)
    frames, _, rep = tz.scaled_frame(lat, tol=run.tol)
    run.check("frame_difference", rep["frame_difference"])
    run.check("second_order", rep["second_order"])
    ra, arep = tz.affine_spheres(lat, frames, cfg.chart, run.tol)
    for k, v in arep.items():
        run.check(k, v)
    opts = cfg.options.get("tau")
    if opts is not None:
        seeds = [opts.get(k, 1.0) for k in ("tau00", "tau10", "tau01")]
        field = tz.tau_from_solution(lat, *seeds, opts.get("s", 1.0), opts.get("s_bar", 1.0), run.tol)
        rec = tz.recover_from_tau(field)
        n1, n2 = lat.shape
        for k in ("H", "A", "Q"):
            given = getattr(lat, k)
            run.check(f"tau_recover_{k}", np.abs(rec[k][:n1, :n2] - given) / np.abs(given))
        run.check("tau_identity", tz.tau_identity_residual(field, "terms"))
    run.files["lattice.json"] = io.lattice_to_json(lat.fields())
    run.obj("affine.obj", ra)


def _backlund_modes(h: float, a: float, q: float, lam0: float):
    modes = bk.plane_wave_modes(h, a, q, lam0)
    pick = {}
    for key, r, real in (("a", 1, True), ("b", -1, True), ("d", -1, False)):
        found = [m for m in modes if m.r == r and m.is_real == real]
        if not found:
            raise NotApplicable(f"no {'real' if real else 'complex'} plane wave with psi = {r:+d} phi")
        pick[key] = found[0]
    return pick


def mode_backlund(run: Run) -> None:
    cfg = run.config
    lat = dm.DemoulinLattice(**{k: io.field_array(cfg, k, 0) for k in ("H", "K", "A", "Q")})
    h, a, q = bk.require_constant_lattice(lat, run.tol)
    opts = cfg.options.get("backlund", {})
    mix = opts.get("mix", 0.3)
    n1, n2 = lat.shape
    m = {k: v.fields(n1, n2) for k, v in _backlund_modes(h, a, q, cfg.lam0).items()}
    if opts.get("family", True):
        base_phi = (m["a"][0] + 0.2 * m["b"][0] + mix * m["d"][0]).real
        base_psi = (m["a"][1] + 0.2 * m["b"][1] + mix * m["d"][1]).real
        t, phi0, psi0 = bk.constraint_seed(lat, base_phi, base_psi, m["b"][0].real, m["b"][1].real, tol=run.tol)
        run.info["family_parameter"] = t
    else:
        phi0 = (m["a"][0] + mix * m["b"][0]).real
        psi0 = (m["a"][1] + mix * m["b"][1]).real
    seeds = io.block_rng(cfg.seed, "backlund").normal(size=(3, 2, 6))
    phi, psi = bk.linear_propagate(lat, cfg.lam, seeds, tol=run.tol)
    res = bk.backlund_apply(lat, phi0, psi0, phi, psi, cfg.lam, cfg.lam0, tol=run.tol)
    for k, v in res.report.items():
        run.check(k, v)
    Hp = res.lattice.H
    run.info["H_prime_range"] = [float(Hp.min()), float(Hp.max())]
    run.files["lattice.json"] = io.lattice_to_json({**res.lattice.fields(), "B": res.B, "P": res.P})


def default_limit_seed():
    """Smooth generic seed for the continuum check."""
    return (
        lambda x, y: 2 + np.sin(x + 2 * y),
        lambda x, y: 1.5 + np.cos(x * y),
        lambda x, y: 0.3 + 0.2 * np.sin(3 * x),
        lambda x, y: 0.4 + 0.1 * np.cos(2 * y),
    )


def mode_limit(run: Run) -> None:
    eps = run.config.options.get("limit", {}).get("eps")
    rows = dm.continuum_convergence(*default_limit_seed(), eps_list=eps)
    defects = np.array([r["defect"] for r in rows])
    orders = np.array([r["order"] for r in rows[1:]])
    run.info["rows"] = rows
    run.suites["monotone"] = {
        "max": float(np.max(defects[1:] / defects[:-1])),
        "mean": None,
        "worst_site": None,
        "tolerance": 1.0,
        "pass": bool(np.all(np.diff(defects) < 0)),
    }
    run.check("min_order", float(np.min(orders)), tol=0.9, upper=False)


def mode_export(run: Run) -> None:
    cfg = run.config
    if cfg.input is not None:
        try:
            with open(cfg.input, encoding="utf-8") as fh:
                fields = io.lattice_from_json(fh.read())
        except OSError as exc:
            raise SchemaError(f"cannot read input: {exc.strerror}", "/input") from None
        names = [k for k in ("x0", "x1", "x2", "x3") if k in fields] or [k for k in ("x", "y", "z") if k in fields]
        if len(names) not in (3, 4):
            raise SchemaError("input needs fields x0..x3 or x, y, z", "/input")
        run.obj("surface.obj", np.stack([fields[k] for k in names], axis=-1))
    else:
        run.obj("surface.obj", _surface(_evolved(run), cfg.lam))


MODES = {
    "evolve": mode_evolve,
    "demoulin": mode_demoulin,
    "tzitzeica": mode_tzitzeica,
    "envelopes": mode_envelopes,
    "backlund": mode_backlund,
    "verify": mode_verify,
    "limit": mode_limit,
    "export": mode_export,
}


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= io.U64_MAX:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="prodisc", description="Discrete projective minimal surfaces.")
    p.add_argument("mode", choices=list(MODES))
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="output directory")
    p.add_argument("--tol", type=float, help="relative tolerance (overrides config and PRODISC_TOL)")
    p.add_argument("--seed", type=_u64, help="seed for random generators")
    p.add_argument("--lambda", dest="lam", type=float, help="spectral parameter")
    p.add_argument("--lambda0", dest="lam0", type=float, help="spectral parameter of the eigenfunction")
    return p


def _error_dict(exc: Exception) -> dict:
    out = {"type": type(exc).__name__, "message": str(exc)}
    if getattr(exc, "site", None) is not None:
        out["site"] = [int(s) for s in exc.site]
    if isinstance(exc, SchemaError):
        out["path"] = exc.path
    return out


def run(mode: str, config_path: str, out: str | None = None, tol: float | None = None,
        seed: int | None = None, lam: float | None = None, lam0: float | None = None) -> int:
    """Execute one run, write its artifacts and report, and return the exit code."""
    config, run_ = None, None
    out_dir = out
    tol_used = None
    try:
        try:
            with open(config_path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read config: {exc.strerror}", "") from None
        config = io.parse_config(text, mode)
        out_dir = out or config.out_dir
        if seed is not None:
            config.seed = seed
        if lam is not None:
            config.lam = lam
        if lam0 is not None:
            config.lam0 = lam0
        for value, path in ((config.lam, "/lambda"), (config.lam0, "/lambda0")):
            if value == 0 or not np.isfinite(value):
                raise SchemaError("must be finite and nonzero", path)
        tol_used = io.resolve_tolerance(tol, config)
        config.tolerance = tol_used
        run_ = Run(config, tol_used)
        with np.errstate(all="ignore"):
            MODES[mode](run_)
        error, code = None, EXIT_OK
    except SchemaError as exc:
        error, code = _error_dict(exc), EXIT_CONFIG
    except MathError as exc:
        error, code = _error_dict(exc), EXIT_MATH
    if tol_used is None:
        tol_used = io.DEFAULT_TOL
    suites = run_.suites if run_ else {}
    report = io.build_report(
        config, tol_used, suites,
        info=run_.info if run_ else None,
        error=error,
        warnings=run_.warnings if run_ else None,
        artifacts=list(run_.files) if run_ and error is None else None,
    )
    if code == EXIT_OK and not report["pass"]:
        code = EXIT_RESIDUAL
    report["exit_code"] = code
    out_dir = out_dir or DEFAULT_OUT
    os.makedirs(out_dir, exist_ok=True)
    if run_ and error is None:
        for name, text in run_.files.items():
            io.write_text(os.path.join(out_dir, name), text)
    io.write_text(os.path.join(out_dir, "report.json"), io.report_to_json(report))
    for name, s in sorted(suites.items()):
        status = "PASS" if s["pass"] else "FAIL"
        print(f"{status} {name} max={s['max']!r} tol={s['tolerance']!r}")
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    if error is not None:
        print(f"error: {error['type']}: {error['message']}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(args.mode, args.config, args.out, args.tol, args.seed, args.lam, args.lam0)


if __name__ == "__main__":
    sys.exit(main())
