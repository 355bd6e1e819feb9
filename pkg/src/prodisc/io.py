"""Configuration, lattice JSON, OBJ export and verification reports."""

from __future__ import annotations

import hashlib
import json
import os
import zlib
from dataclasses import dataclass, field
from typing import Any

import jsonschema
import numpy as np

from .errors import DimensionMismatch, EmptyMesh, SchemaError
from .lattice import DEFAULT_TOL, GUARD

MODES = ("evolve", "demoulin", "tzitzeica", "envelopes", "backlund", "verify", "limit", "export")
CLASSES = ("Generic", "GodeauxRozetT0", "GodeauxRozetTbar0", "Demoulin", "Tzitzeica")
U64_MAX = 2**64 - 1

_BLOCK = {
    "oneOf": [
        {"type": "array", "items": {"type": "number"}, "minItems": 1},
        {
            "type": "object",
            "properties": {"generator": {"const": "constant"}, "value": {"type": "number"}},
            "required": ["generator", "value"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "generator": {"const": "linear-ramp"},
                "start": {"type": "number"},
                "step": {"type": "number"},
                "step2": {"type": "number"},
            },
            "required": ["generator", "start", "step"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "generator": {"const": "random"},
                "low": {"type": "number"},
                "high": {"type": "number"},
            },
            "required": ["generator", "low", "high"],
            "additionalProperties": False,
        },
    ]
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "mode": {"enum": list(MODES)},
        "grid": {
            "type": "object",
            "properties": {"n1": {"type": "integer", "minimum": 1}, "n2": {"type": "integer", "minimum": 1}},
            "required": ["n1", "n2"],
            "additionalProperties": False,
        },
        "class": {"enum": list(CLASSES)},
        "cauchy": {"enum": ["explicit", "generic-random"]},
        "data": {"type": "object", "additionalProperties": _BLOCK},
        "lambda": {"type": "number", "not": {"const": 0}},
        "lambda0": {"type": "number", "not": {"const": 0}},
        "branch": {"enum": [-1, 1]},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer", "minimum": 0, "maximum": U64_MAX},
        "chart": {"type": "integer", "minimum": 0, "maximum": 3},
        "envelope": {
            "type": "object",
            "properties": {"mu0": {"type": "number"}, "nu0": {"type": "number"}},
            "additionalProperties": False,
        },
        "tau": {
            "type": "object",
            "properties": {k: {"type": "number"} for k in ("tau00", "tau10", "tau01", "s", "s_bar")},
            "additionalProperties": False,
        },
        "backlund": {
            "type": "object",
            "properties": {"family": {"type": "boolean"}, "mix": {"type": "number"}},
            "additionalProperties": False,
        },
        "limit": {
            "type": "object",
            "properties": {"eps": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2}},
            "additionalProperties": False,
        },
        "input": {"type": "string"},
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "required": ["grid"],
    "additionalProperties": False,
}

AXIS_UNBARRED = ("alpha", "a", "b", "f", "g")
AXIS_BARRED = ("alpha_bar", "a_bar", "b_bar", "f_bar", "g_bar")

# data blocks each mode reads, with the axis they live on: 1 (length n1), 2 (length n2) or 0 (n1 x n2)
REQUIRED_DATA = {
    "evolve": {**{k: 1 for k in AXIS_UNBARRED}, **{k: 2 for k in AXIS_BARRED}},
    "envelopes": {**{k: 1 for k in AXIS_UNBARRED}, **{k: 2 for k in AXIS_BARRED}},
    "export": {**{k: 1 for k in AXIS_UNBARRED}, **{k: 2 for k in AXIS_BARRED}},
    "demoulin": {"H_row": 1, "K_row": 1, "A_row": 1, "H_col": 2, "K_col": 2, "Q_col": 2},
    "tzitzeica": {"H_row": 1, "A_row": 1, "H_col": 2, "Q_col": 2},
    "verify": {"H": 0, "K": 0, "A": 0, "Q": 0},
    "backlund": {"H": 0, "K": 0, "A": 0, "Q": 0},
    "limit": {},
}


def _pointer(parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


@dataclass
class RunConfig:
    """Validated run configuration.  ``data`` holds the raw blocks; see :func:`materialize`."""

    mode: str
    n1: int
    n2: int
    cls: str = "Generic"
    cauchy: str = "explicit"
    data: dict[str, Any] = field(default_factory=dict)
    lam: float = 1.0
    lam0: float = 1.0
    branch: int = 1
    tolerance: float | None = None
    seed: int = 0
    chart: int = 3
    options: dict[str, Any] = field(default_factory=dict)
    input: str | None = None
    out_dir: str | None = None
    raw: dict[str, Any] = field(default_factory=dict)

    def canonical(self) -> dict[str, Any]:
        """Effective configuration as plain JSON (used for the provenance hash)."""
        return {
            "mode": self.mode,
            "grid": {"n1": self.n1, "n2": self.n2},
            "class": self.cls,
            "cauchy": self.cauchy,
            "data": self.data,
            "lambda": self.lam,
            "lambda0": self.lam0,
            "branch": self.branch,
            "tolerance": self.tolerance,
            "seed": self.seed,
            "chart": self.chart,
            "options": self.options,
            "input": self.input,
        }

    def config_hash(self) -> str:
        text = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Parse and validate a JSON configuration.

    ``mode`` (from the command line) takes precedence over a ``mode`` key.

    Raises
    ------
    SchemaError
        With the JSON pointer of the offending value; a missing key reports
        the pointer where it should have been, e.g. ``/grid/n1``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}", "") from None
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (list(map(str, e.absolute_path)), e.validator))
    if errors:
        err = errors[0]
        parts = list(err.absolute_path)
        if err.validator == "required":
            missing = [k for k in err.validator_value if k not in err.instance]
            parts.append(missing[0])
        raise SchemaError(err.message, _pointer(parts))
    mode = mode or doc.get("mode")
    if mode is None:
        raise SchemaError("mode is required", "/mode")
    if mode not in MODES:
        raise SchemaError(f"unknown mode {mode!r}", "/mode")
    data = doc.get("data", {})
    cauchy = doc.get("cauchy", "explicit")
    needed = REQUIRED_DATA[mode]
    if cauchy == "generic-random" and mode in ("evolve", "envelopes", "export"):
        needed = {}
    if mode == "export" and "input" in doc:
        needed = {}
    for name in needed:
        if name not in data:
            raise SchemaError(f"data block {name!r} is required for mode {mode}", f"/data/{name}")
    n1, n2 = doc["grid"]["n1"], doc["grid"]["n2"]
    for name, block in data.items():
        if isinstance(block, list):
            axis = needed.get(name, 0)
            size = {0: n1 * n2, 1: n1, 2: n2}[axis]
            if len(block) != size:
                raise SchemaError(f"expected {size} values, got {len(block)}", f"/data/{name}")
    options = {k: doc[k] for k in ("envelope", "tau", "backlund", "limit") if k in doc}
    return RunConfig(
        mode=mode,
        n1=n1,
        n2=n2,
        cls=doc.get("class", "Demoulin" if mode in ("demoulin", "verify") else "Generic"),
        cauchy=cauchy,
        data=data,
        lam=float(doc.get("lambda", 1.0)),
        lam0=float(doc.get("lambda0", 1.0)),
        branch=int(doc.get("branch", 1)),
        tolerance=doc.get("tolerance"),
        seed=int(doc.get("seed", 0)),
        chart=int(doc.get("chart", 3)),
        options=options,
        input=doc.get("input"),
        out_dir=doc.get("output", {}).get("dir"),
        raw=doc,
    )


def resolve_tolerance(cli_tol: float | None, config: RunConfig | None) -> float:
    """Command line, then config, then ``PRODISC_TOL``, then the default."""
    if cli_tol is not None:
        tol, where = cli_tol, "/tolerance"
    elif config is not None and config.tolerance is not None:
        tol, where = config.tolerance, "/tolerance"
    elif os.environ.get("PRODISC_TOL"):
        try:
            tol = float(os.environ["PRODISC_TOL"])
        except ValueError:
            raise SchemaError("PRODISC_TOL is not a number", "/tolerance") from None
        where = "/tolerance"
    else:
        return DEFAULT_TOL
    if not np.isfinite(tol) or tol <= 0:
        raise SchemaError(f"tolerance must be positive, got {tol}", where)
    return float(tol)


def block_rng(seed: int, name: str) -> np.random.Generator:
    """Independent stream per data block so blocks do not depend on each other's order."""
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode())]))


def materialize(block, shape: tuple[int, ...], name: str, seed: int = 0) -> np.ndarray:
    """Turn a data block into an array of ``shape`` (1-D axis data or an n1 x n2 grid)."""
    if isinstance(block, list):
        arr = np.asarray(block, dtype=float)
        if arr.size != int(np.prod(shape)):
            raise SchemaError(f"expected {int(np.prod(shape))} values, got {arr.size}", f"/data/{name}")
        return arr.reshape(shape)
    gen = block["generator"]
    if gen == "constant":
        return np.full(shape, float(block["value"]))
    if gen == "linear-ramp":
        if len(shape) == 1:
            return block["start"] + block["step"] * np.arange(shape[0], dtype=float)
        i, j = np.meshgrid(np.arange(shape[0]), np.arange(shape[1]), indexing="ij")
        return block["start"] + block["step"] * i + block.get("step2", block["step"]) * j
    lo, hi = float(block["low"]), float(block["high"])
    if not lo <= hi:
        raise SchemaError("low must not exceed high", f"/data/{name}/low")
    return block_rng(seed, name).uniform(lo, hi, shape)


def field_array(config: RunConfig, name: str, axis: int) -> np.ndarray:
    shape = {0: (config.n1, config.n2), 1: (config.n1,), 2: (config.n2,)}[axis]
    return materialize(config.data[name], shape, name, config.seed)


# -- lattice JSON --------------------------------------------------------------------------


def _json_float(x: float):
    x = float(x)
    return x if np.isfinite(x) else None


def lattice_to_json(fields: dict[str, np.ndarray]) -> str:
    """Serialize equally shaped 2-D fields; NaN becomes ``null``."""
    if not fields:
        raise DimensionMismatch("no fields to serialize")
    shapes = {np.shape(v) for v in fields.values()}
    if len(shapes) != 1 or len(next(iter(shapes))) != 2:
        raise DimensionMismatch("fields must share one 2-D shape")
    n1, n2 = shapes.pop()
    doc = {
        "n1": int(n1),
        "n2": int(n2),
        "fields": {k: [_json_float(x) for x in np.asarray(v, dtype=float).ravel()] for k, v in fields.items()},
    }
    return json.dumps(doc, separators=(",", ":"), allow_nan=False) + "\n"


def lattice_from_json(text: str) -> dict[str, np.ndarray]:
    """Inverse of :func:`lattice_to_json` (``null`` becomes NaN)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", "") from None
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", "")
    for key in ("n1", "n2", "fields"):
        if key not in doc:
            raise SchemaError(f"missing {key}", f"/{key}")
    n1, n2 = doc["n1"], doc["n2"]
    for key, v in (("n1", n1), ("n2", n2)):
        if not isinstance(v, int) or isinstance(v, bool) or v < 1:
            raise SchemaError("must be a positive integer", f"/{key}")
    if not isinstance(doc["fields"], dict):
        raise SchemaError("must be an object", "/fields")
    out = {}
    for name, values in doc["fields"].items():
        path = _pointer(["fields", name])
        if not isinstance(values, list) or len(values) != n1 * n2:
            raise SchemaError(f"expected {n1 * n2} values", path)
        if any(v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))) for v in values):
            raise SchemaError("values must be numbers or null", path)
        out[name] = np.array([np.nan if v is None else v for v in values], dtype=float).reshape(n1, n2)
    return out


# -- OBJ export ------------------------------------------------------------------------------


def export_obj(points, chart: int = 3) -> tuple[str, list[str]]:
    """Quad mesh of a point lattice as OBJ text.

    Parameters
    ----------
    points : array_like, shape (n1, n2, 4) or (n1, n2, 3)
        Homogeneous points (dehomogenized in ``chart``) or affine points.
    chart : int
        Homogeneous coordinate divided out.

    Returns
    -------
    text : str
        ``v x y z`` lines in row-major order with 17 significant digits,
        then one ``f`` line per cell whose four corners were exported.
    warnings : list of str
        One entry per skipped vertex.

    Raises
    ------
    EmptyMesh
        If no vertex can be exported.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 3 or p.shape[-1] not in (3, 4):
        raise DimensionMismatch("points must have shape (n1, n2, 3) or (n1, n2, 4)")
    n1, n2 = p.shape[:2]
    if p.shape[-1] == 4:
        keep = [k for k in range(4) if k != chart]
        w = p[..., chart]
        ok = np.abs(w) > GUARD * np.linalg.norm(p, axis=-1)
        with np.errstate(divide="ignore", invalid="ignore"):
            xyz = p[..., keep] / w[..., None]
    else:
        xyz = p
        ok = np.ones((n1, n2), dtype=bool)
    ok &= np.all(np.isfinite(xyz), axis=-1)
    if not np.any(ok):
        raise EmptyMesh("no vertex survives the chart")
    index = np.zeros((n1, n2), dtype=int)
    lines, warnings = [], []
    count = 0
    for i in range(n1):
        for j in range(n2):
            if ok[i, j]:
                count += 1
                index[i, j] = count
                lines.append("v " + " ".join(format(float(c), ".17g") for c in xyz[i, j]))
            else:
                warnings.append(f"vertex ({i}, {j}) skipped: chart coordinate vanishes")
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
            if all(ok[c] for c in corners):
                lines.append("f " + " ".join(str(index[c]) for c in corners))
    return "\n".join(lines) + "\n", warnings


# -- reports -------------------------------------------------------------------------------


def suite(values, tol: float, *, upper: bool = True) -> dict[str, Any]:
    """Summary of a residual array: max, mean, worst site and pass flag.

    With ``upper=False`` the check is ``max >= tol`` (used for lower bounds).
    """
    arr = np.asarray(values, dtype=float)
    finite = np.isfinite(arr)
    if not np.any(finite):
        return {"max": None, "mean": None, "worst_site": None, "tolerance": tol, "pass": True}
    masked = np.where(finite, arr, -np.inf)
    flat = int(np.argmax(masked))
    site = [int(x) for x in np.unravel_index(flat, arr.shape)] if arr.ndim else []
    mx = float(arr.ravel()[flat])
    ok = mx <= tol if upper else mx >= tol
    return {
        "max": mx,
        "mean": float(np.mean(arr[finite])),
        "worst_site": site,
        "tolerance": tol,
        "pass": bool(ok),
    }


def build_report(
    config: RunConfig | None,
    tol: float,
    suites: dict[str, dict],
    info: dict | None = None,
    error: dict | None = None,
    warnings: list[str] | None = None,
    artifacts: list[str] | None = None,
) -> dict[str, Any]:
    passed = error is None and all(s["pass"] for s in suites.values())
    return {
        "mode": config.mode if config else None,
        "provenance": {
            "config_sha256": config.config_hash() if config else None,
            "seed": config.seed if config else None,
            "tolerance": tol,
        },
        "suites": suites,
        "info": info or {},
        "warnings": warnings or [],
        "artifacts": sorted(artifacts or []),
        "error": error,
        "pass": passed,
    }


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def report_to_json(report: dict) -> str:
    return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
