import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from prodisc import io
from prodisc.errors import EmptyMesh, SchemaError

MINIMAL = {
    "mode": "verify",
    "grid": {"n1": 2, "n2": 2},
    "data": {k: {"generator": "constant", "value": v} for k, v in zip("HKAQ", (2.0, 2.0, 0.5, 1.5))},
}


def parse(doc, mode=None):
    return io.parse_config(json.dumps(doc), mode)


def test_minimal_config():
    cfg = parse(MINIMAL)
    assert cfg.mode == "verify" and (cfg.n1, cfg.n2) == (2, 2)
    assert np.array_equal(io.field_array(cfg, "A", 0), np.full((2, 2), 0.5))


def test_missing_grid_dimension_pointer():
    doc = json.loads(json.dumps(MINIMAL))
    del doc["grid"]["n1"]
    with pytest.raises(SchemaError) as exc:
        parse(doc)
    assert exc.value.path == "/grid/n1"
    assert str(exc.value).startswith("/grid/n1")


def test_negative_tolerance():
    with pytest.raises(SchemaError) as exc:
        parse({**MINIMAL, "tolerance": -1e-9})
    assert exc.value.path == "/tolerance"


@pytest.mark.parametrize(
    "patch, path",
    [
        ({"grid": {"n1": 0, "n2": 2}}, "/grid/n1"),
        ({"mode": "fly"}, "/mode"),
        ({"seed": -1}, "/seed"),
        ({"seed": 2**64}, "/seed"),
        ({"branch": 0}, "/branch"),
        ({"bogus": 1}, ""),
    ],
)
def test_schema_pointers(patch, path):
    with pytest.raises(SchemaError) as exc:
        parse({**MINIMAL, **patch})
    assert exc.value.path == path


def test_missing_data_block():
    doc = json.loads(json.dumps(MINIMAL))
    del doc["data"]["Q"]
    with pytest.raises(SchemaError) as exc:
        parse(doc)
    assert exc.value.path == "/data/Q"


def test_explicit_block_length_checked():
    doc = {**MINIMAL, "data": {**MINIMAL["data"], "H": [2.0, 2.0, 2.0]}}
    with pytest.raises(SchemaError) as exc:
        parse(doc)
    assert exc.value.path == "/data/H"


def test_invalid_json():
    with pytest.raises(SchemaError):
        io.parse_config("{not json")


def test_cli_mode_overrides_config():
    assert parse(MINIMAL, "backlund").mode == "backlund"


def test_generators():
    ramp = io.materialize({"generator": "linear-ramp", "start": 1.0, "step": 0.5}, (4,), "x")
    assert np.array_equal(ramp, [1.0, 1.5, 2.0, 2.5])
    grid = io.materialize({"generator": "linear-ramp", "start": 0.0, "step": 1.0, "step2": 10.0}, (2, 3), "x")
    assert np.array_equal(grid, [[0, 10, 20], [1, 11, 21]])
    r1 = io.materialize({"generator": "random", "low": 0.5, "high": 1.5}, (5,), "x", seed=3)
    r2 = io.materialize({"generator": "random", "low": 0.5, "high": 1.5}, (5,), "x", seed=3)
    r3 = io.materialize({"generator": "random", "low": 0.5, "high": 1.5}, (5,), "y", seed=3)
    assert np.array_equal(r1, r2) and not np.array_equal(r1, r3)
    assert np.all((r1 >= 0.5) & (r1 < 1.5))


def test_tolerance_precedence(monkeypatch):
    cfg = parse(MINIMAL)
    monkeypatch.delenv("PRODISC_TOL", raising=False)
    assert io.resolve_tolerance(None, cfg) == 1e-9
    monkeypatch.setenv("PRODISC_TOL", "1e-7")
    assert io.resolve_tolerance(None, cfg) == 1e-7
    assert io.resolve_tolerance(None, parse({**MINIMAL, "tolerance": 1e-6})) == 1e-6
    assert io.resolve_tolerance(1e-5, parse({**MINIMAL, "tolerance": 1e-6})) == 1e-5
    with pytest.raises(SchemaError):
        io.resolve_tolerance(-1.0, cfg)
    monkeypatch.setenv("PRODISC_TOL", "abc")
    with pytest.raises(SchemaError):
        io.resolve_tolerance(None, cfg)


def test_config_hash_is_stable():
    assert parse(MINIMAL).config_hash() == parse(MINIMAL).config_hash()
    assert parse(MINIMAL).config_hash() != parse({**MINIMAL, "seed": 1}).config_hash()


# -- lattice JSON --------------------------------------------------------------------------

floats = st.floats(allow_nan=True, allow_infinity=False, width=64)


@settings(max_examples=100, deadline=None)
@given(arrays(float, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=floats))
def test_lattice_json_round_trip_is_byte_identical(a):
    text = io.lattice_to_json({"H": a, "K": -a})
    again = io.lattice_from_json(text)
    assert io.lattice_to_json(again) == text
    assert np.array_equal(again["H"], a, equal_nan=True)


def test_lattice_json_layout():
    text = io.lattice_to_json({"H": np.array([[1.0, 2.0], [3.0, np.nan]])})
    assert text == '{"n1":2,"n2":2,"fields":{"H":[1.0,2.0,3.0,null]}}\n'


@pytest.mark.parametrize(
    "text, path",
    [
        ('{"n2": 1, "fields": {}}', "/n1"),
        ('{"n1": 0, "n2": 1, "fields": {}}', "/n1"),
        ('{"n1": 1, "n2": 1, "fields": {"H": [1, 2]}}', "/fields/H"),
        ('{"n1": 1, "n2": 1, "fields": {"H": ["x"]}}', "/fields/H"),
    ],
)
def test_lattice_json_errors(text, path):
    with pytest.raises(SchemaError) as exc:
        io.lattice_from_json(text)
    assert exc.value.path == path


# -- OBJ --------------------------------------------------------------------------------------


def planar_grid(n1, n2):
    x, y = np.meshgrid(np.arange(n1, dtype=float), np.arange(n2, dtype=float), indexing="ij")
    return np.stack([x, y, np.zeros_like(x), np.ones_like(x)], axis=-1)


def test_obj_two_by_two():
    text, warns = io.export_obj(planar_grid(2, 2))
    lines = text.splitlines()
    assert [ln.split()[0] for ln in lines] == ["v", "v", "v", "v", "f"]
    assert lines[1] == "v 0 1 0"
    assert lines[-1] == "f 1 3 4 2"
    assert warns == []
    assert "\r" not in text and text.endswith("\n")


def test_obj_chart_failure():
    p = planar_grid(2, 2)
    p[1, 1, 3] = 0.0
    text, warns = io.export_obj(p)
    assert sum(ln.startswith("v ") for ln in text.splitlines()) == 3
    assert sum(ln.startswith("f ") for ln in text.splitlines()) == 0
    assert len(warns) == 1


def test_obj_empty_mesh():
    p = planar_grid(2, 2)
    p[..., 3] = 0.0
    with pytest.raises(EmptyMesh):
        io.export_obj(p)


def test_obj_seventeen_digits_and_dehomogenization():
    p = np.array([[[1.0, 1.0, 2.0, 3.0]]])
    text, _ = io.export_obj(p, chart=3)
    assert text == "v 0.33333333333333331 0.33333333333333331 0.66666666666666663\n"
    text0, _ = io.export_obj(p, chart=0)
    assert text0 == "v 1 2 3\n"


def test_obj_deterministic():
    p = np.random.default_rng(0).normal(size=(5, 4, 4))
    assert io.export_obj(p)[0] == io.export_obj(p.copy())[0]


def test_suite_summary():
    s = io.suite(np.array([[1e-12, np.nan], [3e-10, 2e-11]]), 1e-9)
    assert s["max"] == 3e-10 and s["worst_site"] == [1, 0] and s["pass"]
    assert not io.suite(2e-9, 1e-9)["pass"]
    assert io.suite(0.95, 0.9, upper=False)["pass"]
