import numpy as np
import pytest

from conftest import demoulin_axis_data
from prodisc import backlund as bk
from prodisc import demoulin as dm
from prodisc import gmc
from prodisc import tzitzeica as tz
from prodisc.errors import DimensionMismatch, NotTzitzeica, ZeroTau


def small_tz(n):
    H_row, _, H_col, _, A_row, Q_col = demoulin_axis_data(n, 5, tzitzeica=True)
    return tz.tz_evolve(H_row, H_col, A_row, Q_col)


def test_tz_evolve_matches_demoulin_with_equal_data():
    H_row, _, H_col, _, A_row, Q_col = demoulin_axis_data(10, 2, tzitzeica=True)
    t = tz.tz_evolve(H_row, H_col, A_row, Q_col)
    d = dm.dem_evolve(H_row, H_row, H_col, H_col, A_row, Q_col)
    assert np.allclose(t.H, d.H, rtol=1e-14, equal_nan=True)
    assert np.allclose(d.K, d.H, rtol=1e-14, equal_nan=True)


def test_tz_evolve_origin_check():
    with pytest.raises(DimensionMismatch):
        tz.tz_evolve([-1.0, -1.0], [-1.1, -1.0], [0.1, 0.1], [0.1, 0.1])


def test_affine_seed_hand_example():
    F = tz.affine_seed(-1.0)
    assert np.array_equal(F[:, 3], [1.0, 0.0, 0.0, -2.0])


def test_scaled_frame_equations(tz16):
    F, phi, rep = tz.scaled_frame(tz16)
    assert rep["frame_difference"] < 1e-12 and rep["second_order"] < 1e-12
    # the affine seed makes the chart coordinate identically one
    assert np.max(np.abs(F[..., 0, 3] - 1)) < 1e-12


def test_affine_sphere(tz16):
    F, _, _ = tz.scaled_frame(tz16)
    ra, rep = tz.affine_spheres(tz16, F)
    assert ra.shape == (16, 16, 3)
    assert rep["c_deviation"] < 1e-9
    for k in ("affine_1", "affine_2", "affine_3"):
        assert rep[k] < 1e-9


def test_conserved_vector_of_constant_field():
    # r = 1 gives c = (2 - 2H)/(H - 1) = -2 for every H
    H = np.array([[0.5, 3.0, 0.0], [-1.0, 2.0, 0.0], [0.0, 0.0, 0.0]])
    c = tz.conserved_vector(H, np.ones((3, 3, 1)))
    assert np.allclose(c, -2.0, rtol=0, atol=1e-15)


def test_tau_round_trip(tz16):
    field = tz.tau_from_solution(tz16, 1.0, 0.8, 1.3, s=0.07, s_bar=-0.13)
    assert field.tau.shape == (17, 17)
    rec = tz.recover_from_tau(field)
    for k in ("H", "A", "Q"):
        given = getattr(tz16, k)
        assert np.nanmax(np.abs(rec[k][:16, :16] - given) / np.abs(given)) < 1e-9
    assert np.nanmax(tz.tau_identity_residual(field, "cube")) < 1e-9
    assert np.nanmax(tz.tau_identity_residual(field, "terms")) < 1e-12


def test_tau_rejects_zero_seed(tz16):
    with pytest.raises(ZeroTau):
        tz.tau_from_solution(tz16, 0.0, 1.0, 1.0)


def test_tau_layer_canonical(tz16):
    _, states, _ = dm.gauge_to_canonical(tz16)
    field, rep = tz.tau_layer_canonical(states)
    assert rep["s_dev"] < 1e-10 and rep["s_bar_dev"] < 1e-10
    assert rep["tau_potential"] < 1e-12 and rep["tau_linear"] < 1e-12
    assert np.nanmax(tz.tau_identity_residual(field)) < 1e-9


def test_tau_layer_rejects_generic(generic16):
    with pytest.raises(NotTzitzeica):
        tz.tau_layer_canonical(generic16)


def test_two_component_reduces_to_one_component():
    lat = small_tz(8)
    field = tz.tau_from_solution(lat, 1.0, 0.9, 1.1, s=1.0, s_bar=1.0)
    one = tz.tau_identity_residual(field, "terms")
    two = bk.tau_sigma_residuals(bk.TauSigmaField(field.tau, field.tau))
    assert np.nanmax(one) < 1e-12
    assert np.nanmax(two["identity_1"]) < 1e-12 and np.nanmax(two["identity_2"]) < 1e-12
    assert np.max(two["coupling_1"]) == 0.0 and np.max(two["coupling_2"]) == 0.0


def test_classified_as_tzitzeica(tz16):
    _, states, _ = dm.gauge_to_canonical(tz16)
    assert gmc.classify(states) == gmc.MinimalClass.TZITZEICA


def test_two_component_reduction_needs_unit_first_integrals():
    lat = small_tz(8)
    field = tz.tau_from_solution(lat, 1.0, 0.9, 1.1, s=0.5, s_bar=1.0)
    assert np.nanmax(tz.tau_identity_residual(field, "terms")) < 1e-12
    two = bk.tau_sigma_residuals(bk.TauSigmaField(field.tau, field.tau))
    assert np.nanmin(two["identity_1"]) > 1e-5
