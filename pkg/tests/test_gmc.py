import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodisc import gmc
from prodisc.errors import ComplexBranch, DimensionMismatch, NotApplicable, ZeroLambda
from prodisc.gmc import GmcState, MinimalClass

pos = st.floats(0.5, 1.5)
sgn = st.sampled_from([-1.0, 1.0])


def test_step_hand_example():
    s = GmcState(1.0, -1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    un, ba, w = gmc.step(s)
    r2 = np.sqrt(2.0)
    assert w == pytest.approx(r2)
    assert np.allclose(un, (r2, -r2, 1 / r2, 0.0, 0.0))
    assert np.allclose(ba, (r2, -r2, -1 / r2, 0.0, 0.0))


def test_step_negative_branch_flips_w():
    s = GmcState(1.0, -1.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0)
    _, _, w = gmc.step(s, branch=-1)
    assert w == pytest.approx(-np.sqrt(2.0))


def test_complex_branch_reports_site():
    cu = np.array([[1.0, 2.0, 1.0, 0.0, 0.3], [1.0, 2.0, 1.0, 0.0, 0.3]])
    cb = np.array([[1.0, 1.0, 1.0, 0.0, 0.3], [1.0, 1.0, 1.0, 0.0, 0.3]])
    with pytest.raises(ComplexBranch) as exc:
        gmc.evolve(cu, cb)
    assert exc.value.site == (0, 0)


def test_cauchy_shape_checked():
    with pytest.raises(DimensionMismatch):
        gmc.evolve(np.ones((3, 4)), np.ones((3, 5)))


@settings(max_examples=100, deadline=None)
@given(pos, pos, pos, pos, pos, st.floats(-1, 1), st.floats(-1, 1), st.floats(0.1, 3))
def test_unit_determinants(al, a, b, alb, bb, f, g, lam):
    L = gmc.L_matrix(al, a, b, f, g, lam)
    M = gmc.M_matrix(alb, -a, bb, f, g, lam)
    assert np.linalg.det(L) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.det(M) == pytest.approx(1.0, abs=1e-12)


def test_m_matrix_rejects_zero_lambda():
    with pytest.raises(ZeroLambda):
        gmc.M_matrix(1, 1, 1, 0, 0, 0.0)


def test_generic_evolution_is_minimal(generic16):
    T = generic16.T
    assert np.max(np.abs(T - T[:, :1])) <= 1e-12 * np.max(np.abs(T))
    Tb = generic16.T_bar
    assert np.max(np.abs(Tb - Tb[:1])) <= 1e-12 * np.max(np.abs(Tb))
    assert np.nanmax(gmc.teqn_residual(generic16)) < 1e-12
    assert np.nanmax(gmc.edge_constraint_residual(generic16)) < 1e-12
    assert gmc.classify(generic16) == MinimalClass.GENERIC


def test_generic_cauchy_data_signs():
    cu, cb = gmc.generic_cauchy_data(8, 9, np.random.default_rng(0))
    assert cu.shape == (8, 5) and cb.shape == (9, 5)
    assert np.all(cu[:, 1] * cu[:, 2] + cu[:, 4] ** 2 < 0)
    assert np.all(cb[:, 1] * cb[:, 2] + cb[:, 4] ** 2 < 0)


def test_nonminimal_refused_and_classified():
    cu, cb = gmc.generic_cauchy_data(8, 8, np.random.default_rng(1))
    with pytest.raises(NotApplicable):
        gmc.evolve(cu, cb, "NonMinimal")
    nm = gmc.evolve_asymptotic(cu, cb, 0.01)
    assert gmc.classify(nm) == MinimalClass.NON_MINIMAL
    # the lambda = 1 frame equations stay compatible for any asymptotic net
    assert np.nanmax(gmc.face_residual_local(nm, 1.0)) < 1e-12
    assert np.nanmax(gmc.face_residual_local(nm, 2.0)) > 1e-3


def test_class_checked_against_axis_data():
    cu, cb = gmc.generic_cauchy_data(6, 6, np.random.default_rng(2))
    with pytest.raises(NotApplicable):
        gmc.evolve(cu, cb, "Demoulin")


def test_godeaux_rozet_class(gr16):
    assert gmc.classify(gr16) == MinimalClass.GODEAUX_ROZET_T0
    assert np.max(np.abs(gr16.T)) <= 1e-12 * np.max(np.abs(gr16.a * gr16.b))


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_frames_compatible(generic16, lam):
    F, res = gmc.build_frames(generic16, None, lam)
    assert res.max() < 1e-12
    # det F = 1 is exact in theory; far sites are too ill conditioned to test it
    assert np.nanmax(np.abs(np.linalg.det(F[:6, :6]) - 1)) < 1e-9


def test_scaling_equals_spectral_parameter(generic16):
    lam = 1.7
    L1, M1 = gmc.transition_matrices(generic16, lam)
    L2, M2 = gmc.transition_matrices(gmc.scale_states(generic16, lam), 1.0)
    assert np.allclose(L1, L2, rtol=1e-14, atol=1e-14)
    assert np.allclose(M1, M2, rtol=1e-14, atol=1e-14)


def test_reduced_determinants(generic16):
    P, R = gmc.reduced_matrices_inf(generic16)
    scale = np.abs(generic16.a * generic16.b) + generic16.g**2
    assert np.max(np.abs(np.linalg.det(P) + generic16.T) / scale) < 1e-13
    assert np.max(np.abs(np.linalg.det(R) - 1)) < 1e-13
    P0, R0 = gmc.reduced_matrices_zero(generic16)
    assert np.max(np.abs(np.linalg.det(P0) - 1)) < 1e-13


def test_reduced_systems_path_independent(generic16):
    _, res = gmc.reduced_system_inf(generic16, [1.0, 0.3])
    assert np.nanmax(res) < 1e-12
    _, res = gmc.reduced_system_zero(generic16, [1.0, -0.4])
    assert np.nanmax(res) < 1e-12


def test_lattice_fields_round_trip(generic16):
    again = gmc.GmcLattice.from_fields(generic16.fields())
    assert np.array_equal(again.values, generic16.values, equal_nan=True)
    with pytest.raises(DimensionMismatch):
        gmc.GmcLattice(np.zeros((2, 2, 9)))
