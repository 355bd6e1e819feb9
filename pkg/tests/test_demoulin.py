import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import demoulin_axis_data
from prodisc import demoulin as dm
from prodisc import gmc
from prodisc.errors import DenominatorBlowup, DimensionMismatch, NegativeRadicand


def test_dem_step_hand_example():
    # H = K = 3, A = Q = 0: den_h = 3 (3*2*2 - 2) 2 = 60, H12 = -3*2*2/60
    H12, K12, A2, Q1 = dm.dem_step(3, 3, 3, 3, 3, 3, 0, 0)
    assert H12 == pytest.approx(-0.2)
    assert K12 == pytest.approx(-0.2)
    assert A2 == 0 and Q1 == 0


@pytest.mark.parametrize("c", [(-1.0, -1.0, 0.0, 0.0), (2.0, 2.0, 0.5, 1.5)])
def test_constant_solutions_are_fixed(c):
    h, k, a, q = c
    n = 32
    lat = dm.dem_evolve(*(np.full(n, v) for v in (h, k, h, k, a, q)))
    for name, v in zip("HKAQ", c):
        x = getattr(lat, name)
        assert np.nanmax(np.abs(x - v)) <= 1e-12


def test_denominator_blowup_names_site():
    with pytest.raises(DenominatorBlowup) as exc:
        dm.dem_step(1.0, 2, 2, 2, 2, 2, 0, 0, site=(4, 5))
    assert exc.value.site == (4, 5)


def test_origin_must_agree():
    with pytest.raises(DimensionMismatch):
        dm.dem_evolve([2, 2], [2, 2], [3, 2], [2, 2], [0.5, 0.5], [1.5, 1.5])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_evolution_residuals_vanish(seed):
    lat = dm.dem_evolve(*demoulin_axis_data(8, seed))
    for v in dm.dem_residuals(lat).values():
        assert np.nanmax(v) < 1e-12


def test_scaling_symmetry(demoulin17):
    lam = 1.7
    s = demoulin17.scaled(lam)
    assert np.allclose(s.A, lam * demoulin17.A, equal_nan=True)
    assert np.allclose(s.Q, demoulin17.Q / lam, equal_nan=True)
    for v in dm.dem_residuals(s).values():
        assert np.nanmax(v) < 1e-12


def test_chi_sign_convention(demoulin17):
    chi, chib = dm.chi_fields(demoulin17)
    assert np.all(chib > 0)
    assert np.all(chi[:, 0] > 0)
    assert np.nanmax(dm.chi_relation_residual(demoulin17, chi, chib)) < 1e-12


def test_chi_negative_radicand():
    lat = dm.DemoulinLattice.constant(3, 3, 2.0, -2.0, 0.5, 1.5)
    with pytest.raises(NegativeRadicand):
        dm.chi_fields(lat)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_wilczynski_frames_compatible(demoulin17, lam):
    _, res = dm.wilczynski_frames(demoulin17, None, lam)
    assert np.nanmax(res) < 1e-12


def test_gauge_to_canonical(demoulin17):
    gauge, states, rep = dm.gauge_to_canonical(demoulin17)
    assert states.shape == (16, 16)
    assert rep["xi_path"] < 1e-12
    assert rep["t_zero"] < 1e-10
    assert rep["pattern"] < 1e-10
    assert gmc.classify(states) in (gmc.MinimalClass.DEMOULIN, gmc.MinimalClass.TZITZEICA)


def test_gauged_states_reproduced_by_evolution(demoulin17):
    _, states, _ = dm.gauge_to_canonical(demoulin17)
    cu, cb = states.values[:, 0, :5], states.values[0, :, 5:]
    again = gmc.evolve(cu, cb, "Demoulin", branch=states.branch)
    scale = np.nanmax(np.abs(states.values))
    assert np.nanmax(np.abs(again.values - states.values)) < 1e-12 * scale


def test_gauge_commutes_with_scaling(demoulin17):
    lam = 1.7
    _, s1, _ = dm.gauge_to_canonical(demoulin17)
    _, s2, _ = dm.gauge_to_canonical(demoulin17.scaled(lam))
    assert np.nanmax(np.abs(s2.values - gmc.scale_states(s1, lam).values)) < 1e-13


def test_continuum_convergence():
    rows = dm.continuum_convergence(
        lambda x, y: 2 + np.sin(x + 2 * y),
        lambda x, y: 1.5 + np.cos(x * y),
        lambda x, y: 0.3 + 0.2 * np.sin(3 * x),
        lambda x, y: 0.4 + 0.1 * np.cos(2 * y),
    )
    defects = [r["defect"] for r in rows]
    assert len(rows) == 5
    assert all(b < a for a, b in zip(defects, defects[1:]))
    assert min(r["order"] for r in rows[1:]) >= 0.9
    # frozen values of this run
    assert defects[0] == pytest.approx(0.738, abs=5e-3)
    assert defects[-1] == pytest.approx(0.0525, abs=5e-4)
