import numpy as np
import pytest

from prodisc import demoulin as dm
from prodisc import envelopes as ev
from prodisc import gmc
from prodisc.errors import NotApplicable, RiccatiPole, ZeroNu
from prodisc.gmc import GmcState


@pytest.fixture(scope="module")
def envelope(generic16):
    return ev.build_envelope_generic(generic16, 0.5, 0.5)


def test_riccati_single_step_hand_example():
    s = GmcState(2.0, 1.0, 1.0, 0.5, 0.25, 1.0, 3.0, 1.0, 0.0, 1.0)
    nu1, nu2 = ev.riccati_nu(s, 2.0)
    assert nu1 == pytest.approx(-2.0**2 / 2.0 - 2.0 * 0.5)
    assert nu2 == pytest.approx((1.0 * 2.0 + 3.0) / (1.0 * 2.0 - 1.0))
    mu1, mu2 = ev.riccati_mu(s, 1.0)
    assert mu1 == pytest.approx((0.25 + 1.0) / (1.0 - 0.25))
    assert mu2 == pytest.approx(-1.0 - 0.0)


def test_riccati_guards():
    s = GmcState(2.0, 1.0, 1.0, 0.5, 0.25, 1.0, 3.0, 1.0, 0.0, 1.0)
    with pytest.raises(ZeroNu):
        ev.riccati_nu(s, 0.0)
    with pytest.raises(RiccatiPole):
        ev.riccati_nu(s, 1.0)
    flat = GmcState(2.0, 1.0, 1.0, 0.5, 0.25, 1.0, -1.0, 1.0, 0.0, 1.0)
    with pytest.raises(NotApplicable):
        ev.riccati_nu(flat, 2.0)


def test_step_matrices_match_riccati(generic16):
    m1, m2 = ev.nu_step_matrices(generic16)
    s = generic16.state(3, 4)
    nu1, nu2 = ev.riccati_nu(s, 0.7)
    p1 = m1[3, 4] @ [0.7, 1.0]
    p2 = m2[3, 4] @ [0.7, 1.0]
    assert p1[0] / p1[1] == pytest.approx(nu1, rel=1e-13)
    assert p2[0] / p2[1] == pytest.approx(nu2, rel=1e-13)


def test_generic_envelope_tangent(generic16, envelope):
    t = ev.tangency_residuals(generic16, envelope)
    assert np.nanmax(t["det1"]) < 1e-9
    assert np.nanmax(t["det2"]) < 1e-9
    assert np.nanmax(t["munu1"]) < 1e-9
    mu, nu = ev.riccati_compatibility(generic16, envelope)
    assert np.nanmax(mu) < 1e-10 and np.nanmax(nu) < 1e-10


def test_wrong_labels_are_not_tangent(generic16, envelope):
    bad = ev.EnvelopeField.from_values(envelope.mu + 0.1, envelope.nu)
    assert np.nanmax(ev.tangency_residuals(generic16, bad)["det1"]) > 1e-4


def test_envelope_points_shape(generic16, envelope):
    F, _ = gmc.build_frames(generic16)
    assert envelope.points(F).shape == (16, 16, 4)


def test_riccati_linear_equivalence(generic16):
    ri, _ = gmc.reduced_system_inf(generic16, [1.0, 0.3])
    rz, _ = gmc.reduced_system_zero(generic16, [1.0, -0.4])
    assert ev.riccati_linear_equivalence(generic16, ri, rz) < 1e-10


def test_generic_envelope_refuses_other_classes(gr16):
    with pytest.raises(NotApplicable):
        ev.build_envelope_generic(gr16, 0.5, 0.5)


def test_godeaux_rozet_coincidence(gr16):
    shifted, plain = ev.build_envelopes_gr(gr16, 0.5)
    d = ev.shift_coincidence(gr16, shifted, plain, 1)
    assert np.isfinite(d).sum() == 15 * 16
    assert np.nanmax(d) < 1e-9


def test_godeaux_rozet_needs_class(generic16):
    with pytest.raises(NotApplicable):
        ev.build_envelopes_gr(generic16, 0.5)


def test_demoulin_four_envelopes(demoulin17):
    _, states, _ = dm.gauge_to_canonical(demoulin17)
    fields = ev.build_envelopes_demoulin(states)
    assert len(fields) == 4
    assert ev.demoulin_coincidence(states, fields) < 1e-9


def test_q_surface_residual_shapes(generic16):
    m = np.full(16, 0.3)
    n = np.full(16, -0.2)
    r = ev.q_surface_residuals(generic16, ev.QRuling(m, n))
    assert r["generator_1"].shape == (16, 16) and r["line1"].shape == (14, 16)
    assert r["generator_2"].shape == (16, 16) and r["line2"].shape == (16, 14)
    # an arbitrary ruling is not a generator
    assert np.nanmin(r["generator_1"]) > 1e-6
