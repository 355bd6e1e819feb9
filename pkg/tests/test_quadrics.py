import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prodisc import gmc
from prodisc import quadrics as q
from prodisc.errors import ZeroNu
from prodisc.gmc import GmcState

labels = st.floats(-5, 5, allow_nan=False)


@pytest.fixture(scope="module")
def frames(generic16):
    F, _ = gmc.build_frames(generic16)
    return F


def test_label_pairs():
    assert np.array_equal(q.as_pair(np.inf), [1.0, 0.0])
    assert np.array_equal(q.as_pair(2.5), [2.5, 1.0])
    assert q.pair_value([3.0, 0.0]) == np.inf
    assert q.pair_value([3.0, 2.0]) == 1.5


def test_quadric_coords_at_infinity():
    # mu -> inf with nu = 0 is the point r1 of the frame
    assert np.array_equal(q.quadric_coords(np.inf, 0.0), [0.0, 1.0, 0.0, 0.0])
    assert np.array_equal(q.quadric_coords(0.0, 0.0), [0.0, 0.0, 0.0, 1.0])


@settings(max_examples=100, deadline=None)
@given(labels, labels)
def test_points_lie_on_implicit_quadric(mu, nu):
    F = np.array([[1.0, 0.2, 0, 0], [0.1, 1, 0.3, 0], [0, 0.4, 1, 0.2], [0.3, 0, 0.1, 1]])
    Q = q.LieQuadric(F)
    P = Q.point(mu, nu)
    S = Q.implicit
    assert abs(P @ S @ P) <= 1e-12 * np.linalg.norm(S) * (P @ P)


def test_neighbouring_quadrics_are_c1(generic16):
    # the property is frame independent, so use the local frame at each site
    L, M = gmc.transition_matrices(generic16)
    for i, j in [(1, 1), (4, 7), (10, 3), (14, 14)]:
        Q = q.LieQuadric(np.eye(4))
        assert q.c1_residual(Q, q.LieQuadric(L[i, j]), direction=1) < 1e-9
        assert q.c1_residual(Q, q.LieQuadric(M[i, j]), direction=2) < 1e-9


def test_distant_quadrics_are_not_c1(frames):
    Q = q.LieQuadric(frames[1, 1])
    assert q.c1_residual(Q, q.LieQuadric(frames[3, 3])) > 0.1


def test_common_generators_golden_ratio():
    # b mu^2 - 2 g mu - a = mu^2 - mu - 1
    s = GmcState(1, 1, 1, 0, 0.5, 1, 1, 1, 0, 0)
    lo, hi = q.common_generators(s)
    assert lo == pytest.approx((1 - np.sqrt(5)) / 2, abs=1e-15)
    assert hi == pytest.approx((1 + np.sqrt(5)) / 2, abs=1e-15)


def test_common_generators_count_follows_sign_of_T():
    assert q.common_generators(GmcState(1, -1, 1, 0, 0.2, 1, 1, 1, 0, 0)) == ()
    double = q.common_generators(GmcState(1, -0.25, 1, 0, 0.5, 1, 1, 1, 0, 0))
    assert double == (0.5,)


def test_neighbor_nu_map_zero_label():
    with pytest.raises(ZeroNu):
        q.neighbor_nu_map(GmcState(1, 1, 1, 0, 0, 1, 1, 1, 0, 0), 0.3, 0.0)
