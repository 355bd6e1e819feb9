import numpy as np
import pytest

from prodisc import demoulin as dm
from prodisc import gmc
from prodisc import tzitzeica as tz


def demoulin_axis_data(n: int, seed: int, amp: float = 0.05, tzitzeica: bool = False):
    """Cauchy data near the fixed point H = K = -1 with small A, Q."""
    rng = np.random.default_rng(seed)

    def near_minus_one():
        return -(1 + amp * rng.uniform(-1, 1, n))

    H_row, K_row, H_col, K_col = (near_minus_one() for _ in range(4))
    if tzitzeica:
        K_row, K_col = H_row, H_col
    H_col[0], K_col[0] = H_row[0], K_row[0]
    A_row = 0.1 * rng.uniform(0.5, 1.5, n)
    Q_col = 0.1 * rng.uniform(0.5, 1.5, n)
    return H_row, K_row, H_col, K_col, A_row, Q_col


@pytest.fixture(scope="session")
def generic16():
    cu, cb = gmc.generic_cauchy_data(16, 16, np.random.default_rng(11))
    return gmc.evolve(cu, cb, "Generic")


@pytest.fixture(scope="session")
def generic32():
    cu, cb = gmc.generic_cauchy_data(32, 32, np.random.default_rng(12))
    return gmc.evolve(cu, cb, "Generic")


@pytest.fixture(scope="session")
def gr16():
    cu, cb = gmc.generic_cauchy_data(16, 16, np.random.default_rng(3))
    cu[:, 2] = -cu[:, 4] ** 2 / cu[:, 1]
    return gmc.evolve(cu, cb, "GodeauxRozetT0")


@pytest.fixture(scope="session")
def demoulin17():
    return dm.dem_evolve(*demoulin_axis_data(17, 0))


@pytest.fixture(scope="session")
def tz16():
    H_row, _, H_col, _, A_row, Q_col = demoulin_axis_data(16, 1, tzitzeica=True)
    return tz.tz_evolve(H_row, H_col, A_row, Q_col)


@pytest.fixture(scope="session")
def constant14():
    return dm.DemoulinLattice.constant(14, 14, 2.0, 2.0, 0.5, 1.5)
