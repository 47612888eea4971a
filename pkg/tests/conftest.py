import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from wildstrat.rootdata import root_datum
from wildstrat.elements import GElement


@pytest.fixture(scope="session")
def sl2():
    return root_datum("sl", 2)


@pytest.fixture(scope="session")
def gl2():
    return root_datum("gl", 2)


@pytest.fixture(scope="session")
def sl3():
    return root_datum("sl", 3)


@pytest.fixture(scope="session")
def gl3():
    return root_datum("gl", 3)


@pytest.fixture(scope="session")
def sl4():
    return root_datum("sl", 4)


@pytest.fixture(scope="session")
def b2():
    return root_datum("B", 2)


def gl_root_index(rd, i, j):
    """Index of alpha_ij = e_i - e_j in a gl_n root datum."""
    n = rd.dim_t
    cov = tuple(Fraction(1 if k == i else (-1 if k == j else 0)) for k in range(n))
    return rd.root_index[cov]


@pytest.fixture(scope="session")
def sl2_efh(sl2):
    """The standard sl2 triple (E, F, H) with [H,E] = 2E."""
    i_e = sl2.root_index[(Fraction(2),)]
    i_f = sl2.neg[i_e]
    return (GElement.root_vec(sl2, i_e), GElement.root_vec(sl2, i_f),
            GElement.cartan_vec(sl2, (1,)), i_e, i_f)
