import pytest
from mpmath import mpf, mpc, workprec

PREC = 256


@pytest.fixture(scope="session")
def prec():
    return PREC


def rel_err(got, want):
    """Relative error as an mpf; absolute when want == 0.

    Evaluated at high fixed precision so ambient context never floors it.
    """
    with workprec(600):
        got, want = mpc(got), mpc(want)
        denom = abs(want)
        return abs(got - want) / denom if denom != 0 else abs(got)


@pytest.fixture(scope="session")
def rel():
    return rel_err


@pytest.fixture(scope="session")
def e4i(prec):
    from meroforms import POINT_I, closed_value

    return closed_value(4, POINT_I, prec)


@pytest.fixture(scope="session")
def e6rho(prec):
    from meroforms import POINT_RHO, closed_value

    return closed_value(6, POINT_RHO, prec)
