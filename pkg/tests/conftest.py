import pytest

from commprob import group_core as gc
from commprob.ring_core import FiniteRing, order4_noncommutative


@pytest.fixture
def r4():
    return order4_noncommutative()


@pytest.fixture
def left_identity_ring8():
    """F_2^3 with e3 a left identity and e1, e2 left annihilators; P = 7/16."""
    z = (0, 0, 0)
    return FiniteRing((2, 2, 2), ((z, z, z), (z, z, z), ((1, 0, 0), (0, 1, 0), (0, 0, 1))))


@pytest.fixture(scope="session")
def q8():
    return gc.quaternion()


@pytest.fixture(scope="session")
def d4():
    return gc.dihedral(4)


@pytest.fixture(scope="session")
def s3():
    return gc.symmetric(3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  [{detail}]")
