from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from inertial_modes.polycore import Ellipsoid, RotationVector

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BALL = Ellipsoid(1, 1, 1)
TRIAXIAL = Ellipsoid.from_semi_axes(1, Fraction(4, 5), Fraction(2, 3))
FLAT = Ellipsoid.from_semi_axes(1, 1, Fraction(1, 10))
EZ = RotationVector(0, 0, 1)
TILTED = RotationVector(1, 0, 2)


@pytest.fixture
def ball():
    return BALL


@pytest.fixture
def triaxial():
    return TRIAXIAL


ACCEPTANCE: dict[int, str] = {}


def record(number: int, title: str, passed: bool, detail: str) -> bool:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title} -- {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
