import pytest

from helmopen.geometry import DomainSpec, Shape, build_mesh

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def annulus2():
    """Coarse annulus B_2 minus B_1/2, shared by the cheap tests."""
    return build_mesh(DomainSpec(Shape.ANNULUS, 0.5, 2.0), 0.2, inner_h=0.05)


@pytest.fixture(scope="session")
def annulus1():
    return build_mesh(DomainSpec(Shape.ANNULUS, 0.5, 1.0), 0.1, inner_h=0.05)


@pytest.fixture(scope="session")
def square1():
    return build_mesh(DomainSpec(Shape.SQUARE_HOLE, 0.5, 1.0), 0.15, inner_h=0.05)
