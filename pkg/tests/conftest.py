import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=100, deadline=None)
settings.load_profile("default")

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def golden():
    from sl3jones.golden import load_golden

    return load_golden()


@pytest.fixture(scope="session")
def derived():
    """Operators frozen by scripts/derive.py (data/derived.ops)."""
    from sl3jones.pipeline import load_derived

    return load_derived()


@pytest.fixture(scope="session")
def deglex_gb(derived):
    from sl3jones.pipeline import deglex_basis

    return deglex_basis(derived)


@pytest.fixture(scope="session")
def quotient(deglex_gb):
    from sl3jones.groebner import QuotientModule

    return QuotientModule(deglex_gb)


@pytest.fixture(scope="session")
def lex_gb(deglex_gb, quotient):
    from sl3jones.groebner import fglm
    from sl3jones.orders import TermOrder

    return fglm(deglex_gb, TermOrder.lex(), quotient)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
