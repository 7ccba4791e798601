from __future__ import annotations

import pytest

from sholie.cartan import build_chain
from sholie.context import AlgebraContext
from sholie.structure import structure_constants


@pytest.fixture(scope="session")
def ctx23() -> AlgebraContext:
    return AlgebraContext.create(2, 3, (1, 1))


@pytest.fixture(scope="session")
def ctx25() -> AlgebraContext:
    return AlgebraContext.create(2, 5, (1, 1))


@pytest.fixture(scope="session")
def ctx333() -> AlgebraContext:
    return AlgebraContext.create(3, 3, (1, 1, 1))


@pytest.fixture(scope="session")
def chain23(ctx23):
    return build_chain(ctx23)


@pytest.fixture(scope="session")
def chain25(ctx25):
    return build_chain(ctx25)


@pytest.fixture(scope="session")
def chain333(ctx333):
    return build_chain(ctx333)


@pytest.fixture(scope="session")
def st23(chain23):
    return structure_constants(chain23)


@pytest.fixture(scope="session")
def st25(chain25):
    return structure_constants(chain25)


@pytest.fixture(scope="session")
def st333(chain333):
    return structure_constants(chain333)


@pytest.fixture(scope="session")
def solves333(st333):
    """Biderivation solves at (3,3,(1,1,1)) keyed by (parity, mode); the slowest step in the suite."""
    from sholie.bider import solve

    return {(parity, mode): solve(st333, parity, mode) for mode in ("dense", "blocked") for parity in (0, 1)}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 10):
        if n in VERDICTS:
            ok, text = VERDICTS[n]
            terminalreporter.write_line(f"ACCEPTANCE {n} {'PASS' if ok else 'FAIL'} {text}")
        else:
            terminalreporter.write_line(f"ACCEPTANCE {n} FAIL not run")
