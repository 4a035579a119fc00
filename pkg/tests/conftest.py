import numpy as np
import pytest

from sgnwgn.spectral import make_grid

_CRITERIA = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(scope="session")
def grid64():
    return make_grid(64, 1.0)


@pytest.fixture(scope="session")
def criterion():
    """Record ``(number, passed, detail)`` for the acceptance summary."""

    def record(number, passed, detail):
        _CRITERIA.setdefault(number, []).append((bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
