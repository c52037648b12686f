import numpy as np
import pytest

from afdm_isac.params import AfdmParams

# (criterion, passed, detail) lines collected by the acceptance module
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for num, ok, detail in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_params():
    """N=64 grid where 2 N c1 = 13 and the prefix holds delays up to 7."""
    return AfdmParams.recommended(n_subcarriers=64, n_symbols=8, n_cpp=8)


@pytest.fixture
def mid_params():
    return AfdmParams.recommended(n_subcarriers=256, n_symbols=32, n_cpp=16)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
