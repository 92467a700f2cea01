from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_scores(rng, n, integer=False):
    if integer:
        return rng.integers(-50, 50, size=(n + 1, n + 1)).astype(float)
    return rng.random((n + 1, n + 1))


# (status, criterion, detail) lines filled in by test_acceptance
ACCEPTANCE: list[tuple[str, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for status, name, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{status:4s}  {name}: {detail}")
