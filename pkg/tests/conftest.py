"""Shared fixtures and the acceptance summary printed at the end of a run."""

import numpy as np
import pytest

from lezquench import TfimParams, find_tau_c

ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    """Print and remember one pass/fail line for an acceptance criterion."""
    line = f"criterion {criterion:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def tuned_fast_mode():
    """TFIM 0.5 -> 1.5, N = 50, critical duration of the mode k = 7 pi / 50."""
    return find_tau_c(TfimParams(0.5), TfimParams(1.5), 7 * np.pi / 50)
