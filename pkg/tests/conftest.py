from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Print a PASS/FAIL line for an acceptance criterion and keep it for the summary."""

    def emit(number: int, ok: bool, message: str, seconds: float) -> None:
        line = f"[criterion {number:02d}] {'PASS' if ok else 'FAIL'}  {message} ({seconds:.2f}s)"
        print(line)
        _ACCEPTANCE_LINES.append(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
