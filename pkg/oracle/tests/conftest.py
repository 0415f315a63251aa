"""The cross-validation suite registers its scorecard line like the main one."""
from __future__ import annotations

import pytest

_SCORECARD: list[str] = []


@pytest.fixture(scope="session")
def criterion_log():
    def record(num: int, ok: bool, detail: str) -> None:
        _SCORECARD.append(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if _SCORECARD:
        terminalreporter.section("oracle scorecard")
        for line in sorted(_SCORECARD):
            terminalreporter.write_line(line)
