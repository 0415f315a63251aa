"""Shared pytest wiring.

The acceptance checks each register a one-line verdict; the collected lines
are echoed in a terminal section at the end of the run so the whole scorecard
is visible even when individual assertions pass silently.
"""
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
        terminalreporter.section("acceptance scorecard")
        for line in sorted(_SCORECARD):
            terminalreporter.write_line(line)
