from __future__ import annotations

import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def acceptance_report(request):
    """Print and remember one PASS/FAIL line per acceptance criterion."""
    def report(number: int, ok: bool, detail: str, seconds: float | None = None) -> None:
        timing = "" if seconds is None else f" [{seconds:.3f} s]"
        line = f"ACCEPTANCE {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}{timing}"
        print(line)
        request.config.stash[_LINES].append(line)
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
