"""Collects acceptance results and prints one line per criterion after the run."""
from __future__ import annotations

from collections import OrderedDict

import pytest

# criterion number -> list of (clause, passed, detail, seconds)
ACCEPTANCE: "OrderedDict[int, list]" = OrderedDict()
TITLES: dict[int, str] = {}


@pytest.fixture
def record():
    def _record(number: int, title: str, clause: str, passed: bool, detail: str, seconds: float):
        TITLES[number] = title
        ACCEPTANCE.setdefault(number, []).append((clause, bool(passed), detail, seconds))
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        clauses = ACCEPTANCE[number]
        ok = all(c[1] for c in clauses)
        seconds = sum(c[3] for c in clauses)
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {TITLES[number]} ({seconds:.1f} s)")
        for clause, passed, detail, _ in clauses:
            tr.write_line(f"        {'ok ' if passed else 'NO '} {clause}: {detail}")
