from pathlib import Path

import pytest

from compdesign.cli import data_path
from oracles import load_table1

_ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def report():
    """Record one acceptance line; returns ``ok`` so the caller can assert it."""

    def record(criterion: str, ok: bool, detail: str = "") -> bool:
        _ACCEPTANCE.append((criterion, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, ok, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}")


@pytest.fixture(scope="session")
def table1():
    return load_table1()


@pytest.fixture
def data_dir() -> Path:
    return Path(data_path("table1.csv")).parent
