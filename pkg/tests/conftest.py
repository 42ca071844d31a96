import pytest

from ship.prefix import PrefixTable, load_table
from ship.synthgen import fixture_path


@pytest.fixture(scope="session")
def realstyle25k() -> PrefixTable:
    return load_table(fixture_path())


# Acceptance verdicts, filled in by test_acceptance.py and printed at the end of the run.
ACCEPTANCE: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
