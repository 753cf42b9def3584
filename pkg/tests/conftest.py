import re

import pytest

from quasislit.verify import SweepConfig, run_suite

CRITERIA: dict[str, tuple[bool, str]] = {}


def record(key: str, ok: bool, detail: str) -> bool:
    CRITERIA[key] = (bool(ok), detail)
    print(f"[acceptance {key}] {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


@pytest.fixture(scope="session")
def default_report():
    return run_suite(SweepConfig())


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(CRITERIA, key=lambda k: (int(re.match(r"\d+", k).group()), k)):
        ok, detail = CRITERIA[key]
        terminalreporter.write_line(f"{key:>4s}  {'PASS' if ok else 'FAIL'}  {detail}")
