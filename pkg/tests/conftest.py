import re
from pathlib import Path

import pytest

from acunh.problem import parse_problem

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

_criteria: dict[int, tuple[str, float]] = {}


@pytest.fixture
def problem_file():
    def load(name: str):
        path = PROBLEMS / name
        return path, parse_problem(path.read_text())
    return load


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria[n] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        outcome, dt = _criteria[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict} ({dt:.1f} s)")
