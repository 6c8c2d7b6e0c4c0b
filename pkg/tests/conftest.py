import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from carrot import fixtures  # noqa: E402
from carrot.minilang import parse_cases, parse_program, run_corpus  # noqa: E402

_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): an exit criterion of the build")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE.append((marker.args[0], "PASS" if report.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, result in _ACCEPTANCE:
        terminalreporter.write_line(f"{result}  {name}")


@pytest.fixture(scope="session")
def isiso_program():
    return parse_program(fixtures.read("isisosceles.mini"))


@pytest.fixture(scope="session")
def isiso_corpus(isiso_program):
    cases = parse_cases(fixtures.read("isisosceles.cases"), isiso_program)
    return run_corpus(isiso_program, cases)


@pytest.fixture(scope="session")
def partial_program():
    return parse_program(fixtures.read("partial_id.mini"))
