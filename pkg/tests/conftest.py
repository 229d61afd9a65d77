import numpy as np
import pytest

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20121015)


def pytest_configure(config):
    _ACCEPTANCE.clear()


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if report.when == "call" and "criterion" in props:
        _ACCEPTANCE.append((props["criterion"], report.outcome, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit, outcome, detail in sorted(_ACCEPTANCE, key=lambda r: int(r[0].split()[0])):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {crit}  {detail}")
