import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion; the outcome is set at teardown."""
    names = []

    def record(name):
        names.append(name)

    yield record
    rep = getattr(request.node, "rep_call", None)
    outcome = "PASS" if rep is not None and rep.passed else ("SKIP" if rep is not None and rep.skipped else "FAIL")
    for name in names:
        ACCEPTANCE[name] = outcome


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" or (rep.when == "setup" and rep.skipped):
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE.items():
        terminalreporter.write_line(f"{outcome:<5} {name}")
