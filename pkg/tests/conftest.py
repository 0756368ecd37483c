import numpy as np
import pytest

from facepredict.dataset import scan_corpus
from facepredict.fixture import make_fixture

ACCEPTANCE = {}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    """The 50 x 6 synthetic corpus (seed 42), generated once per session."""
    d = tmp_path_factory.mktemp("fixture")
    make_fixture(d, subjects=50, length=6, seed=42)
    return d


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("small")
    make_fixture(d, subjects=6, length=5, seed=7)
    return scan_corpus(d)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or report.outcome in ("failed", "skipped"):
        prev = ACCEPTANCE.get(crit)
        if prev != "FAIL":
            ACCEPTANCE[crit] = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE, key=lambda c: int(c.split()[0])):
        terminalreporter.write_line(f"[{ACCEPTANCE[crit]}] criterion {crit}")
