import os

import pytest

from rmtlab.painleve2 import solve_hastings_mcleod

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    old = os.environ.get("RMTLAB_CACHE_DIR")
    os.environ["RMTLAB_CACHE_DIR"] = str(tmp_path_factory.mktemp("rmtlab-cache"))
    yield
    if old is None:
        os.environ.pop("RMTLAB_CACHE_DIR", None)
    else:
        os.environ["RMTLAB_CACHE_DIR"] = old


@pytest.fixture(scope="session")
def hm():
    """Hastings-McLeod on the default interval [-10, 6]."""
    return solve_hastings_mcleod()


@pytest.fixture(scope="session")
def hm_wide():
    """Hastings-McLeod on [-30, 6], deep enough for the sigma integral."""
    return solve_hastings_mcleod(-30.0, 6.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
