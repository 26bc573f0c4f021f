import sys
from pathlib import Path

import pytest

from upgconj import example_path
from upgconj.ct import load_ct

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def running():
    return load_ct(example_path("running"))


@pytest.fixture(scope="session")
def fixed_edge():
    return load_ct(example_path("fixed_edge"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
