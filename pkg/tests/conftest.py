import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lietaylor.models import GANTRY_X0, get_model  # noqa: E402


@pytest.fixture(scope="session")
def gantry():
    fields = get_model("gantry").fields()
    return fields["f"], fields["g"], fields["h"], fields["w"], GANTRY_X0


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
