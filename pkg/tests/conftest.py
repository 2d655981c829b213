import os
import shutil
import sys

import numpy as np
import pytest

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)

DATA = os.path.join(HERE, "data")
MINI = os.path.join(DATA, "mini")
GOLDEN = os.path.join(DATA, "golden")


@pytest.fixture
def mini(tmp_path):
    """Writable copy of the bundled two-year fixture; returns the config path."""
    dst = tmp_path / "mini"
    shutil.copytree(MINI, dst, ignore=shutil.ignore_patterns("out"))
    return str(dst / "pipeline.cfg")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
