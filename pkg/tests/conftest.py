import os
import sys
import tempfile

import pytest

ROOT = os.path.join(os.path.dirname(__file__), '..')
sys.path.append(os.path.join(ROOT, 'src'))
sys.path.append(ROOT)

# Keep logs and stored results out of the working tree
_scratch = tempfile.mkdtemp(prefix="feynlab-tests-")
os.environ.setdefault("FEYNLAB_LOG_DIR", os.path.join(_scratch, "logs"))
os.environ.setdefault("FEYNLAB_RESULTS_DIR", os.path.join(_scratch, "results"))


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: numeric checks that take more than a few seconds")


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="also run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)
