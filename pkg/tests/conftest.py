import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rbdpipe.model import load_model  # noqa: E402

MODEL_NAMES = ("iiwa", "quadruped_arm", "humanoid")


@pytest.fixture(scope="session")
def models():
    return {name: load_model(name) for name in MODEL_NAMES}


@pytest.fixture(params=MODEL_NAMES, scope="session")
def model(request, models):
    return models[request.param]


@pytest.fixture
def say(capsys):
    """Print a line to the terminal even while output is captured."""

    def emit(line):
        with capsys.disabled():
            print("\n" + line)

    return emit
