import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cxtherm.gates import default_gate_set


@pytest.fixture(scope="session")
def gate_set():
    return default_gate_set()


@pytest.fixture(scope="session")
def chain_gate_set():
    return default_gate_set("chain")
