import os
from pathlib import Path

import pytest

from keynescross.scenarios import SCENARIOS

GOLDEN = Path(__file__).parent / 'golden'


@pytest.fixture
def scenario():
    """Look up a named (params, policy) pair."""
    def get(name):
        return SCENARIOS[name]
    return get


@pytest.fixture
def golden():
    """
    Compare text against tests/golden/<name> byte for byte.

    KEYNESCROSS_UPDATE_GOLDEN=1 rewrites the file and skips the test; otherwise a
    missing file fails.
    """
    def check(name, text):
        path = GOLDEN / name
        if os.environ.get('KEYNESCROSS_UPDATE_GOLDEN') == '1':
            path.parent.mkdir(exist_ok=True, parents=True)
            path.write_bytes(text.encode('utf-8'))
            pytest.skip(f'golden file {name} written')
        if not path.exists():
            pytest.fail(f'golden file {name} is missing; rerun with KEYNESCROSS_UPDATE_GOLDEN=1 to create it')
        assert text.encode('utf-8') == path.read_bytes()
    return check
