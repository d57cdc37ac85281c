from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def nsl_path():
    return FIXTURES / "nsl_kdd_sample.txt"


@pytest.fixture
def unsw_path():
    return FIXTURES / "unsw_nb15_sample.csv"
