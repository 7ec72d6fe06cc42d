import pytest

from shiftconv.arith import named_table


@pytest.fixture(scope="session")
def delta_small():
    return named_table("delta", 5000)


@pytest.fixture(scope="session")
def sym2_small():
    return named_table("sym2", 5000)
