import pytest

from ccwb.langs import bootstrap_assembler, load_assets
from ccwb.toyvm import as_machine_structure


@pytest.fixture(scope="session")
def tm():
    """The toy machine at a budget comfortable for unit-sized programs."""
    return as_machine_structure(200_000)


@pytest.fixture(scope="session")
def tm_big():
    """The toy machine at a budget large enough for translator runs."""
    return as_machine_structure(1 << 26)


@pytest.fixture(scope="session")
def assets():
    return load_assets()


@pytest.fixture(scope="session")
def asm0(assets):
    return bootstrap_assembler(assets)
