import pytest

from tree_quench.gibbs import ModelParams
from tree_quench.hardcore import HCParams
from tree_quench.tree import TreeShape


@pytest.fixture(scope="session", name="small_tree")
def fixture_small_tree() -> TreeShape:
    return TreeShape(2, 2)


@pytest.fixture(scope="session", name="ising_params")
def fixture_ising_params() -> ModelParams:
    return ModelParams(1.0, 0.2, 2)


@pytest.fixture(scope="session", name="cold_params")
def fixture_cold_params() -> ModelParams:
    return ModelParams(3.0, 0.0, 2)


@pytest.fixture(scope="session", name="hc_params")
def fixture_hc_params() -> HCParams:
    return HCParams(6.0, 2)


@pytest.fixture(scope="session", name="seed")
def fixture_seed() -> int:
    return 20240611
