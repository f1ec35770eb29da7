"""
py.test configuration
"""
import numpy as np
import pytest

from banachsvd import DecompositionConfig, DenseOperator, NormSpec
from banachsvd.eigen import make_mixed_diagonal

#: The diagonal of the mixed norm example used throughout the tests.
EXAMPLE_ALPHA = (0.5, 1.0, 0.25, 0.8, 0.1, 0.05)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(scope="module")
def cfg() -> DecompositionConfig:
    # few restarts keep the suite fast; the basis starts do most of the work
    return DecompositionConfig(restarts=3, seed=1234)


@pytest.fixture(scope="module")
def euclid2() -> NormSpec:
    return NormSpec.lp(2, 2)


@pytest.fixture(scope="module")
def diag31(euclid2) -> DenseOperator:
    return DenseOperator([[3, 0], [0, 1]], euclid2, euclid2)


@pytest.fixture(scope="module")
def example_operator() -> DenseOperator:
    return make_mixed_diagonal(EXAMPLE_ALPHA, 2)


@pytest.fixture(scope="module")
def rank2_operator() -> DenseOperator:
    rng = np.random.default_rng(7)
    matrix = rng.standard_normal((4, 2)) @ rng.standard_normal((2, 4))
    space = NormSpec.lp(2, 4)
    return DenseOperator(matrix, space, space)
