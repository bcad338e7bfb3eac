import numpy as np
import pytest

from mobandit.instances import Instance


def two_arm_three_objective(eps: float) -> Instance:
    """K=2, M=3 instance with one large gap per arm and one tiny gap eps."""
    return Instance(np.array([[100.0, 0.0, 50.0], [0.0, 100.0, 50.0 + eps]]))


def random_unique_instance(rng: np.random.Generator, K: int, M: int) -> Instance:
    """Gaussian means; ties have probability zero, so best arms are unique."""
    return Instance(rng.normal(0.0, 1.0, size=(K, M)))


@pytest.fixture
def rem2():
    return two_arm_three_objective(1.0)
