import numpy as np
import pytest

from mousetrap.surrogate import sample_human_set


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_human_corpus():
    """32 surrogate movements, 4 per task segment."""
    return sample_human_set(32, np.random.default_rng(777))
