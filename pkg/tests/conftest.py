import numpy as np
import pytest
from mpmath import mp, mpf

from core.omega import OmegaWord
from core.points import ExactPoint
from utils.cache import clear_cache


@pytest.fixture
def golden() -> ExactPoint:
    """(sqrt(5) - 1) / 2 at 256 bits."""
    return ExactPoint.parse('surd:-1:5:2')


@pytest.fixture
def all_ones() -> OmegaWord:
    return OmegaWord.parse('1...')


@pytest.fixture
def random_real():
    """Factory for points low + (high - low) * u, u carrying 256 random bits."""
    def draw(rng: np.random.Generator, low=-1, high=1, precision: int = 256) -> ExactPoint:
        mantissa = int.from_bytes(rng.bytes(precision // 8), 'big')
        with mp.workprec(precision):
            u = mpf(mantissa) / mpf(2) ** precision
            return ExactPoint(mpf(low) + (mpf(high) - mpf(low)) * u, 'K', precision)
    return draw


@pytest.fixture
def fresh_cache():
    clear_cache()
    yield
    clear_cache()
