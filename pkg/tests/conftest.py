import numpy as np
import pytest

from rootdensity.oracle import random_separated_roots
from rootdensity.polynomial import from_roots


@pytest.fixture
def rng():
    return np.random.RandomState(20240817)


def separated_corpus(seed, count, degree=6):
    """Coefficient matrix of `count` random well-conditioned polynomials."""
    rng = np.random.RandomState(seed)
    return np.vstack([
        from_roots(random_separated_roots(rng, degree)).coeffs for _ in range(count)
    ]), None


@pytest.fixture
def separated_sextics():
    coeffs, _ = separated_corpus(1337, 64)
    return coeffs
