import numpy as np
import pytest

from stenzel_slag import SymmetricPairCase

ALL_CASES = [
    SymmetricPairCase.aiii_aiii(2, 1),
    SymmetricPairCase.aiii_aiii(3, 2),
    SymmetricPairCase.aiii(3),
    SymmetricPairCase.bdi(3),
    SymmetricPairCase.bdi(4),
    SymmetricPairCase.diii(),
]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=ALL_CASES, ids=lambda c: c.name)
def case(request):
    return request.param


def strip_taus(case, rng, count, im=0.5):
    hw = case.strip_halfwidth
    return [complex(rng.uniform(0.1 * hw, 0.9 * hw), rng.uniform(-im, im)) for _ in range(count)]


def random_cvec(rng, d):
    return rng.standard_normal(d) + 1j * rng.standard_normal(d)
