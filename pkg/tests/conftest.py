import numpy as np
import pytest

from imagefixtures import detail_rich


def philox(*entropy) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(entropy))))


@pytest.fixture(scope="session")
def fixture_suite():
    """The ten 256x256 detail-rich RGB fixtures used across the suite."""
    return [detail_rich(seed) for seed in range(10)]


@pytest.fixture(scope="session")
def detail_fixture(fixture_suite):
    """The canonical 256x256 detail-rich fixture."""
    return fixture_suite[0]
