import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from synthimg import natural_image  # noqa: E402

from mosaiclab import PlanarImage  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    """Five deterministic natural-content images, 256x256."""
    return [natural_image(s, 256, 256) for s in range(5)]


@pytest.fixture(scope="session")
def big_image():
    """One deterministic natural-content image, 512x512."""
    return natural_image(11, 512, 512)


@pytest.fixture()
def rng():
    return np.random.default_rng(np.random.Philox(key=20240817))


def make_random_image(rng, height=16, width=16, lo=0.0, hi=255.0) -> PlanarImage:
    return PlanarImage(rng.uniform(lo, hi, size=(3, height, width)))
