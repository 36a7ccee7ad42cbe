import pytest
from hypothesis import settings

from modgp.kernel import KernelSpec
from modgp.warp import Warping

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

SMOOTH_FAMILIES = ["SquaredExponential", "Matern32", "Matern52"]


def builtin_warpings():
    return {
        "identity": Warping.identity(),
        "affine": Warping.affine(2.0, 1.0),
        "soft_shift": Warping.soft_shift(),
        "exp_approach": Warping.exp_approach(),
    }


@pytest.fixture
def se():
    return KernelSpec("SquaredExponential", 1.0, 1.0)
