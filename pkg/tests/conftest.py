import numpy as np
import pytest

from hssnt import build_space

ALL_SPACES = ["su11", "su:1,2", "su:2,2", "su:2,3", "sp:2", "sp:3"]
RANK2 = ["su:2,2", "su:2,3", "sp:2"]


@pytest.fixture(params=ALL_SPACES)
def space(request):
    return build_space(request.param)


@pytest.fixture(params=RANK2)
def rank2(request):
    return build_space(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def scaled_p(sp, rng, top):
    """Random p vector whose largest spectral value is exactly top."""
    from hssnt.realize import spectral_values
    X = sp.model.random_p(rng)
    return X * (top / spectral_values(sp, X)[0])
