import numpy as np
import pytest
from hypothesis import strategies as st

from quatsylv.quat_core import Quaternion, involution_from_axis
from quatsylv.quat_matrix import QuatMatrix

AXES = [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0), (1.0, 1.0, 1.0), (0.3, -2.0, 0.7)]


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(params=AXES, ids=lambda a: "axis=" + ",".join(f"{v:g}" for v in a))
def inv(request):
    return involution_from_axis(request.param)


def rand(rng, m, n, rank=None):
    return QuatMatrix.random(m, n, rng, rank=rank)


finite = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)
quaternions = st.builds(Quaternion, finite, finite, finite, finite)
axes = st.tuples(finite, finite, finite).filter(lambda v: sum(x * x for x in v) > 1e-3)
