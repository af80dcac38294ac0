import numpy as np
import pytest

from ridgelab.experiment import ramp_profile, tanh_profile
from ridgelab.lottery import ingest_dataset
from ridgelab.transforms import ActivationPair
from ridgelab.zp_core import coords_from_linear


@pytest.fixture(scope="session")
def pairs():
    """Cached activation pairs: kind in {ramp, tanh, mixed} (mixed has r != g)."""
    cache = {}

    def get(p, kind="ramp"):
        key = (p, kind)
        if key not in cache:
            if kind == "ramp":
                cache[key] = ActivationPair.build(ramp_profile(p))
            elif kind == "tanh":
                cache[key] = ActivationPair.build(tanh_profile(p))
            elif kind == "mixed":
                cache[key] = ActivationPair.build(ramp_profile(p), tanh_profile(p))
            else:
                raise ValueError(kind)
        return cache[key]

    return get


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture()
def make_uniform_data():
    """Dataset with one example per grid point, so p_hat is exactly uniform."""

    def build(p, d, values):
        rows = [
            (coords_from_linear(i, p, d), float(values[i])) for i in range(p**d)
        ]
        return ingest_dataset(rows, p, d)

    return build
