import json
from pathlib import Path

import numpy as np
import pytest

from dynmix import simcore

FIXTURES = Path(__file__).parent / "fixtures"


def rng(seed=0):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


def load_fixture(name):
    with open(FIXTURES / name, "r", encoding="utf-8") as fh:
        return json.load(fh)


@pytest.fixture(params=["cython", "python"])
def backend(request):
    if request.param == "cython" and simcore.BACKEND != "cython":
        pytest.skip("compiled engine unavailable")
    return request.param
