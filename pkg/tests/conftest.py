from __future__ import annotations

import math

import numpy as np
import pytest

from horseshoe_spectra.geometry import AffineModel, GaussModel
from horseshoe_spectra.symbolic import full_shift, golden_mean_shift

LN2_LN3 = math.log(2) / math.log(3)


@pytest.fixture
def two_shift():
    return full_shift(2)


@pytest.fixture
def golden():
    return golden_mean_shift()


@pytest.fixture
def middle_third():
    return AffineModel((1 / 3, 1 / 3), (0.0, 2 / 3))


@pytest.fixture
def gauss12():
    return GaussModel((1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
