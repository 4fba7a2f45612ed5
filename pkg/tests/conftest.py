import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pairdecay import DecayParams


@pytest.fixture
def params():
    return DecayParams(m1=1.0, m2=1.0, alpha=1.0)


@pytest.fixture
def params_unequal():
    return DecayParams(m1=1.0, m2=3.0, alpha=0.7)


@pytest.fixture
def params_reg():
    return DecayParams(m1=1.0, m2=1.0, alpha=1.0, sigma=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
