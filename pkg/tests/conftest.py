from __future__ import annotations

import numpy as np
import pytest

from qha import PhaseLattice


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)


@pytest.fixture
def lattice8():
    return PhaseLattice(8)


@pytest.fixture
def lattice16():
    return PhaseLattice(16)
