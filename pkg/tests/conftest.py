from __future__ import annotations

import numpy as np
import pytest

from tabular_oracle.instances import random_cmdp, random_instance


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def small_cmdp(rng):
    return random_cmdp(rng, gammas=(0.9,), n_states=4, n_actions=3)


@pytest.fixture
def instance(rng):
    """Tripleta (mu, pi, pi') independiente sobre un CMDP aleatorio pequeño."""
    return random_instance(rng, gammas=(0.8, 0.9))
