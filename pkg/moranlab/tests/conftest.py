#!/usr/bin/env python3
"""
Shared fixtures - standard constructions, measures and realizations
"""

import math

import pytest

from moranlab.codetree import (
    doubling_block_spec,
    geometric_decay_spec,
    make_spec,
    middle_thirds_spec,
    two_ratio_spec,
)
from moranlab.measure import make_uniform_measure, make_weighted_measure
from moranlab.util.config import get_defaults

LOG2_LOG3 = math.log(2.0) / math.log(3.0)


@pytest.fixture(autouse=True)
def _fresh_defaults(monkeypatch):
    """Every test sees the documented defaults, not the developer's environment."""
    for key in ('DEPTH', 'TAIL_WINDOW', 'TOLERANCE', 'RESIDUAL_LIMIT', 'SCALE_BASE', 'TREND_TOLERANCE',
                'ENUMERATION_LIMIT', 'MATERIALIZE_LIMIT', 'MAX_WORKERS', 'LOG_LEVEL'):
        monkeypatch.delenv(f"MORANLAB_{key}", raising=False)
    get_defaults.cache_clear()
    yield
    get_defaults.cache_clear()


@pytest.fixture
def middle_thirds():
    return middle_thirds_spec()


@pytest.fixture
def two_ratio():
    return two_ratio_spec()


@pytest.fixture
def doubling_block():
    return doubling_block_spec()


@pytest.fixture
def geometric_decay():
    return geometric_decay_spec()


@pytest.fixture
def three_branch():
    """Three offsprings with distinct ratios on every level."""
    return make_spec(3, (0.2, 0.3, 0.4))


@pytest.fixture
def uniform_thirds(middle_thirds):
    return make_uniform_measure(middle_thirds)


@pytest.fixture
def bernoulli_thirds(middle_thirds):
    return make_weighted_measure(middle_thirds, (0.3, 0.7))
