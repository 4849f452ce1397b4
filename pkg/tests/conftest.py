"""Shared fixtures for the polydyn test suite."""

import logging

import numpy as np
import pytest
from sympy.polys.domains import QQ

from polydyn.core.poly import Poly
from polydyn.core.rings import QQ_RING


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_monic_centered(rng):
    """Factory for random monic centered polynomials with small rational coefficients."""

    def make(d: int, integral: bool = False) -> Poly:
        low = []
        for _ in range(d - 1):
            numerator = int(rng.integers(-5, 6))
            denominator = 1 if integral else int(rng.integers(1, 4))
            low.append(QQ(numerator, denominator))
        return Poly.from_low(QQ_RING, low + [QQ.zero, QQ.one])

    return make


@pytest.fixture(autouse=True)
def reset_polydyn_logger():
    """Leave the package logger as each test found it."""
    logger = logging.getLogger("polydyn")
    handlers = list(logger.handlers)
    level = logger.level
    propagate = logger.propagate
    yield
    logger.handlers = handlers
    logger.setLevel(level)
    logger.propagate = propagate
