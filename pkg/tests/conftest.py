from __future__ import annotations

import random
from fractions import Fraction

import pytest


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240917)


def rand_q(rng: random.Random, lo: int = -1, hi: int = 1, den: int = 12) -> Fraction:
    return Fraction(rng.randint(lo * den, hi * den), den)
