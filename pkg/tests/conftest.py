from fractions import Fraction

import pytest

from mixexp.ratpoly import RatPoly


@pytest.fixture
def X():
    return RatPoly.x()


def frac_grid(lo, hi, count):
    lo, hi = Fraction(lo), Fraction(hi)
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]
