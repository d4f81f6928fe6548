from fractions import Fraction

import pytest

from degenkraw.measure import Params

# acceptance parameter sets
SET_A = Params.make("-1/2", "2", "3/5", "3")
SET_B = Params.make("-1", "1/2", "1/2", "1")
SET_C = Params.make("-1/4", "3", "7/10", "5/2")

ALL_SETS = {"A": SET_A, "B": SET_B, "C": SET_C}


@pytest.fixture(params=list(ALL_SETS), ids=list(ALL_SETS))
def params(request):
    return ALL_SETS[request.param]


@pytest.fixture
def set_a():
    return SET_A


def frac(x) -> Fraction:
    return Fraction(x)
