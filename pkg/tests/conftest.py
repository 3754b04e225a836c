from fractions import Fraction

import pytest
from hypothesis import settings

from simapprox.oracles import AlgebraicOracle, ContinuedFractionOracle, parse_oracle
from simapprox.poly import IntPolynomial

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# 40 correct digits from decimal.Decimal, used as independent references
SQRT2 = Fraction("1.414213562373095048801688724209698078570")
CBRT2 = Fraction("1.259921049894873164767210607278228350570")
PHI = Fraction("1.618033988749894848204586834365638117720")
LN2 = Fraction("0.6931471805599453094172321214581765680755")
REF_TOL = Fraction(1, 10 ** 38)


@pytest.fixture
def sqrt2():
    return parse_oracle("alg:-2,0,1:1,2")


@pytest.fixture
def cbrt2():
    return parse_oracle("alg:-2,0,0,1:1,2")


@pytest.fixture
def golden():
    return AlgebraicOracle(IntPolynomial((-1, -1, 1)), 1, 2)


@pytest.fixture
def fib_cf():
    return ContinuedFractionOracle.fibonacci(1, 2)
