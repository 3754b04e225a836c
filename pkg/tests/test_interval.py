import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import LN2, REF_TOL, SQRT2
from simapprox.errors import NegativeInput
from simapprox.interval import (IntervalReal, Order, ceil_dyadic, certified_compare,
                                floor_dyadic, interval_max, interval_min, is_dyadic,
                                log2_constant, log_interval, sqrt_interval)
from simapprox.oracles import parse_oracle

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 6)
positive = st.fractions(min_value=Fraction(1, 10 ** 6), max_value=10 ** 6, max_denominator=10 ** 6)


def interval_of(a, b):
    return IntervalReal(min(a, b), max(a, b))


def test_dyadic_rounding_brackets_value():
    q = Fraction(1, 3)
    lo, hi = floor_dyadic(q, 10), ceil_dyadic(q, 10)
    assert lo < q < hi and hi - lo == Fraction(1, 1024)
    assert is_dyadic(lo) and is_dyadic(hi) and not is_dyadic(q)
    assert floor_dyadic(Fraction(3, 4), 2) == ceil_dyadic(Fraction(3, 4), 2) == Fraction(3, 4)


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        IntervalReal(2, 1)


@given(fractions, fractions, fractions, fractions, st.sampled_from("+-*"))
def test_arithmetic_encloses_every_pointwise_result(a, b, c, d, op):
    x, y = interval_of(a, b), interval_of(c, d)
    f = {"+": lambda u, v: u + v, "-": lambda u, v: u - v, "*": lambda u, v: u * v}[op]
    z = f(x, y)
    for u in (a, b, (a + b) / 2):
        for v in (c, d, (c + d) / 2):
            assert z.contains(f(u, v))


@given(fractions, fractions, st.integers(0, 5))
def test_power_encloses(a, b, k):
    x = interval_of(a, b)
    for u in (a, b, (a + b) / 2, Fraction(0) if x.contains(0) else a):
        assert (x ** k).contains(u ** k)


def test_division_by_interval_containing_zero():
    with pytest.raises(ZeroDivisionError):
        IntervalReal.exact(1) / IntervalReal(-1, 1)


@given(positive, st.integers(1, 200))
def test_sqrt_enclosure_width_and_containment(q, bits):
    iv = sqrt_interval(q, bits)
    assert iv.lo * iv.lo <= q <= iv.hi * iv.hi
    assert iv.width <= Fraction(1, 1 << bits)


def test_sqrt_exact_on_squares_and_negative_rejected():
    assert sqrt_interval(Fraction(9, 4), 30) == IntervalReal.exact(Fraction(3, 2))
    assert abs(sqrt_interval(2, 120).mid - SQRT2) < Fraction(1, 1 << 119)
    with pytest.raises(NegativeInput):
        sqrt_interval(-1, 10)


def test_log2_constant_matches_reference_digits():
    for bits in (8, 64, 120):
        iv = log2_constant(bits)
        assert iv.width <= Fraction(1, 1 << bits)
        assert iv.lo - REF_TOL <= LN2 <= iv.hi + REF_TOL


@given(positive, st.integers(8, 80))
def test_log_interval_contains_float_log(q, bits):
    iv = log_interval(q, bits)
    assert iv.width <= Fraction(1, 1 << bits)
    ref = math.log(q.numerator) - math.log(q.denominator)
    assert float(iv.lo) - 1e-9 <= ref <= float(iv.hi) + 1e-9


def test_log_of_interval_is_monotone_hull():
    iv = log_interval(IntervalReal(Fraction(1, 2), 2), 40)
    assert iv.lo <= -LN2 and iv.hi >= LN2


def test_interval_min_max():
    a, b = IntervalReal(0, 2), IntervalReal(1, 3)
    assert interval_max(a, b) == IntervalReal(1, 3)
    assert interval_min(a, b) == IntervalReal(0, 2)


def test_compare_exact_rationals():
    assert certified_compare(Fraction(1, 3), Fraction(1, 3)).order is Order.EQUAL
    assert certified_compare(1, 2).order is Order.LESS
    assert certified_compare(Fraction(5, 2), 2).order is Order.GREATER


def test_compare_oracle_against_rationals():
    sqrt2 = parse_oracle("alg:-2,0,1:1,2")
    assert certified_compare(sqrt2, Fraction(141421356, 10 ** 8)).order is Order.GREATER
    assert certified_compare(sqrt2, Fraction(141421357, 10 ** 8)).order is Order.LESS
    # the same value twice never becomes EQUAL: refinement runs out instead
    res = certified_compare(sqrt2, sqrt2, max_bits=64)
    assert res.order is Order.UNRESOLVED and res.bits == 64


def test_compare_against_decimal_literal_respects_digit_cap():
    sqrt2 = parse_oracle("alg:-2,0,1:1,2")
    res = certified_compare(sqrt2, parse_oracle("dec:1.41421356@27"))
    assert res.order is Order.UNRESOLVED
    assert res.bits <= 27
    assert certified_compare(sqrt2, parse_oracle("dec:1.40")).order is Order.GREATER


def test_compare_fixed_overlapping_intervals_unresolved():
    res = certified_compare(IntervalReal(0, 2), IntervalReal(1, 3))
    assert res.order is Order.UNRESOLVED and not res


def test_compare_accepts_callables():
    third = lambda bits: IntervalReal.around(Fraction(1, 3), bits)
    assert certified_compare(third, Fraction(1, 3) + Fraction(1, 10 ** 9)).order is Order.LESS
