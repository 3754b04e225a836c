"""Dyadic interval enclosures and certified comparison of reals."""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Callable, Union

from .errors import NegativeInput, PrecisionExhausted

DEFAULT_MAX_BITS = 4096


def floor_dyadic(q, bits: int) -> Fraction:
    """Largest multiple of ``2**-bits`` that is ``<= q``."""
    q = Fraction(q)
    return Fraction((q.numerator << bits) // q.denominator, 1 << bits)


def ceil_dyadic(q, bits: int) -> Fraction:
    q = Fraction(q)
    return Fraction(-((-q.numerator << bits) // q.denominator), 1 << bits)


def is_dyadic(q: Fraction) -> bool:
    d = q.denominator
    return d & (d - 1) == 0


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot convert {type(value).__name__} to a rational endpoint")


@dataclass(frozen=True)
class IntervalReal:
    """A closed interval ``[lo, hi]`` with exact rational endpoints.

    Arithmetic is exact on the endpoints, so every result contains the
    image of the operands.  Operations that leave the rationals
    (``sqrt``, ``log``) or that would grow denominators (``rounded``)
    round outward onto a dyadic grid.
    """

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = _as_fraction(self.lo), _as_fraction(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def exact(cls, value) -> "IntervalReal":
        v = _as_fraction(value)
        return cls(v, v)

    @classmethod
    def around(cls, value, bits: int) -> "IntervalReal":
        """Dyadic enclosure of a rational ``value`` on the ``2**-bits`` grid."""
        return cls(floor_dyadic(value, bits), ceil_dyadic(value, bits))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def contains(self, value) -> bool:
        if isinstance(value, IntervalReal):
            return self.lo <= value.lo and value.hi <= self.hi
        v = _as_fraction(value)
        return self.lo <= v <= self.hi

    def overlaps(self, other: "IntervalReal") -> bool:
        other = _coerce(other)
        return not (self.hi < other.lo or other.hi < self.lo)

    def certainly_lt(self, other) -> bool:
        return self.hi < _coerce(other).lo

    def certainly_le(self, other) -> bool:
        return self.hi <= _coerce(other).lo

    def certainly_gt(self, other) -> bool:
        return self.lo > _coerce(other).hi

    def certainly_ge(self, other) -> bool:
        return self.lo >= _coerce(other).hi

    def rounded(self, bits: int) -> "IntervalReal":
        return IntervalReal(floor_dyadic(self.lo, bits), ceil_dyadic(self.hi, bits))

    def __add__(self, other):
        o = _coerce(other)
        return IntervalReal(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return IntervalReal(-self.hi, -self.lo)

    def __sub__(self, other):
        o = _coerce(other)
        return IntervalReal(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        o = _coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return IntervalReal(min(products), max(products))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self * IntervalReal(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("only non-negative integer powers are supported")
        if exponent == 0:
            return IntervalReal(1, 1)
        lo, hi = self.lo ** exponent, self.hi ** exponent
        if exponent % 2 == 1:
            return IntervalReal(lo, hi)
        if self.lo >= 0:
            return IntervalReal(lo, hi)
        if self.hi <= 0:
            return IntervalReal(hi, lo)
        return IntervalReal(0, max(lo, hi))

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return IntervalReal(0, max(-self.lo, self.hi))

    def sqrt(self, bits: int) -> "IntervalReal":
        return sqrt_interval(self, bits)

    def log(self, bits: int) -> "IntervalReal":
        return log_interval(self, bits)

    def __repr__(self):
        return f"IntervalReal({float(self.lo)!r}, {float(self.hi)!r})"


def _coerce(value) -> IntervalReal:
    if isinstance(value, IntervalReal):
        return value
    return IntervalReal.exact(value)


def interval_max(*intervals) -> IntervalReal:
    items = [_coerce(i) for i in intervals]
    return IntervalReal(max(i.lo for i in items), max(i.hi for i in items))


def interval_min(*intervals) -> IntervalReal:
    items = [_coerce(i) for i in intervals]
    return IntervalReal(min(i.lo for i in items), min(i.hi for i in items))


# -- square roots -----------------------------------------------------------


def _sqrt_floor(q: Fraction, bits: int) -> Fraction:
    scaled = (q.numerator << (2 * bits)) // q.denominator
    return Fraction(math.isqrt(scaled), 1 << bits)


def _sqrt_ceil(q: Fraction, bits: int) -> Fraction:
    num = q.numerator << (2 * bits)
    scaled = -(-num // q.denominator)
    r = math.isqrt(scaled)
    if r * r < scaled:
        r += 1
    return Fraction(r, 1 << bits)


def sqrt_interval(x, bits: int) -> IntervalReal:
    """Enclose the square roots of every value in ``x``.

    Endpoints land on the ``2**-bits`` grid; perfect squares come out exact.
    """
    x = _coerce(x)
    if x.lo < 0:
        raise NegativeInput(f"square root of interval with lo={x.lo}")
    return IntervalReal(_sqrt_floor(x.lo, bits), _sqrt_ceil(x.hi, bits))


# -- logarithms ---------------------------------------------------------------


def _atanh_fixed(num: int, den: int, prec: int) -> tuple[int, int]:
    """Bounds ``(lo, hi)`` with ``lo <= atanh(num/den) * 2**prec <= hi``.

    Requires ``0 <= num/den <= 1/3``.  All roundings are directed, so the
    partial sums are rigorous; the tail after the last term is at most the
    last power kept.
    """
    if num == 0:
        return 0, 0
    one = 1 << prec
    z_lo = (num << prec) // den
    z_hi = -(-(num << prec) // den)
    z2_lo = z_lo * z_lo
    z2_hi = z_hi * z_hi
    shift = 2 * prec
    p_lo, p_hi = z_lo, z_hi
    s_lo = s_hi = 0
    k = 1
    while True:
        s_lo += p_lo // k
        s_hi += -(-p_hi // k)
        if p_hi <= 1:
            s_hi += 1
            break
        p_lo = (p_lo * z2_lo) >> shift
        p_hi = -(-(p_hi * z2_hi) >> shift)
        k += 2
        if p_hi > one:  # pragma: no cover - z <= 1/3 keeps powers shrinking
            raise AssertionError("atanh series diverging")
    return s_lo, s_hi


_ln2_cache: dict[int, tuple[int, int]] = {}
_ln2_lock = threading.Lock()


def _ln2_fixed(prec: int) -> tuple[int, int]:
    with _ln2_lock:
        hit = _ln2_cache.get(prec)
    if hit is None:
        lo, hi = _atanh_fixed(1, 3, prec)
        hit = (2 * lo, 2 * hi)
        with _ln2_lock:
            _ln2_cache[prec] = hit
    return hit


def log2_constant(bits: int) -> IntervalReal:
    """Enclosure of ``ln 2`` of width at most ``2**-bits``."""
    if bits < 1:
        raise ValueError("bits must be >= 1")
    prec = bits + 16
    while True:
        lo, hi = _ln2_fixed(prec)
        out = IntervalReal(
            floor_dyadic(Fraction(lo, 1 << prec), bits + 1),
            ceil_dyadic(Fraction(hi, 1 << prec), bits + 1),
        )
        if out.width <= Fraction(1, 1 << bits):
            return out
        prec += 32


def _ln_bounds(q: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    if q <= 0:
        raise NegativeInput(f"logarithm of non-positive value {q}")
    e = q.numerator.bit_length() - q.denominator.bit_length()
    m = q / Fraction(2) ** e
    if m < 1:
        m *= 2
        e -= 1
    elif m >= 2:
        m /= 2
        e += 1
    z = (m - 1) / (m + 1)
    prec = bits + 16 + 2 * abs(e).bit_length()
    target = Fraction(1, 1 << bits)
    while True:
        a_lo, a_hi = _atanh_fixed(z.numerator, z.denominator, prec)
        l_lo, l_hi = _ln2_fixed(prec)
        if e >= 0:
            lo = e * l_lo + 2 * a_lo
            hi = e * l_hi + 2 * a_hi
        else:
            lo = e * l_hi + 2 * a_lo
            hi = e * l_lo + 2 * a_hi
        lo_f = floor_dyadic(Fraction(lo, 1 << prec), bits + 2)
        hi_f = ceil_dyadic(Fraction(hi, 1 << prec), bits + 2)
        if hi_f - lo_f <= target:
            return lo_f, hi_f
        prec += 32


def log_interval(x, bits: int) -> IntervalReal:
    """Enclosure of the natural log over a positive interval.

    For an exact input the width is at most ``2**-bits``.
    """
    x = _coerce(x)
    if x.lo <= 0:
        raise NegativeInput(f"logarithm of interval with lo={x.lo}")
    lo, hi = _ln_bounds(x.lo, bits)
    if x.hi != x.lo:
        hi = _ln_bounds(x.hi, bits)[1]
    return IntervalReal(lo, hi)


# -- certified comparison ------------------------------------------------------


class Order(enum.Enum):
    LESS = "less"
    GREATER = "greater"
    EQUAL = "equal-proven"
    UNRESOLVED = "unresolved"


@dataclass(frozen=True)
class CompareResult:
    order: Order
    bits: int
    width: Fraction | None = None

    def __bool__(self):
        return self.order is not Order.UNRESOLVED


Producer = Union[int, Fraction, IntervalReal, Callable[[int], IntervalReal], object]


def _exact_value(x):
    if isinstance(x, bool):
        return None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, IntervalReal) and x.is_exact:
        return x.lo
    return None


def _cap(x) -> int | None:
    return getattr(x, "max_bits", None)


def _enclose(x, bits: int) -> IntervalReal:
    if isinstance(x, IntervalReal):
        return x
    if isinstance(x, (int, Fraction)):
        return IntervalReal.exact(x)
    if hasattr(x, "enclosure"):
        return x.enclosure(bits)
    if callable(x):
        return x(bits)
    raise TypeError(f"not an interval producer: {x!r}")


def certified_compare(a: Producer, b: Producer, max_bits: int = DEFAULT_MAX_BITS,
                      start_bits: int = 16) -> CompareResult:
    """Order two reals, refining enclosures until they separate.

    ``a`` and ``b`` may be rationals, fixed intervals, oracles (anything
    with ``enclosure(bits)``) or callables ``bits -> IntervalReal``.
    ``EQUAL`` is only ever returned for two equal rationals.
    """
    ea, eb = _exact_value(a), _exact_value(b)
    if ea is not None and eb is not None:
        if ea < eb:
            return CompareResult(Order.LESS, 0, Fraction(0))
        if ea > eb:
            return CompareResult(Order.GREATER, 0, Fraction(0))
        return CompareResult(Order.EQUAL, 0, Fraction(0))

    bits = min(start_bits, max_bits)
    while True:
        capped = False
        try:
            ka, kb = bits, bits
            cap_a, cap_b = _cap(a), _cap(b)
            if cap_a is not None and cap_a < ka:
                ka, capped = cap_a, True
            if cap_b is not None and cap_b < kb:
                kb, capped = cap_b, True
            ia, ib = _enclose(a, ka), _enclose(b, kb)
        except PrecisionExhausted as exc:
            return CompareResult(Order.UNRESOLVED, bits, exc.width)
        if ia.hi < ib.lo:
            return CompareResult(Order.LESS, bits, max(ia.width, ib.width))
        if ia.lo > ib.hi:
            return CompareResult(Order.GREATER, bits, max(ia.width, ib.width))
        fixed = isinstance(a, (IntervalReal, int, Fraction)) and isinstance(b, (IntervalReal, int, Fraction))
        if capped or fixed or bits >= max_bits:
            return CompareResult(Order.UNRESOLVED, min(ka, kb), max(ia.width, ib.width))
        bits = min(2 * bits, max_bits)
