"""Real numbers that can be enclosed to any requested precision.

Literal grammar (used by the CLI and config files)::

    alg:<c0,c1,...,cd>:<lo>,<hi>    root of c0 + c1 x + ... in (lo, hi)
    dec:<digits>[@<bits>]           real within half a unit of the last digit
    cf:fib:<a>,<b>                  [0; a, b, a, a, b, ...] along the Fibonacci word
"""

from __future__ import annotations

import threading
from decimal import Decimal
from fractions import Fraction

from .errors import InputError, PrecisionExhausted
from .interval import IntervalReal, ceil_dyadic, floor_dyadic
from .poly import IntPolynomial, _strip


class RealOracle:
    """Base class.  Subclasses implement :meth:`_raw_enclosure`."""

    max_bits: int | None = None
    degree: int | None = None

    def __init__(self):
        self._lock = threading.Lock()
        self._power_cache: dict[tuple[int, int], IntervalReal] = {}

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop("_lock", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._lock = threading.Lock()

    @property
    def literal(self) -> str:
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.literal!r})"

    def enclosure(self, bits: int) -> IntervalReal:
        """Dyadic interval of width ``<= 2**-bits`` containing the value."""
        if self.max_bits is not None and bits > self.max_bits:
            raise PrecisionExhausted(
                f"{self.literal} supports at most {self.max_bits} bits",
                width=Fraction(1, 1 << self.max_bits), bits=self.max_bits)
        return self._raw_enclosure(bits)

    def _raw_enclosure(self, bits: int) -> IntervalReal:
        raise NotImplementedError

    def power_enclosure(self, j: int, bits: int) -> IntervalReal:
        """Enclosure of ``xi**j`` of width ``<= 2**-bits``."""
        if j == 0:
            return IntervalReal.exact(1)
        key = (j, bits)
        with self._lock:
            hit = self._power_cache.get(key)
        if hit is not None:
            return hit
        coarse = self.enclosure(2)
        mag = max(abs(coarse.lo), abs(coarse.hi)) + 1
        growth = int(mag).bit_length() + 1
        prec = bits + j * growth + 4
        target = Fraction(1, 1 << (bits + 1))
        while True:
            raw = self.enclosure(prec) ** j
            if raw.width <= target:
                out = raw.rounded(bits + 2)
                break
            prec += 32
        with self._lock:
            self._power_cache[key] = out
        return out

    def proves_equal(self, a: list[int], b: list[int]) -> bool:
        """True when the integer polynomials ``a`` and ``b`` provably agree at xi.

        ``False`` means "not proven", never "different".
        """
        return False


class AlgebraicOracle(RealOracle):
    """A real root of an integer polynomial, isolated in ``(lo, hi)``.

    The isolating interval is certified at construction: strict sign change
    at the endpoints and a Sturm count of exactly one root.  Refinement is
    plain bisection on the sign of the polynomial.
    """

    def __init__(self, poly: IntPolynomial, lo, hi):
        super().__init__()
        self.poly = poly if isinstance(poly, IntPolynomial) else IntPolynomial(tuple(poly))
        lo, hi = Fraction(lo), Fraction(hi)
        if not lo < hi:
            raise InputError(f"isolating interval [{lo}, {hi}] is empty")
        if self.poly.degree < 1:
            raise InputError("polynomial must have degree >= 1")
        s_lo, s_hi = self.poly.sign_at(lo), self.poly.sign_at(hi)
        if s_lo * s_hi >= 0:
            raise InputError(f"no strict sign change of {self.poly} on [{lo}, {hi}]")
        if self.poly.count_roots(lo, hi) != 1:
            raise InputError(f"{self.poly} does not have exactly one root in ({lo}, {hi})")
        self.degree = self.poly.degree
        self._init = (lo, hi)
        self._lo, self._hi = lo, hi
        self._s_lo = s_lo
        self._exact: Fraction | None = None

    @property
    def literal(self) -> str:
        lo, hi = self._init
        return f"alg:{self.poly}:{lo},{hi}"

    def _raw_enclosure(self, bits: int) -> IntervalReal:
        target = Fraction(1, 1 << (bits + 1))
        with self._lock:
            if self._exact is not None:
                return IntervalReal.exact(self._exact)
            lo, hi = self._lo, self._hi
            while hi - lo > target:
                mid = (lo + hi) / 2
                s = self.poly.sign_at(mid)
                if s == 0:
                    self._exact = mid
                    return IntervalReal.exact(mid)
                if s == self._s_lo:
                    lo = mid
                else:
                    hi = mid
            self._lo, self._hi = lo, hi
        return IntervalReal(floor_dyadic(lo, bits + 2), ceil_dyadic(hi, bits + 2))

    def _reduce(self, coeffs: list[int]) -> list[Fraction]:
        num = [Fraction(c) for c in _strip(coeffs)]
        den = [Fraction(c) for c in self.poly.coeffs]
        dd = len(den) - 1
        while num and len(num) - 1 >= dd:
            factor = num[-1] / den[-1]
            shift = len(num) - 1 - dd
            for i, c in enumerate(den):
                num[shift + i] -= factor * c
            num = _strip(num)
        return num

    def proves_equal(self, a: list[int], b: list[int]) -> bool:
        size = max(len(a), len(b))
        diff = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(size)]
        return not self._reduce(diff)


class DecimalOracle(RealOracle):
    """A real known only through a finite decimal expansion.

    ``dec:1.4142`` stands for some real within half a unit of the last
    printed digit.  Enclosures exist only while that uncertainty fits in
    the requested width; ``max_bits`` is the smaller of the user cap and
    what the digits support.
    """

    def __init__(self, digits: str, max_bits: int | None = None):
        super().__init__()
        try:
            dec = Decimal(digits)
        except Exception as exc:
            raise InputError(f"bad decimal literal {digits!r}") from exc
        if not dec.is_finite():
            raise InputError(f"bad decimal literal {digits!r}")
        self.digits = digits
        self.value = Fraction(dec)
        exponent = dec.as_tuple().exponent
        self.half_ulp = Fraction(1, 2) * Fraction(10) ** exponent
        supported = self._supported_bits()
        self.max_bits = supported if max_bits is None else min(max_bits, supported)

    def _bounds(self, bits: int) -> IntervalReal:
        return IntervalReal(floor_dyadic(self.value - self.half_ulp, bits + 2),
                            ceil_dyadic(self.value + self.half_ulp, bits + 2))

    def _supported_bits(self) -> int:
        bits = 0
        while self._bounds(bits + 1).width <= Fraction(1, 1 << (bits + 1)):
            bits += 1
        return bits

    @property
    def literal(self) -> str:
        return f"dec:{self.digits}@{self.max_bits}"

    def _raw_enclosure(self, bits: int) -> IntervalReal:
        return self._bounds(bits)


def fibonacci_word(length: int, a: int = 1, b: int = 2) -> list[int]:
    """First ``length`` letters of the fixed point of ``a -> ab, b -> a``."""
    word = [0]
    while len(word) < length:
        word = [x for c in word for x in ((0, 1) if c == 0 else (0,))]
    return [a if c == 0 else b for c in word[:length]]


class ContinuedFractionOracle(RealOracle):
    """``[a0; a1, a2, ...]`` with partial quotients from a callable.

    Consecutive convergents bracket the value, so enclosures are exact
    rational intervals before outward dyadic rounding.
    """

    def __init__(self, quotient, literal: str):
        super().__init__()
        self._quotient = quotient
        self._literal = literal
        self._conv = [(quotient(0), 1)]
        self._prev = (1, 0)

    @property
    def literal(self) -> str:
        return self._literal

    @classmethod
    def fibonacci(cls, a: int = 1, b: int = 2) -> "ContinuedFractionOracle":
        if a < 1 or b < 1 or a == b:
            raise InputError("fibonacci continued fraction needs distinct positive a, b")
        return cls(_FibQuotients(a, b), f"cf:fib:{a},{b}")

    def _raw_enclosure(self, bits: int) -> IntervalReal:
        target = Fraction(1, 1 << (bits + 1))
        with self._lock:
            while True:
                if len(self._conv) >= 2:
                    (p0, q0), (p1, q1) = self._conv[-2], self._conv[-1]
                    if Fraction(1, q0 * q1) <= target:
                        break
                k = len(self._conv)
                a = self._quotient(k)
                p1, q1 = self._conv[-1]
                p0, q0 = self._conv[-2] if k >= 2 else self._prev
                self._conv.append((a * p1 + p0, a * q1 + q0))
            (p0, q0), (p1, q1) = self._conv[-2], self._conv[-1]
        x, y = Fraction(p0, q0), Fraction(p1, q1)
        return IntervalReal(floor_dyadic(min(x, y), bits + 2), ceil_dyadic(max(x, y), bits + 2))


class _FibQuotients:
    # picklable partial-quotient source for [0; a, b, a, a, b, ...]
    def __init__(self, a: int, b: int):
        self.a, self.b = a, b
        self._word: list[int] = []

    def __call__(self, k: int) -> int:
        if k == 0:
            return 0
        if k > len(self._word):
            self._word = fibonacci_word(max(2 * k, 64), self.a, self.b)
        return self._word[k - 1]


def parse_oracle(literal: str) -> RealOracle:
    """Build an oracle from its textual literal."""
    kind, _, rest = literal.partition(":")
    if kind == "alg":
        poly_text, sep, bounds = rest.partition(":")
        if not sep:
            raise InputError(f"algebraic literal needs ':<lo>,<hi>': {literal!r}")
        lo_text, sep, hi_text = bounds.partition(",")
        if not sep:
            raise InputError(f"bad isolating interval in {literal!r}")
        try:
            poly = IntPolynomial.parse(poly_text)
            lo, hi = Fraction(lo_text), Fraction(hi_text)
        except ValueError as exc:
            raise InputError(f"bad algebraic literal {literal!r}: {exc}") from exc
        return AlgebraicOracle(poly, lo, hi)
    if kind == "dec":
        digits, sep, cap = rest.partition("@")
        return DecimalOracle(digits, int(cap) if sep else None)
    if kind == "cf":
        family, _, params = rest.partition(":")
        if family == "fib":
            try:
                a, b = (int(t) for t in params.split(","))
            except ValueError as exc:
                raise InputError(f"bad continued fraction literal {literal!r}") from exc
            return ContinuedFractionOracle.fibonacci(a, b)
        raise InputError(f"unknown continued fraction family {family!r}")
    raise InputError(f"unknown oracle literal {literal!r}")
