"""Dense integer polynomials: exact evaluation, sign counts, bisection."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .interval import IntervalReal, ceil_dyadic, floor_dyadic


def _strip(coeffs):
    coeffs = list(coeffs)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def _sign(v) -> int:
    return (v > 0) - (v < 0)


@dataclass(frozen=True)
class IntPolynomial:
    """Polynomial with integer coefficients, constant term first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(c) for c in _strip(self.coeffs))
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Read a comma separated coefficient list, e.g. ``"1,-3,-2"``."""
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty coefficient list")
        return cls(tuple(int(p) for p in parts))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        """Sign of ``p(x)`` for rational ``x``, computed on integers only."""
        x = Fraction(x)
        a, b = x.numerator, x.denominator
        acc = 0
        bpow = 1
        # b**d * p(a/b) = sum c_i a**i b**(d-i), Horner in a with b-weights.
        for c in reversed(self.coeffs):
            acc = acc * a + c * bpow
            bpow *= b
        return _sign(acc)

    def sign_changes(self) -> int:
        """Descartes count: sign variations of the coefficient sequence."""
        signs = [_sign(c) for c in self.coeffs if c != 0]
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def cauchy_bound(self) -> int:
        """Integer strictly larger than the absolute value of every root."""
        lead = abs(self.coeffs[-1])
        return 1 + -(-max(abs(c) for c in self.coeffs[:-1]) // lead) if self.degree > 0 else 1

    def sturm_sequence(self) -> list[list[Fraction]]:
        seq = [[Fraction(c) for c in self.coeffs], [Fraction(c) for c in self.derivative().coeffs]]
        while seq[-1]:
            rem = _poly_rem(seq[-2], seq[-1])
            if not rem:
                break
            seq.append([-c for c in rem])
        return seq

    def count_roots(self, lo, hi) -> int:
        """Number of distinct real roots in the half-open interval ``(lo, hi]``."""
        seq = self.sturm_sequence()
        return _variations(seq, Fraction(lo)) - _variations(seq, Fraction(hi))

    def count_positive_roots(self) -> int:
        """Distinct roots in ``(0, inf)`` by Sturm's theorem."""
        seq = self.sturm_sequence()
        at_inf = [_sign(p[-1]) for p in seq if p]
        v_inf = sum(1 for s, t in zip(at_inf, at_inf[1:]) if s != t)
        return _variations(seq, Fraction(0)) - v_inf

    def __str__(self):
        return ",".join(str(c) for c in self.coeffs)


def _poly_rem(num: list[Fraction], den: list[Fraction]) -> list[Fraction]:
    num = list(num)
    dlead = den[-1]
    dd = len(den) - 1
    while len(num) - 1 >= dd and num:
        factor = num[-1] / dlead
        shift = len(num) - 1 - dd
        for i, c in enumerate(den):
            num[shift + i] -= factor * c
        num.pop()
        num = _strip(num)
    return num


def _eval(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _variations(seq, x: Fraction) -> int:
    signs = [_sign(_eval(p, x)) for p in seq if p]
    signs = [s for s in signs if s != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def bisect_root(p: IntPolynomial, lo, hi, bits: int) -> IntervalReal:
    """Shrink a sign-change bracket of ``p`` to width ``<= 2**-bits``.

    ``p(lo)`` and ``p(hi)`` must have strictly opposite signs.  The result
    has dyadic endpoints; a rational root hit exactly is returned as a point.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    s_lo, s_hi = p.sign_at(lo), p.sign_at(hi)
    if s_lo * s_hi >= 0:
        raise ValueError(f"no certified sign change on [{lo}, {hi}]")
    target = Fraction(1, 1 << (bits + 1))
    while hi - lo > target:
        mid = (lo + hi) / 2
        s = p.sign_at(mid)
        if s == 0:
            return IntervalReal.exact(mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return IntervalReal(floor_dyadic(lo, bits + 2), ceil_dyadic(hi, bits + 2))
