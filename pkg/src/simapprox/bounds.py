"""Certified values of the explicit upper bounds for the uniform exponent
of simultaneous approximation.

Odd ``n = 2m+1``: ``alpha_m``, the positive root of ``P_m``.  Even
``n = 2m``: ``beta_m``, the positive root of ``Q_m``.  For every ``n``:
``1 / (n/2 + a sqrt(n) + 1/3)`` with ``a = (1 - log 2) / 2``.  Every number
is an :class:`IntervalReal` whose endpoints carry a sign certificate or
come from outward-rounded interval arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (AmbiguousRootCount, FloorUnresolved, HypothesisUnmet, InputError,
                     NoPositiveRoot, PrecisionExhausted)
from .interval import DEFAULT_MAX_BITS, IntervalReal, log2_constant, sqrt_interval
from .poly import IntPolynomial


def unique_positive_root(p: IntPolynomial, bits: int = 64, interval=None) -> IntervalReal:
    """The only positive root of ``p`` (or the only root in ``interval``).

    Uniqueness comes from Descartes' rule when it gives one sign change and
    from a Sturm count otherwise.  The returned endpoints are bisection
    points, so ``p(lo) * p(hi) < 0`` holds exactly (unless a rational root
    was hit, in which case the interval is that point).
    """
    if not isinstance(p, IntPolynomial):
        p = IntPolynomial(tuple(p))
    if interval is not None:
        lo, hi = Fraction(interval[0]), Fraction(interval[1])
        count = p.count_roots(lo, hi)
        if count == 0:
            raise NoPositiveRoot(f"{p} has no root in ({lo}, {hi}]")
        if count > 1:
            raise AmbiguousRootCount(f"{p} has {count} roots in ({lo}, {hi}]")
    else:
        if p.degree < 1 or p.coeffs[0] == 0:
            raise InputError("need a non-constant polynomial with p(0) != 0")
        changes = p.sign_changes()
        count = 1 if changes == 1 else (0 if changes == 0 else p.count_positive_roots())
        if count == 0:
            raise NoPositiveRoot(f"{p} has no positive root")
        if count > 1:
            raise AmbiguousRootCount(f"{p} has {count} positive roots")
        lo, hi = Fraction(0), Fraction(p.cauchy_bound())
    s_lo, s_hi = p.sign_at(lo), p.sign_at(hi)
    if s_hi == 0:
        return IntervalReal.exact(hi)
    if s_lo * s_hi >= 0:
        raise AmbiguousRootCount(f"{p} has no sign change on [{lo}, {hi}] (multiple root)")
    target = Fraction(1, 1 << bits)
    while hi - lo > target:
        mid = (lo + hi) / 2
        s = p.sign_at(mid)
        if s == 0:
            return IntervalReal.exact(mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return IntervalReal(lo, hi)


def P_m(m: int) -> IntPolynomial:
    return IntPolynomial((1, -(m + 1), -m))


def Q_m(m: int) -> IntPolynomial:
    if m == 2:
        return IntPolynomial((1, -3, 1, -2, -2))
    return IntPolynomial((1, -m, -m, -m * (m - 1)))


def R_m(m: int) -> IntPolynomial:
    return IntPolynomial((1, -(m + 1), -(m - 1)))


def _check_m(m: int):
    if m < 2:
        raise InputError(f"m must be >= 2, got {m}")


def alpha(m: int, bits: int = 64) -> IntervalReal:
    """Bound for n = 2m+1."""
    _check_m(m)
    return unique_positive_root(P_m(m), bits)


def beta(m: int, bits: int = 64) -> IntervalReal:
    """Bound for n = 2m."""
    _check_m(m)
    return unique_positive_root(Q_m(m), bits)


def new_bound(n: int, bits: int = 64) -> IntervalReal:
    if n < 4:
        raise InputError("the polynomial bounds need n >= 4")
    return alpha((n - 1) // 2, bits) if n % 2 else beta(n // 2, bits)


def _general_denominator(n: int, bits: int) -> IntervalReal:
    a = (1 - log2_constant(bits)) / 2
    return Fraction(n, 2) + a * sqrt_interval(n, bits) + Fraction(1, 3)


def thm11_bound(n: int, bits: int = 64) -> IntervalReal:
    """Enclosure of ``1 / (n/2 + a sqrt(n) + 1/3)`` of width ``<= 2**-bits``."""
    if n < 2:
        raise InputError("need n >= 2")
    prec = bits + 8
    while True:
        out = 1 / _general_denominator(n, prec)
        if out.width <= Fraction(1, 1 << bits):
            return out
        prec += 16


def tau_lower(n: int, bits: int = 64) -> IntervalReal:
    """``n/2 + a sqrt(n) + 4/3``, the matching lower bound for tau_{n+1}."""
    return _general_denominator(n, bits) + 1


# -- verification of the large-n conditions --------------------------------------------


@dataclass(frozen=True)
class LargeNCheck:
    n: int
    ell: int
    k: int
    theta: IntervalReal
    theta_k: IntervalReal
    eta: IntervalReal
    inv_lambda: IntervalReal
    bits: int
    passed: bool

    def to_json(self) -> dict:
        return {"n": self.n, "ell": self.ell, "k": self.k,
                "theta": float(self.theta.mid), "theta_k": float(self.theta_k.mid),
                "eta": float(self.eta.mid), "inv_lambda": float(self.inv_lambda.mid),
                "bits": self.bits, "status": "PASS" if self.passed else "FAIL"}


def _certified_floor(x: IntervalReal) -> int | None:
    lo, hi = math.floor(x.lo), math.floor(x.hi)
    return lo if lo == hi else None


def _check_one(n: int, bits: int, max_bits: int) -> LargeNCheck:
    while True:
        root = sqrt_interval(n, bits)
        ln2 = log2_constant(bits)
        ell = _certified_floor(Fraction(n, 2) - ln2 / 2 * root + 1)
        if ell is not None:
            k = n - 2 * ell
            if not 1 <= k <= ell:
                raise HypothesisUnmet(f"n={n}: need 1 <= k <= ell, got k={k}, ell={ell}")
            inv_lam = Fraction(n, 2) + (1 - ln2) / 2 * root + Fraction(1, 3)
            theta = ell / (inv_lam - 1)
            theta_k = theta ** k
            eta = IntervalReal.exact(ell - 1)
            power = IntervalReal.exact(1)
            for _ in range(k + 2):
                eta = eta + power
                power = power * theta
            checks = [theta_k.certainly_ge(Fraction(1, 2)), theta_k.certainly_lt(1),
                      eta.certainly_gt(inv_lam)]
            refuted = [theta_k.certainly_lt(Fraction(1, 2)), theta_k.certainly_ge(1),
                       eta.certainly_le(inv_lam)]
            if all(checks) or any(refuted):
                return LargeNCheck(n, ell, k, theta, theta_k, eta, inv_lam, bits, all(checks))
        if bits >= max_bits:
            if ell is None:
                raise FloorUnresolved(f"n={n}: floor for ell unresolved at {bits} bits", bits=bits)
            raise PrecisionExhausted(f"n={n}: conditions undecided at {bits} bits", bits=bits)
        bits = min(2 * bits, max_bits)


def verify_thm11_conditions(n_from: int, n_to: int, bits: int = 64,
                            max_bits: int = DEFAULT_MAX_BITS) -> list[LargeNCheck]:
    """For each n: ``1/2 <= theta**k < 1`` and ``eta > 1/lambda``, certified."""
    if not 12 <= n_from <= n_to:
        raise InputError("need 12 <= n_from <= n_to")
    return [_check_one(n, bits, max_bits) for n in range(n_from, n_to + 1)]


# -- bracketing ------------------------------------------------------------------------


@dataclass(frozen=True)
class BracketCheck:
    m: int
    alpha_ok: bool
    beta_ok: bool
    values: dict

    @property
    def passed(self) -> bool:
        return self.alpha_ok and self.beta_ok

    def to_json(self) -> dict:
        return {"m": self.m, "alpha": self.alpha_ok, "beta": self.beta_ok,
                "status": "PASS" if self.passed else "FAIL",
                **{k: str(v) for k, v in self.values.items()}}


def _root_between(p: IntPolynomial, lo: Fraction, hi: Fraction) -> tuple[bool, Fraction, Fraction]:
    # p has a single positive root and p(0) > 0: the root is in (lo, hi)
    # exactly when p(lo) > 0 > p(hi)
    a, b = p(lo), p(hi)
    return a > 0 > b, a, b


def bracket_check(m_from: int, m_to: int) -> list[BracketCheck]:
    """``1/(m+2) < alpha_m < 1/(m+2) + 2/(m+2)^3`` and the same for beta_m
    with 7 in place of 2, by exact evaluation at the rational endpoints."""
    if m_from < 2:
        raise InputError("need m_from >= 2")
    out = []
    for m in range(m_from, m_to + 1):
        base = Fraction(1, m + 2)
        p, q = P_m(m), Q_m(m)
        for poly in (p, q):
            if poly.coeffs[0] <= 0 or poly.count_positive_roots() != 1:
                raise AmbiguousRootCount(f"{poly} does not have a single positive root")
        a_ok, pa, pb = _root_between(p, base, base + Fraction(2, (m + 2) ** 3))
        b_ok, qa, qb = _root_between(q, base, base + Fraction(7, (m + 2) ** 3))
        out.append(BracketCheck(m, a_ok, b_ok, {"P_lo": pa, "P_hi": pb, "Q_lo": qa, "Q_hi": qb}))
    return out


# -- comparison table -----------------------------------------------------------------------

# values printed for earlier bounds; kept verbatim, not recomputed
_SCHLEISCHITZ = {4: "0.3706", 6: "0.2681", 8: "0.2107", 10: "0.1737", 12: "0.1478"}
_BADZIAHIN = {4: "0.3660", 6: "0.2637", 8: "0.2071", 10: "0.1708", 12: "0.1454"}


@dataclass(frozen=True)
class BoundRow:
    n: int
    laurent: Fraction | None
    schleischitz: str | None
    badziahin: str | None
    new_bound: IntervalReal
    tau_lower: IntervalReal  # 1 + 1/new_bound
    thm11: IntervalReal
    tau_thm11: IntervalReal  # n/2 + a sqrt(n) + 4/3

    def display(self, digits: int = 4) -> dict:
        return {"n": self.n,
                "laurent": truncate(self.laurent, digits) if self.laurent is not None else "",
                "schleischitz": self.schleischitz or "",
                "badziahin": self.badziahin or "",
                "new": truncate(self.new_bound, digits),
                "tau_lower": truncate(self.tau_lower, digits),
                "thm11": truncate(self.thm11, digits),
                "tau_thm11": truncate(self.tau_thm11, digits)}


def truncate(value, digits: int) -> str:
    """Decimal truncation of a positive number, certified for intervals."""
    scale = 10 ** digits
    if isinstance(value, IntervalReal):
        lo, hi = math.floor(value.lo * scale), math.floor(value.hi * scale)
        if lo != hi:
            raise PrecisionExhausted(f"interval {value} too wide for {digits} digits")
        t = lo
    else:
        t = math.floor(Fraction(value) * scale)
    whole, frac = divmod(t, scale)
    return f"{whole}.{frac:0{digits}d}" if digits else str(whole)


def emit_table1(bits: int = 64) -> list[BoundRow]:
    """Rows n = 4..13 of the comparison table."""
    rows = []
    for n in range(4, 14):
        laurent = Fraction(1, (n + 1) // 2) if n % 2 else None
        nb = new_bound(n, bits)
        rows.append(BoundRow(n, laurent, _SCHLEISCHITZ.get(n), _BADZIAHIN.get(n),
                             nb, 1 + 1 / nb, thm11_bound(n, bits), tau_lower(n, bits)))
    return rows
