"""Minimal points of (xi, n) and the structure built on them.

Convention: the sequence starts at the first point with ``L_xi < 1/2``.
Below 1/2 every coordinate of a point is forced to be the nearest integer
to ``x_0 xi**j``, so scanning the rounding candidates ``x_0 = 1, 2, ...``
is complete.  Candidate norms strictly increase with ``x_0``, which makes
the staircase a running-minimum filter.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (ContractViolation, DegenerateXi, DimensionMismatch, InputError,
                     RoundingUnresolved, TieUnresolved)
from .interval import (DEFAULT_MAX_BITS, IntervalReal, Order, certified_compare,
                       interval_max, interval_min, log_interval, sqrt_interval)
from .lattice import IntegerVector, Subspace, L_xi, determinant, rank, wedge_norm_squared
from .projections import u_ell_dim, windows

CHUNK = 1 << 18


@dataclass(frozen=True)
class MinimalPointRecord:
    index: int
    x: tuple[int, ...]
    X_squared: int
    L: IntervalReal
    in_I: bool | None = None

    def to_json(self) -> dict:
        return {"i": self.index, "x": list(self.x), "X_squared": self.X_squared,
                "L_lo": _frac_text(self.L.lo), "L_hi": _frac_text(self.L.hi),
                "in_I": self.in_I}

    @classmethod
    def from_json(cls, obj: dict) -> "MinimalPointRecord":
        return cls(int(obj["i"]), tuple(int(c) for c in obj["x"]), int(obj["X_squared"]),
                   IntervalReal(Fraction(obj["L_lo"]), Fraction(obj["L_hi"])), obj.get("in_I"))


def _frac_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _term(x: Sequence[int], j: int) -> list[int]:
    # x_0 t^j - x_j as an integer polynomial in t
    coeffs = [0] * (j + 1)
    coeffs[0] -= x[j]
    coeffs[j] += x[0]
    return coeffs


def _neg(p: list[int]) -> list[int]:
    return [-c for c in p]


def _strip(p: list[int]) -> list[int]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _abs_equal(xi, p: list[int], q: list[int]) -> bool:
    # identical polynomials agree at any xi; otherwise ask the oracle
    if _strip(p) in (_strip(q), _strip(_neg(q))):
        return True
    return xi.proves_equal(p, q) or xi.proves_equal(p, _neg(q))


# -- exact candidate evaluation -------------------------------------------------


@dataclass(frozen=True)
class _Cand:
    x: tuple[int, ...] | None  # None for the 1/2 threshold sentinel
    lo: int
    hi: int
    scale: int  # L in [lo, hi] / 2**scale
    term_lo: tuple[int, ...] = ()
    term_hi: tuple[int, ...] = ()

    def interval(self) -> IntervalReal:
        return IntervalReal(Fraction(self.lo, 1 << self.scale), Fraction(self.hi, 1 << self.scale))


_HALF = _Cand(None, 1, 1, 1)


class _Engine:
    """Fixed-point evaluation of rounding candidates for one (xi, n)."""

    def __init__(self, xi, n: int, max_bits: int):
        self.xi, self.n, self.max_bits = xi, n, max_bits
        self._powers: dict[int, tuple[int, list[int], list[int]]] = {}

    def powers(self, bits: int):
        hit = self._powers.get(bits)
        if hit is None:
            scale = bits + 2
            lo, hi = [0], [0]
            for j in range(1, self.n + 1):
                iv = self.xi.power_enclosure(j, bits)
                lo.append((iv.lo.numerator << scale) // iv.lo.denominator)
                hi.append(-((-iv.hi.numerator << scale) // iv.hi.denominator))
            hit = (scale, lo, hi)
            self._powers[bits] = hit
        return hit

    def start_bits(self, x0: int) -> int:
        return min(self.max_bits, -(-(x0.bit_length() + 40) // 32) * 32)

    def try_eval(self, x0: int, bits: int):
        """Candidate at precision ``bits``; ``None`` means "refine"."""
        scale, a, b = self.powers(bits)
        one = 1 << scale
        half = one >> 1
        x = [x0]
        tl, th = [], []
        for j in range(1, self.n + 1):
            lo, hi = x0 * a[j], x0 * b[j]
            r = (lo + half) >> scale
            if not (lo > r * one - half and hi < r * one + half):
                return None
            x.append(r)
            dlo, dhi = lo - r * one, hi - r * one
            if dlo >= 0:
                tl.append(dlo)
                th.append(dhi)
            elif dhi <= 0:
                tl.append(-dhi)
                th.append(-dlo)
            else:
                tl.append(0)
                th.append(max(-dlo, dhi))
        return _Cand(tuple(x), max(tl), max(th), scale, tuple(tl), tuple(th))

    def evaluate(self, x0: int, bits: int | None = None):
        bits = bits or self.start_bits(x0)
        while True:
            cand = self.try_eval(x0, bits)
            if cand is not None:
                return cand
            if bits >= self.max_bits:
                if self._half_integer_proved(x0, bits):
                    return None
                raise RoundingUnresolved(f"rounding of candidate x0={x0} unresolved at {bits} bits",
                                         bits=bits)
            bits = min(2 * bits, self.max_bits)

    def _half_integer_proved(self, x0: int, bits: int) -> bool:
        # some x0 xi^j is exactly a half-integer, so L >= 1/2 for this x0
        scale, a, b = self.powers(bits)
        one = 1 << scale
        for j in range(1, self.n + 1):
            v = Fraction(x0 * a[j], one)
            k = math.floor(v * 2)
            for c in (k - 1, k, k + 1):
                poly = [0] * (j + 1)
                poly[0] -= c
                poly[j] += 2 * x0
                if self.xi.proves_equal(poly, [0]):
                    return True
        return False

    def refine(self, cand: _Cand, bits: int) -> _Cand:
        if cand.x is None:
            return cand
        out = self.try_eval(cand.x[0], bits)
        return out if out is not None else cand

    def less(self, cand: _Cand, best: _Cand) -> bool:
        """Certified ``L(cand) < L(best)``; exact ties count as not less."""
        bits = max(cand.scale, best.scale) - 2
        while True:
            s = max(cand.scale, best.scale)
            c_lo, c_hi = cand.lo << (s - cand.scale), cand.hi << (s - cand.scale)
            b_lo, b_hi = best.lo << (s - best.scale), best.hi << (s - best.scale)
            if c_hi < b_lo:
                return True
            if c_lo > b_hi:
                return False
            if bits >= self.max_bits:
                if self._tie_proved(cand, best):
                    return False
                raise TieUnresolved(
                    f"cannot separate L({cand.x}) and L({best.x}) at {bits} bits",
                    first=best.x, second=cand.x, bits=bits)
            bits = min(2 * bits, self.max_bits)
            cand, best = self.refine(cand, bits), self.refine(best, bits)

    def _argmax_terms(self, cand: _Cand) -> list[list[int]]:
        return [_term(cand.x, j + 1) for j, hi in enumerate(cand.term_hi) if hi >= cand.lo]

    def _tie_proved(self, cand: _Cand, best: _Cand) -> bool:
        ca = self._argmax_terms(cand)
        if best.x is None:
            return all(_abs_equal(self.xi, [2 * c for c in p], [1]) for p in ca)
        ba = self._argmax_terms(best)
        ref = ca[0]
        return all(_abs_equal(self.xi, ref, p) for p in ca + ba)


def candidate(x0: int, xi, n: int, max_bits: int = DEFAULT_MAX_BITS) -> IntegerVector:
    """``(x0, round(x0 xi), ..., round(x0 xi^n))`` with certified roundings."""
    if x0 < 1:
        raise InputError("x0 must be a positive integer")
    engine = _Engine(xi, n, max_bits)
    cand = engine.evaluate(x0)
    if cand is None:
        raise RoundingUnresolved(f"x0={x0}: some x0 xi^j is a half-integer")
    return IntegerVector(cand.x)


def _float_powers(xi, n: int) -> np.ndarray:
    return np.array([float(xi.power_enclosure(j, 64).mid) for j in range(1, n + 1)])


def _x0_limit(xi, n: int, x_max: int) -> int:
    # candidates have ||x|| >= x0 ||Xi|| - sqrt(n)/2
    enc = [xi.power_enclosure(j, 32) for j in range(n + 1)]
    norm_sq_lo = sum(min(e.lo * e.lo, e.hi * e.hi) if e.lo * e.hi > 0 else 0 for e in enc)
    norm_lo = sqrt_interval(norm_sq_lo, 32).lo
    return int((x_max + Fraction(math.isqrt(n) + 1, 2)) / norm_lo) + 1


def _scan(xi, n: int, x_max: int, x0_lo: int, x0_hi: int, max_bits: int) -> list[_Cand]:
    """Local staircase of candidates with x0 in [x0_lo, x0_hi]."""
    engine = _Engine(xi, n, max_bits)
    x_max_sq = x_max * x_max
    best = _HALF
    out: list[_Cand] = []
    use_float = x0_hi < (1 << 50)
    if use_float:
        c = _float_powers(xi, n)
        margin = x0_hi * max(1.0, float(np.max(np.abs(c)))) * 2.0 ** -48 + 2.0 ** -48
    start = x0_lo
    while start <= x0_hi:
        stop = min(x0_hi, start + CHUNK - 1)
        if use_float:
            xs = np.arange(start, stop + 1, dtype=np.float64)
            worst = np.zeros_like(xs)
            for cj in c:
                v = xs * cj
                np.maximum(worst, np.abs(v - np.rint(v)), out=worst)
            threshold = float(best.hi) / float(1 << best.scale) + margin
            survivors = (np.nonzero(worst <= threshold)[0] + start).tolist()
        else:
            survivors = range(start, stop + 1)
        for x0 in survivors:
            cand = engine.evaluate(int(x0))
            if cand is None:
                continue
            if sum(v * v for v in cand.x) > x_max_sq:
                return out
            if engine.less(cand, best):
                best = cand
                out.append(cand)
        start = stop + 1
    return out


def _scan_star(args):
    return _scan(*args)


def _finish(xi, n: int, points: list[tuple[tuple[int, ...], IntervalReal]]) -> list[MinimalPointRecord]:
    records = []
    for i, (x, L) in enumerate(points):
        if i == 0:
            in_i = False
        elif i + 1 < len(points):
            in_i = rank([points[i - 1][0], x, points[i + 1][0]]) == 3
        else:
            in_i = None
        records.append(MinimalPointRecord(i, tuple(x), sum(c * c for c in x), L, in_i))
    return records


def _check_degree(xi, n: int, allow_degenerate: bool):
    if xi.degree is not None and xi.degree <= n and not allow_degenerate:
        raise DegenerateXi(f"xi has degree {xi.degree} <= n = {n}")


def enumerate_minimal_points(xi, n: int, x_max: int, max_bits: int = DEFAULT_MAX_BITS,
                             shards: int = 1, allow_degenerate: bool = False) -> list[MinimalPointRecord]:
    """Minimal points of norm ``<= x_max``, in order of increasing norm.

    Candidate generation can be split over ``shards`` processes by ranges
    of ``x0``; the merge is order-deterministic, so the output does not
    depend on the shard count.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    _check_degree(xi, n, allow_degenerate)
    if x_max < 1:
        return []
    end = _x0_limit(xi, n, x_max)
    shards = max(1, min(shards, end))
    cuts = [1 + (end * s) // shards for s in range(shards + 1)]
    jobs = [(xi, n, x_max, cuts[s], cuts[s + 1] - 1, max_bits) for s in range(shards)]
    if shards == 1:
        locals_ = [_scan(*jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=shards) as pool:
            locals_ = list(pool.map(_scan_star, jobs))
    engine = _Engine(xi, n, max_bits)
    best = _HALF
    merged = []
    for part in locals_:
        for cand in part:
            if engine.less(cand, best):
                best = cand
                merged.append(cand)
    return _finish(xi, n, [(c.x, c.interval()) for c in merged])


def brute_force_minimal_points(xi, n: int, x_max: int, max_bits: int = DEFAULT_MAX_BITS,
                               allow_degenerate: bool = False) -> list[MinimalPointRecord]:
    """Exhaustive reference: every integer point with ``x0 >= 0``,
    ``||x|| <= x_max`` and ``L_xi(x) < 1``, then the record minima.

    Independent of the rounding engine: coordinates range over every
    integer within distance 1 of ``x0 xi^j`` and L is evaluated through
    generic interval arithmetic.
    """
    if x_max > 1000:
        raise InputError("brute force is limited to x_max <= 1000")
    _check_degree(xi, n, allow_degenerate)
    if x_max < 1:
        return []
    bound = x_max * x_max
    bits = 48
    points = []
    for x0 in range(0, x_max + 1):
        if x0 * x0 > bound:
            break
        choices = []
        for j in range(1, n + 1):
            v = x0 * xi.power_enclosure(j, bits)
            choices.append(range(math.ceil(v.lo - 1), math.floor(v.hi + 1) + 1))
        for tail in _product(choices):
            x = (x0,) + tail
            if not any(x) or sum(c * c for c in x) > bound:
                continue
            if L_xi(x, xi, bits).lo >= 1:
                continue
            points.append(x)
    points.sort(key=lambda p: (sum(c * c for c in p), p))

    def producer(x):
        return lambda k: L_xi(x, xi, k)

    def lt(x, y) -> bool:
        other = producer(y) if y is not None else Fraction(1)
        res = certified_compare(producer(x), other, max_bits)
        if res.order is Order.UNRESOLVED:
            if y is not None and _brute_tie(xi, x, y, res.bits):
                return False
            raise TieUnresolved(f"cannot order L({x}) and L({y})", first=y, second=x, bits=res.bits)
        return res.order is Order.LESS

    best = None
    records = []
    i = 0
    while i < len(points):
        j = i
        norm = sum(c * c for c in points[i])
        group = []
        while j < len(points) and sum(c * c for c in points[j]) == norm:
            group.append(points[j])
            j += 1
        low = group[0]
        for p in group[1:]:
            if lt(p, low):
                low = p
        if best is None or lt(low, best):
            best = low
            records.append(low)
        i = j
    half = Fraction(1, 2)
    kept = [x for x in records
            if certified_compare(producer(x), half, max_bits).order is Order.LESS]
    return _finish(xi, n, [(x, L_xi(x, xi, 64)) for x in kept])


def _product(ranges):
    if not ranges:
        yield ()
        return
    for head in ranges[0]:
        for rest in _product(ranges[1:]):
            yield (head,) + rest


def _brute_tie(xi, x, y, bits) -> bool:
    lx, ly = L_xi(x, xi, bits), L_xi(y, xi, bits)

    def near_max(p, L):
        out = []
        for j in range(1, len(p)):
            t = abs(p[0] * xi.power_enclosure(j, bits + 8) - p[j])
            if t.hi >= L.lo:
                out.append(_term(p, j))
        return out

    terms = near_max(x, lx) + near_max(y, ly)
    return all(_abs_equal(xi, terms[0], t) for t in terms)


# -- structure ---------------------------------------------------------------------


class _RankTracker:
    def __init__(self):
        self.rows: list[tuple[int, list[int]]] = []

    def add(self, v: Sequence[int]) -> bool:
        v = list(v)
        for col, row in self.rows:
            if v[col]:
                p, q = row[col], v[col]
                v = [p * a - q * b for a, b in zip(v, row)]
        col = next((k for k, c in enumerate(v) if c), None)
        if col is None:
            return False
        g = math.gcd(*v)
        self.rows.append((col, [c // g for c in v]))
        return True


@dataclass
class StructureIndex:
    n: int
    records: list[MinimalPointRecord]
    I: list[int]
    sigma: dict[tuple[int, int], int]
    Y_squared: dict[tuple[int, int], int]
    height_ratios: list[tuple[int, int, IntervalReal]] = field(default_factory=list)
    _spaces: dict = field(default_factory=dict, repr=False)

    def A(self, j: int, i: int) -> Subspace | None:
        """A_j(i), or ``None`` when the computed range does not determine it."""
        if j == self.n:
            return Subspace.full(self.n + 1)
        q = self.sigma.get((j, i))
        if q is None:
            return None
        key = (j, i)
        if key not in self._spaces:
            self._spaces[key] = Subspace.from_spanning_set(
                [r.x for r in self.records[i:q + 1]], self.n + 1)
        return self._spaces[key]

    def spanning(self, j: int, i: int) -> list[tuple[int, ...]] | None:
        q = self.sigma.get((j, i))
        if q is None:
            return None
        return [r.x for r in self.records[i:q + 1]]


def _X(record: MinimalPointRecord, bits: int) -> IntervalReal:
    return sqrt_interval(record.X_squared, bits)


def build_structure(records: Sequence[MinimalPointRecord], bits: int = 64) -> StructureIndex:
    """Index set I, sigma_j(i), Y_j(i) and the X L ratio diagnostics."""
    records = list(records)
    if len(records) < 3:
        raise InputError("need at least 3 records")
    n = len(records[0].x) - 1
    xs = [r.x for r in records]
    I = [i for i in range(1, len(xs) - 1) if rank(xs[i - 1:i + 2]) == 3]
    sigma: dict[tuple[int, int], int] = {}
    Y: dict[tuple[int, int], int] = {}
    for i in range(len(xs)):
        Y[(-1, i)] = records[i].X_squared
        tracker = _RankTracker()
        tracker.add(xs[i])
        d = 1
        for q in range(i, len(xs) - 1):
            if d >= n + 1:
                break
            if tracker.add(xs[q + 1]):
                sigma[(d - 1, i)] = q
                Y[(d - 1, i)] = records[q + 1].X_squared
                d += 1
    ratios = []
    for a, b in zip(I, I[1:]):
        num = _X(records[b], bits) * records[b - 1].L
        den = _X(records[a + 1], bits) * records[a].L
        ratios.append((a, b, num / den))
    return StructureIndex(n, records, I, sigma, Y, ratios)


def consecutive_heights(records: Sequence[MinimalPointRecord], bits: int = 64):
    """For each i: exact check H(<x_i, x_{i+1}>)^2 == ||x_i ∧ x_{i+1}||^2 and the
    diagnostic ratio ||x_i ∧ x_{i+1}|| / (X_{i+1} L_i)."""
    out = []
    for a, b in zip(records, records[1:]):
        wedge = wedge_norm_squared([a.x, b.x])
        height = Subspace.from_spanning_set([a.x, b.x]).height_squared
        ratio = sqrt_interval(wedge, bits) / (_X(b, bits) * a.L)
        out.append((a.index, height == wedge, ratio))
    return out


@dataclass(frozen=True)
class PReport:
    j: int
    ell: int
    i0: int
    checked: tuple[int, ...]
    first_violation: tuple[int, int, int] | None  # (i, m, dim U^ell(A_m(i)))
    label: str = "on computed range"

    @property
    def passed(self) -> bool:
        return bool(self.checked) and self.first_violation is None

    def to_json(self) -> dict:
        return {"j": self.j, "ell": self.ell, "i0": self.i0, "checked": list(self.checked),
                "passed": self.passed, "first_violation": self.first_violation,
                "label": self.label}


def check_P(records: Sequence[MinimalPointRecord], structure: StructureIndex,
            j: int, ell: int, i0: int) -> PReport:
    """dim U^ell(A_m(i)) >= m + ell + 1 for m <= j and every i >= i0 that the
    records determine."""
    n = structure.n
    if not (0 <= j <= n and 0 <= ell <= n and i0 >= 0):
        raise InputError(f"need 0 <= j, ell <= n and i0 >= 0 (j={j}, ell={ell}, n={n})")
    checked = []
    violation = None
    for i in range(i0, len(records)):
        dims = []
        for m in range(j + 1):
            if m == n:
                dims.append(n + 1 - ell)
                continue
            vecs = structure.spanning(m, i)
            if vecs is None:
                break
            dims.append(u_ell_dim(vecs, ell))
        if len(dims) < j + 1:
            break
        checked.append(i)
        bad = next((m for m, dm in enumerate(dims) if dm < m + ell + 1), None)
        if bad is not None:
            violation = (i, bad, dims[bad])
            break
    report = PReport(j, ell, i0, tuple(checked), violation)
    if report.passed and j + 2 * ell > n:
        raise ContractViolation("property P(j, ell) passed although j + 2 ell > n",
                                {"j": j, "ell": ell, "n": n, "checked": checked})
    return report


# -- exponents -----------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentEstimate:
    lambda_hat_running: tuple[IntervalReal | None, ...]
    lambda_running: tuple[IntervalReal | None, ...]
    window: int
    lambda_hat_liminf: IntervalReal | None
    lambda_limsup: IntervalReal | None
    lambda_hat_slope: float | None
    lambda_slope: float | None


def _slope(points: list[tuple[float, float]]) -> float | None:
    if len(points) < 2:
        return None
    mx = sum(p[0] for p in points) / len(points)
    my = sum(p[1] for p in points) / len(points)
    sxx = sum((p[0] - mx) ** 2 for p in points)
    if sxx == 0:
        return None
    return sum((p[0] - mx) * (p[1] - my) for p in points) / sxx


def estimate_exponents(records: Sequence[MinimalPointRecord], window: int | None = None,
                       bits: int = 64) -> ExponentEstimate:
    """Running values of -log L_i / log X_i and -log L_i / log X_{i+1}.

    Over the trailing ``window`` records (default: the last half) this also
    reports the smallest / largest running value, and the least-squares
    slope of ``-log L_i`` against ``log X_{i+1}`` (resp. ``log X_i``), a proxy
    that cancels the bounded multiplicative constants slowing the raw ratios.
    """
    records = list(records)
    if len(records) < 2:
        raise InputError("need at least 2 records")
    logs_x = [log_interval(r.X_squared, bits) * Fraction(1, 2) for r in records]
    logs_l = [-log_interval(r.L, bits) for r in records]
    lam, lam_hat = [], []
    for i in range(len(records)):
        lam.append(logs_l[i] / logs_x[i] if logs_x[i].lo > 0 else None)
        lam_hat.append(logs_l[i] / logs_x[i + 1] if i + 1 < len(records) else None)
    if window is None:
        window = max(2, len(records) // 2)
    hat_idx = [i for i in range(len(records) - 1)][-window:]
    lam_idx = [i for i in range(len(records)) if lam[i] is not None][-window:]
    hat_vals = [lam_hat[i] for i in hat_idx]
    lam_vals = [lam[i] for i in lam_idx]
    return ExponentEstimate(
        tuple(lam_hat), tuple(lam), window,
        interval_min(*hat_vals) if hat_vals else None,
        interval_max(*lam_vals) if lam_vals else None,
        _slope([(float(logs_x[i + 1].mid), float(logs_l[i].mid)) for i in hat_idx]),
        _slope([(float(logs_x[i].mid), float(logs_l[i].mid)) for i in lam_idx]),
    )


# -- the C(V, x) construction --------------------------------------------------------------


def construct_C(V: Subspace, x: Sequence[int], k: int, ell: int) -> IntegerVector:
    """``(det(z_1..z_k, x^(0,ell)), ..., det(z_1..z_k, x^(ell,ell)))``.

    ``z_1..z_k`` is the canonical basis of V; the result is linear in x and
    vanishes exactly when U^ell(x) lies in V.
    """
    if k < 1 or ell < 1:
        raise DimensionMismatch("k and ell must be >= 1")
    if V.ambient_dim != k + 1 or V.dim != k:
        raise DimensionMismatch(f"V must be a {k}-dimensional subspace of R^{k + 1}")
    if len(x) != k + ell + 1:
        raise DimensionMismatch(f"x must have {k + ell + 1} coordinates")
    z = [list(v) for v in V.basis]
    return IntegerVector(tuple(determinant(z + [list(w)]) for w in windows(x, ell)))
