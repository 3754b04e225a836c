"""Window projections U^ell and their dimension profiles.

For ``x`` in R^{n+1} and ``0 <= k <= ell <= n`` the window ``x^(k,ell)`` is
the run of ``n+1-ell`` consecutive coordinates starting at ``k``; U^ell(A)
is the span of all windows of all points of A.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import ContractViolation, HypothesisUnmet, IndexOutOfRange, SearchExhausted
from .interval import IntervalReal
from .lattice import IntegerVector, Subspace, rank


def window(x: Sequence[int], k: int, ell: int) -> IntegerVector:
    """The coordinates ``x_k, ..., x_{k+n-ell}`` of ``x = (x_0..x_n)``."""
    n = len(x) - 1
    if not 0 <= k <= ell <= n:
        raise IndexOutOfRange(f"need 0 <= k <= ell <= n, got k={k}, ell={ell}, n={n}")
    return IntegerVector(tuple(x[k:k + n - ell + 1]))


def windows(x: Sequence[int], ell: int) -> list[tuple[int, ...]]:
    n = len(x) - 1
    return [tuple(x[k:k + n - ell + 1]) for k in range(ell + 1)]


def _all_windows(vectors: Iterable[Sequence[int]], ell: int) -> list[tuple[int, ...]]:
    return [w for v in vectors for w in windows(v, ell)]


def u_ell(A: Subspace, ell: int) -> Subspace:
    """U^ell(A) as a saturated subspace of R^{n+1-ell}."""
    n = A.ambient_dim - 1
    if not 0 <= ell <= n + 1:
        raise IndexOutOfRange(f"ell={ell} outside [0, {n + 1}]")
    if ell == n + 1:
        return Subspace.zero(0)
    return Subspace.from_spanning_set(_all_windows(A.basis, ell), n + 1 - ell)


def u_ell_vector(x: Sequence[int], ell: int) -> Subspace:
    n = len(x) - 1
    if ell == n + 1:
        return Subspace.zero(0)
    return Subspace.from_spanning_set(windows(x, ell), n + 1 - ell)


def u_ell_dim(vectors: Sequence[Sequence[int]], ell: int) -> int:
    """dim U^ell of the span of ``vectors``, without saturating."""
    if not vectors:
        return 0
    n = len(vectors[0]) - 1
    if ell == n + 1:
        return 0
    return rank(_all_windows(vectors, ell))


@dataclass(frozen=True)
class DimensionProfile:
    n: int
    values: tuple[int, ...]

    def is_concave(self) -> bool:
        f = self.values
        return all(f[i + 1] - f[i] <= f[i] - f[i - 1] for i in range(1, self.n + 1))

    def tail_start(self) -> int | None:
        """Smallest m with f increasing on [0, m] and f(l) = n-l+1 on [m, n+1]."""
        f, n = self.values, self.n
        for m in range(n + 2):
            rising = all(f[i] <= f[i + 1] for i in range(m))
            tail = all(f[l] == n - l + 1 for l in range(m, n + 2))
            if rising and tail:
                return m
        return None

    def corollary_holds(self) -> bool:
        f, n = self.values, self.n
        return all(min(f[l], f[0] + l - 1) <= f[l - 1] and min(f[l - 1], n - l + 1) <= f[l]
                   for l in range(1, n + 1))

    def check(self, dim_a: int) -> list[str]:
        problems = []
        if self.values[0] != dim_a:
            problems.append("f(0) != dim A")
        if self.values[-1] != 0:
            problems.append("f(n+1) != 0")
        if not self.is_concave():
            problems.append("not concave")
        if self.tail_start() is None:
            problems.append("no increasing part followed by the linear tail")
        if not self.corollary_holds():
            problems.append("corollary inequalities fail")
        return problems


def dimension_profile(A: Subspace) -> DimensionProfile:
    n = A.ambient_dim - 1
    vals = tuple(u_ell_dim(A.basis, ell) for ell in range(n + 2))
    return DimensionProfile(n, vals)


@dataclass(frozen=True)
class DegeneracyReport:
    d: int
    t_range: tuple[int, int]
    V: Subspace
    dims: tuple[int, ...]
    height_ratios: tuple[IntervalReal, ...] = field(default=())
    probes_checked: int = 0


def analyze_degeneracy(A: Subspace, j: int, ell: int,
                       probes: Iterable[Sequence[int]] = ()) -> DegeneracyReport | None:
    """Check the rigid structure forced when dim U^ell(A) <= j + ell.

    Returns ``None`` when that hypothesis fails.  Otherwise every exact
    consequence is verified and :class:`ContractViolation` is raised on the
    first one that does not hold.  Height ratios
    ``H(U^t(A))**2 / H(V)**(2(n-d-t+1))`` are reported only.
    """
    n = A.ambient_dim - 1
    if A.dim != j + 1:
        raise HypothesisUnmet(f"dim A = {A.dim}, expected j+1 = {j + 1}")
    if j < 0 or ell < 0 or j + 2 * ell > n:
        raise HypothesisUnmet(f"need j, ell >= 0 and j+2ell <= n (j={j}, ell={ell}, n={n})")
    d = u_ell(A, ell).dim
    if d > j + ell:
        return None
    payload = {"A": [list(v) for v in A.basis], "j": j, "ell": ell, "d": d}
    if not (0 <= d - j - 1 < ell <= n - d):
        raise ContractViolation("0 <= d-j-1 < ell <= n-d fails", payload)
    V = u_ell(A, n - d)
    t_lo, t_hi = d - j - 1, n - d
    images = {t: u_ell(A, t) for t in range(t_lo, t_hi + 1)}
    dims = tuple(images[t].dim for t in range(t_lo, t_hi + 1))
    if any(dd != d for dd in dims):
        raise ContractViolation("dim U^t(A) is not constant on the range",
                                {**payload, "dims": list(dims)})
    ratios = tuple(IntervalReal.exact(Fraction(images[t].height_squared,
                                               V.height_squared ** (n - d - t + 1)))
                   for t in range(t_lo, t_hi + 1))
    count = 0
    for x in probes:
        x = tuple(x)
        ref = all(V.contains(w) for w in windows(x, n - d))
        for t in range(t_lo, t_hi + 1):
            got = all(images[t].contains(w) for w in windows(x, t))
            if got != ref:
                raise ContractViolation("membership test depends on t",
                                        {**payload, "probe": list(x), "t": t})
        count += 1
    return DegeneracyReport(d, (t_lo, t_hi), V, dims, ratios, count)


def tau(a: Sequence[int], x: Sequence[int]) -> tuple[int, ...]:
    """``sum_k a_k x^(k,ell)`` with ``ell = len(a) - 1``."""
    ell = len(a) - 1
    ws = windows(x, ell)
    return tuple(sum(ak * w[i] for ak, w in zip(a, ws)) for i in range(len(ws[0])))


def _coefficients(length: int, total: int):
    # vectors of given l1 norm, in decreasing lexicographic order
    if length == 1:
        yield (total,)
        if total:
            yield (-total,)
        return
    for head in range(total, -total - 1, -1):
        for rest in _coefficients(length - 1, total - abs(head)):
            yield (head,) + rest


def avoiding_map_works(A: Subspace, a: Sequence[int], V: Subspace) -> bool:
    images = [tau(a, x) for x in A.basis]
    if rank(images) != A.dim:
        return False
    return any(not V.contains(y) for y in images) if images else False


def find_avoiding_map(A: Subspace, ell: int, V: Subspace) -> tuple[int, ...]:
    """Smallest ``a`` (by l1 norm, then decreasing lex order) with tau_a
    injective on A and tau_a(A) not inside V."""
    n = A.ambient_dim - 1
    if not 0 <= ell <= n:
        raise IndexOutOfRange(f"ell={ell} outside [0, {n}]")
    if V.ambient_dim != n + 1 - ell:
        raise HypothesisUnmet(f"V must live in R^{n + 1 - ell}")
    if A.dim > n - ell + 1:
        raise HypothesisUnmet(f"dim A = {A.dim} exceeds n-ell+1 = {n - ell + 1}")
    if u_ell(A, ell).issubset(V):
        raise HypothesisUnmet("U^ell(A) is contained in V")
    bound = (n + 1) ** ell
    for total in range(1, bound + 1):
        for a in _coefficients(ell + 1, total):
            if avoiding_map_works(A, a, V):
                return a
    raise SearchExhausted("no avoiding map within the l1 bound",
                          {"A": [list(v) for v in A.basis], "ell": ell,
                           "V": [list(v) for v in V.basis], "bound": bound})
