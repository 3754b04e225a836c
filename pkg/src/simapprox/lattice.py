"""Rational subspaces of R^m held as saturated integer lattices.

A :class:`Subspace` stores the Hermite normal form of a Z-basis of
``V ∩ Z^m``.  The HNF of a lattice is unique, so two subspaces are equal
exactly when their stored bases are.  Heights are kept squared, as the
integer Gram determinant of that basis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DimensionMismatch
from .interval import IntervalReal, interval_max, sqrt_interval

Vector = Sequence[int]


@dataclass(frozen=True)
class IntegerVector:
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))

    @property
    def ambient_dim(self) -> int:
        return len(self.coords)

    @property
    def norm_squared(self) -> int:
        return sum(c * c for c in self.coords)

    @property
    def is_primitive(self) -> bool:
        return math.gcd(*self.coords) == 1

    def primitive(self) -> "IntegerVector":
        g = math.gcd(*self.coords)
        if g == 0:
            return self
        return IntegerVector(tuple(c // g for c in self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, index):
        return self.coords[index]


# -- exact integer linear algebra --------------------------------------------


def _eliminate_column(rows: list[list[int]], start: int, col: int) -> bool:
    """Euclid on column ``col`` of ``rows[start:]``; leaves one nonzero at ``start``."""
    while True:
        live = [i for i in range(start, len(rows)) if rows[i][col]]
        if not live:
            return False
        best = min(live, key=lambda i: abs(rows[i][col]))
        rows[start], rows[best] = rows[best], rows[start]
        pivot = rows[start]
        clean = True
        for i in range(start + 1, len(rows)):
            v = rows[i][col]
            if v:
                q = v // pivot[col]
                rows[i] = [a - q * b for a, b in zip(rows[i], pivot)]
                if rows[i][col]:
                    clean = False
        if clean:
            return True


def hermite_normal_form(vectors: Iterable[Vector], ambient_dim: int) -> list[tuple[int, ...]]:
    """Row Hermite normal form of the lattice spanned by ``vectors``.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)``, and
    zero rows are dropped.
    """
    rows = [list(v) for v in vectors if any(v)]
    r = 0
    for col in range(ambient_dim):
        if r == len(rows):
            break
        if not _eliminate_column(rows, r, col):
            continue
        if rows[r][col] < 0:
            rows[r] = [-a for a in rows[r]]
        p = rows[r][col]
        for i in range(r):
            q = rows[i][col] // p
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        r += 1
    return [tuple(row) for row in rows[:r]]


def integer_kernel(vectors: Sequence[Vector], ambient_dim: int) -> list[tuple[int, ...]]:
    """Z-basis of ``{u in Z^m : v.u = 0 for every v}``, in Hermite form."""
    vectors = [list(v) for v in vectors]
    r = len(vectors)
    aug = [[v[i] for v in vectors] + [int(k == i) for k in range(ambient_dim)]
           for i in range(ambient_dim)]
    p = 0
    for col in range(r):
        if p == ambient_dim:
            break
        if _eliminate_column(aug, p, col):
            p += 1
    return hermite_normal_form((row[r:] for row in aug[p:]), ambient_dim)


def determinant(matrix: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant of a square integer matrix."""
    a = [list(row) for row in matrix]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rank(vectors: Sequence[Vector]) -> int:
    rows = [list(v) for v in vectors if any(v)]
    if not rows:
        return 0
    width = len(rows[0])
    r = 0
    for col in range(width):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        pv = rows[r][col]
        for i in range(r + 1, len(rows)):
            v = rows[i][col]
            if v:
                rows[i] = [pv * a - v * b for a, b in zip(rows[i], rows[r])]
                g = math.gcd(*rows[i])
                if g > 1:
                    rows[i] = [a // g for a in rows[i]]
        r += 1
        if r == len(rows):
            break
    return r


def gram_matrix(vectors: Sequence[Vector]) -> list[list[int]]:
    return [[sum(a * b for a, b in zip(u, v)) for v in vectors] for u in vectors]


def wedge_norm_squared(vectors: Sequence[Vector]) -> int:
    """``||x_1 ∧ ... ∧ x_k||**2`` as a Gram determinant."""
    return determinant(gram_matrix(vectors))


def plucker_coordinates(vectors: Sequence[Vector]) -> list[int]:
    """All k×k maximal minors, columns in lexicographic order (ambient <= 12)."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        return [1]
    m = len(vectors[0])
    if m > 12:
        raise ValueError("Plücker extraction is limited to ambient dimension 12")
    return [determinant([[v[c] for c in cols] for v in vectors])
            for cols in itertools.combinations(range(m), len(vectors))]


# -- subspaces ----------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A rational subspace of R^m via the HNF of its saturated lattice."""

    ambient_dim: int
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_spanning_set(cls, vectors: Iterable[Vector], ambient_dim: int | None = None) -> "Subspace":
        vectors = [tuple(int(c) for c in v) for v in vectors]
        if ambient_dim is None:
            if not vectors:
                raise ValueError("ambient_dim is required for an empty spanning set")
            ambient_dim = len(vectors[0])
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in ambient dimension {ambient_dim}")
        perp = integer_kernel(vectors, ambient_dim)
        return cls(ambient_dim, tuple(integer_kernel(perp, ambient_dim)))

    span = from_spanning_set

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, ())

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, tuple(tuple(int(i == j) for j in range(ambient_dim))
                                      for i in range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def height_squared(self) -> int:
        return wedge_norm_squared(self.basis)

    def height(self, bits: int = 64) -> IntervalReal:
        return sqrt_interval(self.height_squared, bits)

    @cached_property
    def _perp_basis(self) -> tuple[tuple[int, ...], ...]:
        return tuple(integer_kernel(self.basis, self.ambient_dim))

    def orthogonal_complement(self) -> "Subspace":
        return Subspace(self.ambient_dim, self._perp_basis)

    def contains(self, vector: Vector) -> bool:
        if len(vector) != self.ambient_dim:
            raise DimensionMismatch("vector and subspace live in different spaces")
        return all(sum(a * b for a, b in zip(row, vector)) == 0 for row in self._perp_basis)

    __contains__ = contains

    def issubset(self, other: "Subspace") -> bool:
        _check_same_space(self, other)
        return all(other.contains(v) for v in self.basis)

    def sum(self, other: "Subspace") -> "Subspace":
        _check_same_space(self, other)
        return Subspace.from_spanning_set(self.basis + other.basis, self.ambient_dim)

    __add__ = sum

    def intersect(self, other: "Subspace") -> "Subspace":
        _check_same_space(self, other)
        perp = integer_kernel(self._perp_basis + other._perp_basis, self.ambient_dim)
        return Subspace(self.ambient_dim, tuple(perp))

    __and__ = intersect

    def plucker(self) -> list[int]:
        return plucker_coordinates(self.basis)

    def to_json(self) -> dict:
        return {"ambient": self.ambient_dim, "dim": self.dim,
                "basis": [list(v) for v in self.basis],
                "height_squared": self.height_squared}


def _check_same_space(u: Subspace, v: Subspace):
    if u.ambient_dim != v.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions {u.ambient_dim} and {v.ambient_dim} differ")


def orthogonal_complement(v: Subspace) -> Subspace:
    return v.orthogonal_complement()


def from_spanning_set(vectors, ambient_dim=None) -> Subspace:
    return Subspace.from_spanning_set(vectors, ambient_dim)


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    return u.sum(v)


def intersect(u: Subspace, v: Subspace) -> Subspace:
    return u.intersect(v)


# -- approximation quality ----------------------------------------------------


def L_xi(x: Vector, xi, bits: int) -> IntervalReal:
    """Enclosure of ``max_j |x_0 xi**j - x_j|`` of width ``<= 2**-bits``."""
    x = list(x)
    if not any(x):
        raise ValueError("L_xi is defined for non-zero points only")
    x0 = x[0]
    if len(x) == 1:
        return IntervalReal.exact(0)
    prec = bits + abs(x0).bit_length() + 1
    terms = [abs(x0 * xi.power_enclosure(j, prec) - x[j]) for j in range(1, len(x))]
    return interval_max(*terms)


def hadamard_ratio(vectors: Sequence[Vector], xi, bits: int = 64) -> IntervalReal:
    """``||x_1∧...∧x_k|| / sum_i ||x_i|| prod_{j≠i} L_xi(x_j)``.

    Bounded above by a constant depending on xi and m; reported, never
    asserted.
    """
    norms = [sqrt_interval(sum(c * c for c in v), bits) for v in vectors]
    ls = [L_xi(v, xi, bits) for v in vectors]
    total = IntervalReal.exact(0)
    for i in range(len(vectors)):
        term = norms[i]
        for j in range(len(vectors)):
            if j != i:
                term = term * ls[j]
        total = total + term
    return sqrt_interval(wedge_norm_squared(vectors), bits) / total
