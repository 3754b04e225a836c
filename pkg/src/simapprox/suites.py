"""Seeded randomized checks of the structural laws, runnable from the CLI.

Every case is drawn from ``random.Random`` seeded by the suite name and the
user seed, so a failure is reproduced by re-running with the same seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .lattice import Subspace, integer_kernel, rank
from .minimal import construct_C
from .projections import (avoiding_map_works, dimension_profile, find_avoiding_map, tau,
                          u_ell, windows)

CASES = 500
MAX_N = 8
ENTRY = 9


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"suite": self.name, "cases": self.cases, "failures": len(self.failures),
                "status": "PASS" if self.passed else "FAIL",
                "seconds": round(self.seconds, 3), "first_failure": self.failures[0] if self.failures else None}


def _vector(rng: random.Random, m: int, sparse: bool) -> list[int]:
    if sparse:
        return [rng.randint(-ENTRY, ENTRY) if rng.random() < 0.35 else 0 for _ in range(m)]
    return [rng.randint(-ENTRY, ENTRY) for _ in range(m)]


def random_subspace(rng: random.Random, m: int, dim: int | None = None) -> Subspace:
    """Span of random integer vectors; a third of the draws are sparse so that
    degenerate window patterns actually occur."""
    count = rng.randint(0, m) if dim is None else dim
    sparse = rng.random() < 1 / 3
    while True:
        vecs = [_vector(rng, m, sparse) for _ in range(count)]
        if dim is None or rank(vecs) == dim:
            return Subspace.from_spanning_set(vecs, m)


def _case_profile(rng):
    n = rng.randint(1, MAX_N)
    A = random_subspace(rng, n + 1)
    problems = dimension_profile(A).check(A.dim)
    return None if not problems else {"A": [list(v) for v in A.basis], "problems": problems}


def _case_corollary(rng):
    n = rng.randint(1, MAX_N)
    A = random_subspace(rng, n + 1)
    prof = dimension_profile(A)
    return None if prof.corollary_holds() else {"A": [list(v) for v in A.basis], "profile": prof.values}


def _case_composition(rng):
    n = rng.randint(1, MAX_N)
    A = random_subspace(rng, n + 1)
    for ell in range(n + 2):
        target = u_ell(A, ell)
        for k in range(ell + 1):
            if u_ell(u_ell(A, ell - k), k) != target:
                return {"A": [list(v) for v in A.basis], "k": k, "ell": ell}
    return None


def _case_duality(rng):
    m = rng.randint(1, MAX_N + 1)
    V = random_subspace(rng, m)
    W = V.orthogonal_complement()
    if V.height_squared != W.height_squared or W.orthogonal_complement() != V:
        return {"V": [list(v) for v in V.basis]}
    return None


def _case_schmidt(rng):
    m = rng.randint(1, MAX_N + 1)
    U, V = random_subspace(rng, m), random_subspace(rng, m)
    lhs = (U & V).height_squared * (U + V).height_squared
    rhs = U.height_squared * V.height_squared
    return None if lhs <= rhs else {"U": [list(v) for v in U.basis], "V": [list(v) for v in V.basis]}


def _case_avoiding(rng):
    while True:
        n = rng.randint(1, MAX_N)
        ell = rng.randint(0, n)
        A = random_subspace(rng, n + 1, rng.randint(1, n - ell + 1))
        V = random_subspace(rng, n + 1 - ell, rng.randint(0, n - ell))
        if not u_ell(A, ell).issubset(V):
            break
    a = find_avoiding_map(A, ell, V)
    images = [tau(a, x) for x in A.basis]
    ok = (sum(abs(c) for c in a) <= (n + 1) ** ell and rank(images) == A.dim
          and not all(V.contains(y) for y in images) and avoiding_map_works(A, a, V))
    return None if ok else {"A": [list(v) for v in A.basis], "ell": ell,
                            "V": [list(v) for v in V.basis], "a": list(a)}


def _case_construct_c(rng):
    k = rng.randint(1, MAX_N - 1)
    ell = rng.randint(1, MAX_N - k)
    V = random_subspace(rng, k + 1, k)
    if rng.random() < 0.5:
        x = _vector(rng, k + ell + 1, rng.random() < 0.3)
    else:
        # x with every window inside V: solve the recurrence y . x^(j, ell) = 0
        (y,) = V.orthogonal_complement().basis
        rows = [[0] * j + list(y) + [0] * (ell - j) for j in range(ell + 1)]
        sols = integer_kernel(rows, k + ell + 1)
        x = [0] * (k + ell + 1)
        for s in sols:
            c = rng.randint(-3, 3)
            x = [a + c * b for a, b in zip(x, s)]
    C = construct_C(V, x, k, ell)
    inside = rank(list(V.basis) + windows(x, ell)) == k
    return None if (not any(C)) == inside else {"V": [list(v) for v in V.basis], "x": list(x),
                                                "ell": ell, "C": list(C)}


SUITES = {
    "profile": _case_profile,
    "corollary": _case_corollary,
    "composition": _case_composition,
    "duality": _case_duality,
    "schmidt": _case_schmidt,
    "avoiding": _case_avoiding,
    "construct-c": _case_construct_c,
}

GROUPS = {
    "heights": ["duality", "schmidt"],
    "projections": ["profile", "corollary", "composition", "avoiding", "construct-c"],
    "all": list(SUITES),
}


def run_suite(name: str, seed: int = 0, cases: int = CASES) -> SuiteResult:
    check = SUITES[name]
    rng = random.Random(f"{name}:{seed}")
    result = SuiteResult(name)
    start = time.perf_counter()
    for _ in range(cases):
        failure = check(rng)
        result.cases += 1
        if failure is not None:
            result.failures.append(failure)
    result.seconds = time.perf_counter() - start
    return result


def run(selection: str, seed: int = 0, cases: int = CASES) -> list[SuiteResult]:
    """Run a suite or a group of suites (``heights``, ``projections``, ``all``)."""
    if selection in GROUPS:
        names = GROUPS[selection]
    elif selection in SUITES:
        names = [selection]
    else:
        raise KeyError(f"unknown suite {selection!r}; choose from "
                       f"{', '.join(sorted(set(SUITES) | set(GROUPS)))}")
    return [run_suite(name, seed, cases) for name in names]
