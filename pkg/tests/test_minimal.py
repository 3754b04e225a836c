import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from simapprox import minimal
from simapprox.errors import (ContractViolation, DegenerateXi, DimensionMismatch, InputError,
                              PrecisionError)
from simapprox.lattice import IntegerVector, Subspace, rank
from simapprox.minimal import (MinimalPointRecord, brute_force_minimal_points, build_structure,
                               candidate, check_P, consecutive_heights, construct_C,
                               enumerate_minimal_points, estimate_exponents)
from simapprox.oracles import parse_oracle
from simapprox.projections import windows


def points(records):
    return [r.x for r in records]


def test_sqrt2_line_examples(sqrt2):
    assert points(enumerate_minimal_points(sqrt2, 1, 10)) == [(1, 1), (2, 3), (5, 7)]
    # Euclidean cutoff: ||(29, 41)||^2 = 2522 > 50^2
    assert points(enumerate_minimal_points(sqrt2, 1, 50)) == [(1, 1), (2, 3), (5, 7), (12, 17)]
    assert points(enumerate_minimal_points(sqrt2, 1, 51))[-1] == (29, 41)
    assert enumerate_minimal_points(sqrt2, 1, 1) == []
    assert enumerate_minimal_points(sqrt2, 1, 0) == []


def test_sqrt2_plane_example(sqrt2):
    got = points(enumerate_minimal_points(sqrt2, 2, 32, allow_degenerate=True))
    assert got == [(1, 1, 2), (2, 3, 4), (5, 7, 10), (12, 17, 24)]


def test_golden_ratio_records(golden):
    assert points(brute_force_minimal_points(golden, 1, 20)) == [(1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]
    assert points(enumerate_minimal_points(golden, 1, 20)) == [(1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]


def test_brute_force_limits(sqrt2):
    assert brute_force_minimal_points(sqrt2, 1, 0) == []
    with pytest.raises(InputError):
        brute_force_minimal_points(sqrt2, 1, 1001)


def test_degenerate_xi_rejected_unless_allowed(sqrt2):
    with pytest.raises(DegenerateXi):
        enumerate_minimal_points(sqrt2, 2, 10)
    with pytest.raises(DegenerateXi):
        brute_force_minimal_points(sqrt2, 3, 10)


@pytest.mark.parametrize("name,n", [("sqrt2", 2), ("sqrt2", 3), ("cbrt2", 1), ("cbrt2", 2),
                                    ("golden", 1), ("fib_cf", 2), ("fib_cf", 3)])
def test_engine_matches_brute_force(request, name, n):
    xi = request.getfixturevalue(name)
    fast = enumerate_minimal_points(xi, n, 120, allow_degenerate=True)
    slow = brute_force_minimal_points(xi, n, 120, allow_degenerate=True)
    assert points(fast) == points(slow)
    assert [r.in_I for r in fast] == [r.in_I for r in slow]


def test_staircase_laws(cbrt2):
    recs = enumerate_minimal_points(cbrt2, 2, 10 ** 5)
    assert len(recs) > 5
    for a, b in zip(recs, recs[1:]):
        assert a.X_squared < b.X_squared
        assert b.L.certainly_lt(a.L)
    for r in recs:
        assert r.x[0] > 0 and IntegerVector(r.x).is_primitive
        assert r.L.certainly_lt(Fraction(1, 2))
        assert r.X_squared == sum(c * c for c in r.x)
    for i, r in enumerate(recs):
        if 0 < i < len(recs) - 1:
            assert r.in_I == (rank([recs[i - 1].x, r.x, recs[i + 1].x]) == 3)
    assert recs[0].in_I is False and recs[-1].in_I is None


def test_shards_do_not_change_output(fib_cf):
    one = enumerate_minimal_points(fib_cf, 2, 10 ** 5)
    three = enumerate_minimal_points(fib_cf, 2, 10 ** 5, shards=3)
    assert [r.to_json() for r in one] == [r.to_json() for r in three]


def test_candidate_rounding(sqrt2):
    assert candidate(5, sqrt2, 1) == IntegerVector((5, 7))
    assert candidate(3, parse_oracle("alg:-2,0,0,1:1,2"), 3) == IntegerVector((3, 4, 5, 6))
    with pytest.raises(InputError):
        candidate(0, sqrt2, 1)


def test_decimal_oracle_runs_out_of_precision():
    xi = parse_oracle("dec:1.41421356")
    with pytest.raises(PrecisionError):
        enumerate_minimal_points(xi, 1, 10 ** 6)


def test_record_json_roundtrip(sqrt2):
    for r in enumerate_minimal_points(sqrt2, 1, 100):
        text = json.dumps(r.to_json())
        assert MinimalPointRecord.from_json(json.loads(text)) == r


def test_structure_of_cube_root(cbrt2):
    recs = enumerate_minimal_points(cbrt2, 2, 10 ** 5)
    st_ = build_structure(recs)
    assert st_.n == 2
    assert st_.I == [i for i, r in enumerate(recs) if r.in_I]
    for (j, i), q in st_.sigma.items():
        span_q = rank([r.x for r in recs[i:q + 1]])
        span_next = rank([r.x for r in recs[i:q + 2]])
        assert span_q == j + 1 and span_next == j + 2
        assert st_.Y_squared[(j, i)] == recs[q + 1].X_squared
        assert st_.A(j, i).dim == j + 1
    assert st_.A(2, 0) == Subspace.full(3)
    assert all(r.lo > 0 for _, _, r in st_.height_ratios)
    with pytest.raises(InputError):
        build_structure(recs[:2])


def test_consecutive_heights_are_wedge_norms(cbrt2):
    recs = enumerate_minimal_points(cbrt2, 2, 10 ** 4)
    for _, exact, ratio in consecutive_heights(recs):
        assert exact and ratio.lo > 0


def test_check_P(cbrt2):
    recs = enumerate_minimal_points(cbrt2, 2, 10 ** 5)
    st_ = build_structure(recs)
    rep = check_P(recs, st_, 0, 1, 1)
    assert rep.label == "on computed range" and rep.checked
    assert rep.passed
    with pytest.raises(InputError):
        check_P(recs, st_, 3, 0, 0)


def test_check_P_flags_impossible_pass(cbrt2, monkeypatch):
    recs = enumerate_minimal_points(cbrt2, 2, 10 ** 4)
    st_ = build_structure(recs)
    monkeypatch.setattr(minimal, "u_ell_dim", lambda vecs, ell: 99)
    with pytest.raises(ContractViolation):
        check_P(recs, st_, 1, 1, 0)


def test_exponent_estimates_for_sqrt2(sqrt2):
    est = estimate_exponents(enumerate_minimal_points(sqrt2, 1, 10 ** 4))
    assert abs(est.lambda_hat_slope - 1) < 0.01 and abs(est.lambda_slope - 1) < 0.01
    assert est.lambda_running[0] is None or est.lambda_running[0].lo > 0
    assert est.lambda_hat_running[-1] is None
    with pytest.raises(InputError):
        estimate_exponents([])


def test_construct_C_example():
    V = Subspace.span([(0, 1)])
    assert construct_C(V, (1, 2, 3), 1, 1) == IntegerVector((-1, -2))
    assert any(construct_C(V, (0, 1, 0), 1, 1))
    assert not any(construct_C(Subspace.span([(1, 2)]), (1, 2, 4), 1, 1))
    with pytest.raises(DimensionMismatch):
        construct_C(V, (1, 2), 1, 1)
    with pytest.raises(DimensionMismatch):
        construct_C(Subspace.full(2), (1, 2, 3), 1, 1)


vec4 = st.lists(st.integers(-9, 9), min_size=4, max_size=4)


@given(vec4, vec4, st.integers(-4, 4), st.integers(-4, 4))
def test_construct_C_is_linear(x, y, a, b):
    V = Subspace.span([(1, 0, 3), (0, 1, 1)])
    combo = [a * u + b * v for u, v in zip(x, y)]
    cx, cy = construct_C(V, x, 2, 1), construct_C(V, y, 2, 1)
    assert construct_C(V, combo, 2, 1).coords == tuple(a * p + b * q for p, q in zip(cx, cy))


@given(vec4)
def test_construct_C_vanishes_exactly_when_windows_in_V(x):
    V = Subspace.span([(1, 0, 3), (0, 1, 1)])
    inside = rank(list(V.basis) + windows(x, 1)) == 2
    assert (not any(construct_C(V, x, 2, 1))) == inside
