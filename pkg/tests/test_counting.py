import math
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from idealchoice.counting import (
    I_values,
    PreconditionError,
    aggregation_identity,
    derive_tables,
    f_float,
    f_lower_iv,
    harmonic_bound_check,
    hockey_stick,
    identity_ddagger,
    ineq_j_audit,
    ineq_j_lhs,
    k_of,
    k_sequence,
    lower_bound_audit,
    trinomial_revision,
    upper_bound_H,
)
from idealchoice.hypergraph import Hypergraph, degree_profile
from idealchoice.trees import branch_hypergraph


def test_k_sequence_examples():
    assert k_sequence(6) == [1, 3, 5, 8, 10, 13]
    assert k_of(7) == 16
    assert k_sequence(1) == [1]


def test_k_sequence_matches_k_of():
    assert k_sequence(200) == [k_of(n) for n in range(1, 201)]


def test_upper_bound_examples():
    assert upper_bound_H(5) == Fraction(137, 12)
    assert math.floor(upper_bound_H(5)) == 11
    assert upper_bound_H(6) == Fraction(147, 10)
    assert math.floor(upper_bound_H(6)) == 14
    assert upper_bound_H(1) == 1


def h2():
    return Hypergraph.from_sets(3, [{0, 2}, {1, 2}])


def test_ineq_j_examples():
    assert ineq_j_audit(h2(), 2, 0) == (2, 2, True)
    assert ineq_j_audit(h2(), 2, 1) == (4, 4, True)


def test_ineq_j_empty_sum():
    # every degree is 2, so for j = 0 the sum over k <= 1 is empty; such a
    # hypergraph is never economical, so the formula is checked directly
    tri = Hypergraph.from_sets(3, [{0, 1}, {1, 2}, {0, 2}])
    assert degree_profile(tri).m == {2: 6}
    assert ineq_j_lhs(degree_profile(tri).m, 3, 0) == 0
    with pytest.raises(PreconditionError):
        ineq_j_audit(tri, 3, 0)


def test_ineq_j_preconditions():
    with pytest.raises(PreconditionError):
        ineq_j_audit(Hypergraph.from_sets(2, [{0}, {1}, {0, 1}]), 2, 0)
    with pytest.raises(PreconditionError):
        ineq_j_audit(Hypergraph.from_sets(3, [{0, 1, 2}]), 2, 0)
    with pytest.raises(PreconditionError):
        ineq_j_audit(h2(), 2, 2)


def test_identity_ddagger_examples():
    lhs, rhs, ok = identity_ddagger(4, 2)
    assert lhs == Fraction(1, 3) + Fraction(2, 3) + 1 == rhs == 2 and ok
    assert identity_ddagger(7, 7)[:2] == (1, 1)
    for n in range(1, 61):
        assert identity_ddagger(n, 1)[0] == n


def test_identity_ddagger_all():
    assert all(identity_ddagger(n, k)[2]
               for n in range(1, 61) for k in range(1, n + 1))


def test_hockey_and_trinomial_examples():
    assert sum(comb(j, 2) for j in range(2, 5)) == 10 == comb(5, 3)
    assert hockey_stick(4, 2) and hockey_stick(6, 6) and hockey_stick(6, 0)
    assert comb(5, 3) * comb(3, 2) == 30
    assert trinomial_revision(5, 3, 2)
    assert trinomial_revision(8, 5, 0) and trinomial_revision(8, 5, 5)


def test_hockey_and_trinomial_all():
    assert all(hockey_stick(m, r) for m in range(61) for r in range(m + 1))
    assert all(trinomial_revision(m, r, s) for m in range(61)
               for r in range(m + 1) for s in range(r + 1))


def test_aggregation_identity_on_trees():
    for n in range(1, 13):
        m = degree_profile(branch_hypergraph(n)).m
        left, right = aggregation_identity(m, n)
        assert left == right
        # sum_k m_k / k recovers the vertex count
        assert sum(Fraction(v, k) for k, v in m.items()) == k_of(n)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12), st.data())
def test_aggregation_identity_any_profile(n, data):
    m = {k: data.draw(st.integers(0, 20)) for k in range(1, n + 1)}
    left, right = aggregation_identity(m, n)
    assert left == right


def test_lower_bound_examples():
    assert f_float(1) == 0
    assert abs(f_float(6) - 0.5 * (6 * math.log2(6) - 5)) < 1e-12
    assert f_float(6) < 13
    assert f_lower_iv(6).b < 13


def test_lower_bound_audit_small():
    rep = lower_bound_audit(5000)
    assert rep.passed and rep.first_failure is None


def test_sound_comparison_detects_failure():
    from idealchoice.counting import _less_than_int
    assert not _less_than_int(64, 5)
    assert not _less_than_int(1, 0)
    # f(2) = 1/2 exactly, so f(2) + 1/2 < 1 must be rejected
    assert not _less_than_int(2, 1, 0.5)
    assert _less_than_int(2, 1, 0.49)


def test_harmonic_bound():
    assert harmonic_bound_check(2000) == (True, None)


def test_tables_examples():
    rows = derive_tables(6)
    I = I_values(rows)
    assert I[4] == (6, 6)
    assert I[7] == (14, 15)
    rows = derive_tables(6, {n: v for n, v in {1: 1, 2: 3, 3: 5, 4: 8, 5: 10}.items()})
    assert I_values(rows)[6] == (11, 11)
    assert rows[4].H_exact and rows[4].H_exact_source == "solver"


def test_tables_reject_impossible_solver_value():
    with pytest.raises(ValueError):
        derive_tables(5, {5: 12})


def test_tables_quadratic_and_log_bounds_consistent():
    for r in derive_tables(40):
        assert r.lower_f <= r.H_hi
        assert r.H_lo <= r.H_hi <= r.H_quadratic
        assert r.I_next_hi <= r.I_next_quadratic or r.n <= 1
        assert r.I_next_log_lower <= r.I_next_hi
        assert float(r.upper_H) < r.H_log_upper
