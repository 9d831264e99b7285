from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from homrecomb.linalg import (
    QQ,
    ZZ,
    CoeffField,
    ExactMatrix,
    LinalgError,
    format_matrix,
    integer_determinant,
    is_prime,
    parse_matrix,
    rank,
    smith_normal_form,
    solve_kernel,
)


def small_int_matrices(max_dim=5, bound=6):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(st.integers(-bound, bound), min_size=c, max_size=c),
                               min_size=r, max_size=r)))


def test_primality_table():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_field_rejects_composite_characteristic():
    with pytest.raises(LinalgError):
        CoeffField(6)


def test_fraction_coercion_into_prime_field():
    assert CoeffField(7)(Fraction(1, 3)) == 5
    with pytest.raises(LinalgError):
        CoeffField(3)(Fraction(1, 3))


def test_rank_depends_on_characteristic():
    m = ExactMatrix.from_rows([[2, 4], [1, 2]], ZZ)
    assert rank(m.over(CoeffField(3))) == 1
    a = ExactMatrix.from_rows([[2, 0], [0, 3]], ZZ)
    assert rank(a.over(QQ)) == 2
    assert rank(a.over(CoeffField(2))) == 1
    assert rank(a.over(CoeffField(3))) == 1


def test_smith_of_diagonal_2_3():
    assert smith_normal_form(ExactMatrix.from_rows([[2, 0], [0, 3]], ZZ)).divisors == (1, 6)


def test_kernel_example():
    ker = solve_kernel(ExactMatrix.from_rows([[1, 1, 0], [0, 0, 1]], QQ))
    assert len(ker) == 1
    v = ker[0]
    assert v.get(2, 0) == 0 and v[0] == -v[1] != 0


def test_explicit_zero_rejected():
    with pytest.raises(LinalgError):
        ExactMatrix(1, 1, ZZ, {(0, 0): 0})


def test_parse_matrix_reports_line():
    with pytest.raises(LinalgError, match="line 3"):
        parse_matrix("2 2 Z\n0 0 1\n5 0 1\n")


def test_matrix_text_roundtrip():
    m = ExactMatrix.from_rows([[1, 0, Fraction(-2, 3)], [0, 4, 0]], QQ)
    assert parse_matrix(format_matrix(m)) == m


@settings(max_examples=60, deadline=None)
@given(small_int_matrices())
def test_smith_decomposition_is_valid(rows):
    a = ExactMatrix.from_rows(rows, ZZ)
    dec = smith_normal_form(a)
    assert dec.U @ a @ dec.V == dec.D
    assert abs(integer_determinant(dec.U)) == 1
    assert abs(integer_determinant(dec.V)) == 1
    divs = dec.divisors
    assert all(d > 0 for d in divs)
    assert all(b % a_ == 0 for a_, b in zip(divs, divs[1:]))
    assert dec.rank == rank(a.over(QQ))


@settings(max_examples=60, deadline=None)
@given(small_int_matrices(), st.sampled_from([0, 2, 3, 5]))
def test_rank_nullity(rows, p):
    k = CoeffField(p)
    a = ExactMatrix.from_rows(rows, ZZ).over(k)
    ker = solve_kernel(a)
    assert len(ker) + rank(a) == a.cols
    for v in ker:
        assert not a.apply(v)


@settings(max_examples=40, deadline=None)
@given(small_int_matrices(max_dim=4))
def test_rank_mod_p_counts_divisors_prime_to_p(rows):
    a = ExactMatrix.from_rows(rows, ZZ)
    divs = smith_normal_form(a).divisors
    for p in (2, 3, 5):
        assert rank(a.over(CoeffField(p))) == sum(1 for d in divs if d % p)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n),
                       min_size=n, max_size=n)))
def test_determinant_matches_smith(rows):
    a = ExactMatrix.from_rows(rows, ZZ)
    dec = smith_normal_form(a)
    prod = 1
    for d in dec.divisors:
        prod *= d
    det = integer_determinant(a)
    assert abs(det) == (prod if dec.rank == a.rows else 0)
