from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from alfeld.errors import NonSquare, SingularMatrix
from alfeld.exact import (
    Factorization,
    RatMatrix,
    binomial,
    determinant,
    format_rational,
    multi_factorial,
    nullspace,
    parse_rational,
    rank_and_nullity,
)
from alfeld.multiindex import enumerate_sigma

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(rationals, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def square(max_n=5):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(rationals, min_size=n, max_size=n), min_size=n, max_size=n)
    )


def low_rank(n, r, seed):
    import random

    rng = random.Random(seed)
    A = [[rng.randint(-3, 3) for _ in range(r)] for _ in range(n)]
    B = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(r)]
    return RatMatrix(A) @ RatMatrix(B)


def test_binomial_examples():
    assert binomial(5, 2) == 10
    assert binomial(3, 5) == 0
    assert binomial(-1, 0) == 0
    assert binomial(3 + 2, 2) == len(enumerate_sigma(3, 3)) == 10


def test_multi_factorial():
    assert multi_factorial((2, 3, 0)) == 12


def test_rational_text_round_trip():
    assert parse_rational(" -3/6 ") == Fraction(-1, 2)
    assert format_rational(Fraction(-1, 2)) == "-1/2"
    assert format_rational(Fraction(4, 2)) == "2"
    with pytest.raises(ValueError):
        parse_rational("")


def test_rank_examples():
    assert rank_and_nullity(RatMatrix.identity(2)) == (2, 0)
    assert rank_and_nullity(RatMatrix([[1] * 3] * 3)) == (1, 2)


def test_determinant_examples():
    assert determinant(RatMatrix.identity(4)) == 1
    assert determinant(RatMatrix([[1, 2, 3], [2, 4, 6], [-1, -2, -3]])) == 0
    assert determinant(RatMatrix.diagonal([Fraction(1, 2), 3])) == Fraction(3, 2)
    assert determinant(RatMatrix([], 0)) == 1
    with pytest.raises(NonSquare):
        determinant(RatMatrix([[1, 2]]))


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        RatMatrix([[1, 2], [3]])


def test_factorization_singular():
    with pytest.raises(SingularMatrix):
        Factorization(RatMatrix([[1, 2], [2, 4]]))


@given(matrices())
def test_rank_matches_sympy(rows):
    M = RatMatrix(rows)
    assert rank_and_nullity(M)[0] == sympy.Matrix(rows).rank()


@given(matrices())
def test_rank_of_transpose(rows):
    M = RatMatrix(rows)
    assert rank_and_nullity(M)[0] == rank_and_nullity(M.transpose())[0]


@given(square())
def test_determinant_matches_sympy(rows):
    expected = sympy.Matrix(rows).det()
    got = determinant(RatMatrix(rows))
    assert sympy.Rational(got.numerator, got.denominator) == expected


@given(square())
def test_determinant_nonzero_iff_full_rank(rows):
    M = RatMatrix(rows)
    assert (determinant(M) != 0) == (rank_and_nullity(M)[1] == 0)


@given(square(4), square(4))
def test_determinant_multiplicative(a, b):
    n = min(len(a), len(b))
    A = RatMatrix([r[:n] for r in a[:n]])
    B = RatMatrix([r[:n] for r in b[:n]])
    assert determinant(A @ B) == determinant(A) * determinant(B)


@given(matrices())
def test_nullspace_vectors_are_annihilated(rows):
    M = RatMatrix(rows)
    basis = nullspace(M)
    assert len(basis) == rank_and_nullity(M)[1]
    for v in basis:
        assert all(x == 0 for x in M.apply(v))
    if basis:
        assert rank_and_nullity(RatMatrix(basis))[0] == len(basis)


@pytest.mark.parametrize("seed", range(5))
def test_low_rank_products(seed):
    M = low_rank(6, 3, seed)
    assert rank_and_nullity(M)[0] == sympy.Matrix([list(r) for r in M.rows]).rank()
    assert determinant(M) == 0


@given(square(), st.data())
def test_factorization_solves(rows, data):
    M = RatMatrix(rows)
    if determinant(M) == 0:
        return
    b = data.draw(st.lists(rationals, min_size=M.nrows, max_size=M.nrows))
    x = Factorization(M).solve(b)
    assert M.apply(x) == b
    assert M @ Factorization(M).inverse() == RatMatrix.identity(M.nrows)


@given(rationals, rationals.filter(lambda x: x != 0))
def test_rational_arithmetic_is_exact(a, c):
    assert (a + c) - c == a
