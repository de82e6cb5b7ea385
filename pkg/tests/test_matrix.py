import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from padiclab.errors import DomainError, InvalidModulusError, MalformedExpansionError, ParseError, ShapeError
from padiclab.matrix import (
    IntMatrix,
    PAdicExpansion,
    mat_quo,
    mat_rem,
    matmul,
    outer,
    padic_expand,
    padic_reconstruct,
    parse_matrix,
    parse_structured,
    serialize_matrix,
    to_structured,
    transpose,
)

from conftest import int_matrices

M = IntMatrix.from_rows
UUT = M([[1, 2, 3, 4], [2, 4, 6, 8], [3, 6, 9, 12], [4, 8, 12, 16]])


def test_shape_invariant():
    with pytest.raises(ShapeError):
        IntMatrix(2, 2, ((1, 2), (3,)))
    with pytest.raises(ShapeError):
        IntMatrix(0, 1, ())


def test_rem_negative_entries():
    assert mat_rem(M([[7, -5], [3, 0]]), 3) == M([[1, 1], [0, 0]])


def test_quo_negative_entries():
    assert mat_quo(M([[7, -5], [3, 0]]), 3) == M([[2, -2], [1, 0]])


def test_rem_quo_of_outer_product():
    # u u^T with u = (1,2,3,4); entries worked by hand
    assert mat_rem(UUT, 3) == M([[1, 2, 0, 1], [2, 1, 0, 2], [0, 0, 0, 0], [1, 2, 0, 1]])
    assert mat_quo(UUT, 3) == M([[0, 0, 1, 1], [0, 1, 2, 2], [1, 2, 3, 4], [1, 2, 4, 5]])


@pytest.mark.parametrize("p", [2, 3, 7, 97])
def test_zero_and_below_modulus(p):
    Z = IntMatrix.zeros(3, 2)
    assert mat_rem(Z, p) == Z
    assert mat_quo(M([[p - 1]]), p) == M([[0]])


@pytest.mark.parametrize("p", [1, 0, -3])
def test_invalid_modulus(p):
    with pytest.raises(InvalidModulusError):
        mat_rem(UUT, p)
    with pytest.raises(InvalidModulusError):
        mat_quo(UUT, p)


@given(int_matrices(lo=-10**30, hi=10**30), st.sampled_from([2, 3, 5, 7, 11, 13, 31, 97]))
def test_division_identity(A, p):
    R = mat_rem(A, p)
    assert A == mat_quo(A, p).scale(p) + R
    assert all(0 <= x < p for x in R.entries())


def test_no_overflow():
    big = 2**200 + 12345
    A = M([[big, -big]])
    assert mat_quo(A, 2**61 - 1).scale(2**61 - 1) + mat_rem(A, 2**61 - 1) == A


def test_padic_expand_13():
    e = padic_expand(M([[13]]), 2)
    assert [d.data for d in e.digits] == [((1,),), ((0,),), ((1,),), ((1,),)]
    assert padic_reconstruct(e) == M([[13]])


def test_padic_zero():
    e = padic_expand(M([[0]]), 5)
    assert len(e) == 1 and e.digits[0] == M([[0]])
    assert padic_reconstruct(PAdicExpansion(7, (M([[0]]),))) == M([[0]])


def test_padic_negative_rejected():
    with pytest.raises(DomainError, match=r"\(1, 0\)"):
        padic_expand(M([[1, 2], [-3, 4]]), 3)


def test_malformed_expansion():
    with pytest.raises(MalformedExpansionError):
        PAdicExpansion(3, (M([[3]]),))
    with pytest.raises(MalformedExpansionError):
        PAdicExpansion(3, (M([[1]]), M([[1, 1]])))


@given(int_matrices(lo=0, hi=10**12), st.sampled_from([2, 3, 5, 7, 10]))
def test_padic_round_trip(A, p):
    e = padic_expand(A, p)
    assert padic_reconstruct(e) == A
    assert e.digits[0] == mat_rem(A, p)
    assert len(e) == 1 or not e.digits[-1].is_zero()
    beta = max(A.entries()) + 1
    s = 0
    while p**s < beta:
        s += 1
    assert len(e) - 1 <= s


def test_matmul_basics(rnd):
    from conftest import random_matrix

    A = random_matrix(rnd, 4, 3)
    assert matmul(IntMatrix.identity(4), A) == A
    assert outer([1, 2], [1, 2]) == M([[1, 2], [2, 4]])
    with pytest.raises(ShapeError):
        matmul(A, A)


@given(int_matrices(min_dim=5, max_dim=5, square=True), int_matrices(min_dim=5, max_dim=5, square=True))
def test_transpose_of_product(A, B):
    assert transpose(A @ B) == transpose(B) @ transpose(A)


def test_parse_text():
    assert parse_matrix("2 2\n1 2\n3 4\n") == M([[1, 2], [3, 4]])


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("2 2\n1 2\n3\n", 3, None),
        ("2 2\n1 x\n3 4\n", 2, 3),
        ("2\n1 2\n", 1, None),
        ("2 2\n1 2\n", 3, None),
        ("", 1, None),
    ],
)
def test_parse_errors(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_matrix(text)
    assert info.value.line == line
    assert info.value.column == column


def test_parse_error_message_names_row():
    with pytest.raises(ParseError, match="row 2 has 1 of 2 tokens"):
        parse_matrix("2 2\n1 2\n3\n")


def test_structured_big_ints_as_strings():
    A = M([[2**60, 5], [-(2**53), 2**53 - 1]])
    obj = json.loads(serialize_matrix(A, "structured"))
    assert obj["data"] == [[str(2**60), 5], [str(-(2**53)), 2**53 - 1]]
    assert parse_structured(obj) == A
    assert parse_structured({"rows": 1, "cols": 2, "data": [["7", 8]]}) == M([[7, 8]])


def test_structured_rejects_garbage():
    with pytest.raises(ParseError):
        parse_structured({"rows": 1, "cols": 2, "data": [[1.5, 2]]})
    with pytest.raises(ParseError):
        parse_structured("{not json")


@given(int_matrices(lo=-(2**70), hi=2**70))
def test_serialize_round_trips(A):
    assert parse_matrix(serialize_matrix(A)) == A
    assert parse_matrix(serialize_matrix(A, "structured")) == A
    assert parse_structured(to_structured(A)) == A


def test_serialize_canonical_form():
    assert serialize_matrix(parse_matrix("2  2\n+1   2\n3 -4")) == "2 2\n1 2\n3 -4\n"
