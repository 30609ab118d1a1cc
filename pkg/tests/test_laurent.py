"""Exact-arithmetic tests: pinned values plus randomized ring axioms."""

import pytest
from hypothesis import given, settings, strategies as st

from linkforge.errors import NormalizationError, ValidationError
from linkforge.laurent import (
    BracketPoly,
    HalfLaurent,
    ZPoly,
    add,
    bracket_to_jones,
    divide_exact,
    mul,
    substitute_inverse,
)

# Jones polynomial of the trefoil fixture and of the two-component link
# used throughout the divisibility tests.
V_T = HalfLaurent.from_string("t + t^3 - t^4")
V_L = HalfLaurent.from_string("t^-7/2 - t^-5/2 - t^-1/2 - t^1/2 - t^5/2 + t^7/2")


def hl(s):
    return HalfLaurent.from_string(s)


# ---------------------------------------------------------------------------
# add / mul pinned examples
# ---------------------------------------------------------------------------


def test_add_cancellation():
    assert hl("t^1/2") + hl("-t^1/2") == HalfLaurent.zero()


def test_add_reaches_trefoil_jones():
    assert add(hl("t + t^3"), hl("-t^4")) == V_T


def test_mul_factored_trefoil_jones():
    # (-t)(t^3 - t^2 - 1) = t + t^3 - t^4
    assert mul(hl("-t"), hl("t^3 - t^2 - 1")) == V_T


def test_mul_factored_link_jones():
    # t^(-7/2) * (t^4 (t^3 - t^2 - 1) - (t^3 + t - 1))
    inner = mul(hl("t^4"), hl("t^3 - t^2 - 1")) - hl("t^3 + t - 1")
    assert mul(hl("t^-7/2"), inner) == V_L


def test_mul_unit():
    assert mul(V_L, HalfLaurent.one()) == V_L


# ---------------------------------------------------------------------------
# divide_exact
# ---------------------------------------------------------------------------


def test_link_jones_not_divisible_by_trefoil_jones():
    assert divide_exact(V_L, V_T) is None


def test_divide_round_trip():
    q = hl("-t^1/2 + t^-1/2")
    assert divide_exact(mul(V_T, q), V_T) == q


def test_divide_by_one():
    assert divide_exact(V_L, HalfLaurent.one()) == V_L


def test_divide_by_unit_monomial():
    assert divide_exact(V_T, hl("-t^5/2")) == hl("-t^-3/2 - t^1/2 + t^3/2")


def test_divide_rejects_rational_quotient():
    assert divide_exact(hl("t"), hl("2t")) is None


def test_divide_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        divide_exact(V_T, HalfLaurent.zero())


def test_divide_zero_numerator():
    assert divide_exact(HalfLaurent.zero(), V_T) == HalfLaurent.zero()


# ---------------------------------------------------------------------------
# substitute_inverse
# ---------------------------------------------------------------------------


def test_substitute_inverse_monomial():
    assert substitute_inverse(hl("t^1/2")) == hl("t^-1/2")


def test_substitute_inverse_palindromic_link_jones():
    assert substitute_inverse(V_L) == V_L


def test_substitute_inverse_involution():
    assert substitute_inverse(substitute_inverse(V_T)) == V_T


# ---------------------------------------------------------------------------
# bracket_to_jones
# ---------------------------------------------------------------------------


def test_bracket_to_jones_unknot():
    assert bracket_to_jones(BracketPoly.one(), 0) == HalfLaurent.one()


def test_bracket_to_jones_two_unlink():
    b = BracketPoly({2: -1, -2: -1})  # -A^2 - A^-2
    assert bracket_to_jones(b, 0) == hl("-t^-1/2 - t^1/2")


def test_bracket_to_jones_odd_exponent_rejected():
    with pytest.raises(NormalizationError):
        bracket_to_jones(BracketPoly({1: 1}), 0)


# ---------------------------------------------------------------------------
# text round trips and grammar strictness
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "0",
        "1",
        "-1",
        "t",
        "-t^-1/2 - t^1/2",
        "t + t^3 - t^4",
        "t^-7/2 - t^-5/2 - t^-1/2 - t^1/2 - t^5/2 + t^7/2",
        "2 + 3t^5 - 7t^-9/2",
    ],
)
def test_string_round_trip(text):
    p = hl(text)
    assert HalfLaurent.from_string(str(p)) == p


def test_parse_unicode_minus():
    assert hl("t − t^4") == hl("t - t^4")


@pytest.mark.parametrize(
    "bad",
    ["", "t^", "t + t", "q^2", "t^2/2", "t^1/3", "1 1", "t^4 t^5", "0t"],
)
def test_parse_rejects_bad_text(bad):
    with pytest.raises(ValidationError):
        HalfLaurent.from_string(bad)


def test_bracket_poly_text():
    b = BracketPoly({-4: -1, 4: -1})
    assert str(b) == "-A^-4 - A^4"
    assert BracketPoly.from_string(str(b)) == b


def test_zpoly_text():
    p = ZPoly({0: 1, 2: 1})
    assert str(p) == "1 + z^2"


# ---------------------------------------------------------------------------
# randomized ring axioms (spec ranges: <=12 terms, exponent numerators in
# [-20, 20], coefficients in [-9, 9])
# ---------------------------------------------------------------------------

half_laurents = st.dictionaries(
    st.integers(-20, 20),
    st.integers(-9, 9).filter(lambda c: c != 0),
    max_size=12,
).map(HalfLaurent)

nonzero_half_laurents = half_laurents.filter(lambda p: not p.is_zero())


@settings(max_examples=300)
@given(half_laurents, half_laurents)
def test_add_commutative(a, b):
    assert add(a, b) == add(b, a)


@settings(max_examples=300)
@given(half_laurents, half_laurents, half_laurents)
def test_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + HalfLaurent.zero() == a
    assert a * HalfLaurent.one() == a


@settings(max_examples=300)
@given(half_laurents, nonzero_half_laurents)
def test_divide_mul_round_trip(a, d):
    assert divide_exact(mul(a, d), d) == a


@settings(max_examples=200)
@given(half_laurents, nonzero_half_laurents)
def test_divide_soundness(n, d):
    q = divide_exact(n, d)
    if q is not None:
        assert mul(d, q) == n


@settings(max_examples=200)
@given(half_laurents, half_laurents)
def test_substitute_inverse_is_ring_hom(a, b):
    assert substitute_inverse(a + b) == substitute_inverse(a) + substitute_inverse(b)
    assert substitute_inverse(a * b) == substitute_inverse(a) * substitute_inverse(b)


@settings(max_examples=200)
@given(half_laurents, half_laurents)
def test_no_zero_coefficients_stored(a, b):
    for p in (a + b, a * b, a - b, substitute_inverse(a)):
        assert all(c != 0 for c in p.terms.values())
