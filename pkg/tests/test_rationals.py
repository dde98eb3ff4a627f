from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vcsp.rationals import (
    INF,
    ONE,
    ZERO,
    ExtendedRational,
    format_rational,
    parse_rational,
)

rationals = st.fractions(
    min_value=0, max_value=1000, max_denominator=97
)
extended = st.one_of(rationals.map(ExtendedRational), st.just(INF))


def test_constants():
    assert ZERO == 0 and ONE == 1
    assert INF.is_infinite and not ONE.is_infinite
    assert ZERO.is_zero and not ONE.is_zero


def test_negative_rejected():
    with pytest.raises(ValueError):
        ExtendedRational(-1)
    with pytest.raises(ValueError):
        ExtendedRational(Fraction(-1, 3))
    with pytest.raises(ValueError):
        parse_rational("-2/5")


def test_infinity_absorbs_addition():
    assert (INF + 5).is_infinite
    assert (Fraction(1, 2) + INF).is_infinite
    assert (INF + INF).is_infinite


def test_zero_times_infinity_is_zero():
    assert INF * 0 == 0
    assert ZERO * INF == 0
    assert (0 * INF) == ZERO


def test_positive_times_infinity_is_infinity():
    assert (INF * Fraction(1, 7)).is_infinite
    assert (ExtendedRational(3) * INF).is_infinite


def test_comparisons_with_infinity():
    assert ONE < INF
    assert not INF < ONE
    assert INF <= INF and INF == INF
    assert INF > ExtendedRational(10**9)


def test_immutable():
    with pytest.raises(AttributeError):
        ZERO._frac = None  # type: ignore[misc]


def test_as_fraction_on_infinity():
    with pytest.raises(ValueError):
        INF.as_fraction()


def test_parse_and_format_examples():
    assert parse_rational("3/6") == ExtendedRational(Fraction(1, 2))
    assert format_rational(parse_rational("3/6")) == "1/2"
    assert format_rational(parse_rational("inf")) == "inf"
    assert format_rational(ExtendedRational(7)) == "7"
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational("abc")


@given(rationals)
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(ExtendedRational(q))) == q


@given(extended, extended)
def test_addition_commutative(a, b):
    assert a + b == b + a


@given(extended, extended, extended)
def test_addition_associative(a, b, c):
    assert (a + b) + c == a + (b + c)


@given(extended, extended)
def test_multiplication_commutative(a, b):
    assert a * b == b * a


@given(extended)
def test_ordering_total(a):
    assert a <= INF
    assert ZERO <= a
    assert (a < INF) == (not a.is_infinite)
