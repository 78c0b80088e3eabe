from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relucheck.rationals import as_fraction, format_rational, parse_rational


def test_parse_integer_forms():
    assert parse_rational("3") == 3
    assert parse_rational("-7") == -7
    assert parse_rational(5) == 5
    assert parse_rational(Fraction(2, 3)) == Fraction(2, 3)


def test_parse_decimal_is_exact():
    # 0.05 the decimal string, not the float
    assert parse_rational("0.05") == Fraction(1, 20)
    assert parse_rational("-2.5") == Fraction(-5, 2)


def test_parse_slash_forms():
    assert parse_rational("1/3") == Fraction(1, 3)
    assert parse_rational("-2/5") == Fraction(-2, 5)


@pytest.mark.parametrize("bad", ["", "abc", "1/0", "1.2.3", "nan", "1e3"])
def test_parse_rejects_garbage(bad):
    with pytest.raises(ValueError):
        parse_rational(bad)


def test_parse_rejects_floats_and_bools():
    with pytest.raises(ValueError):
        parse_rational(0.1)
    with pytest.raises(ValueError):
        parse_rational(True)


def test_format_examples():
    assert format_rational(Fraction(3)) == "3"
    assert format_rational(Fraction(-1, 2)) == "-1/2"


@given(st.fractions())
def test_format_parse_round_trip(q):
    assert parse_rational(format_rational(q)) == q


def test_as_fraction_normalizes_foreign_rationals():
    gmpy2 = pytest.importorskip("gmpy2")
    v = as_fraction(gmpy2.mpq(3, 7))
    assert v == Fraction(3, 7)
    assert type(v.numerator) is int and type(v.denominator) is int
    # the reason this helper exists: gmpy2 rejects Fractions whose
    # internals are gmpy2 integers
    assert gmpy2.mpq(1, 2) * v == gmpy2.mpq(3, 14)
