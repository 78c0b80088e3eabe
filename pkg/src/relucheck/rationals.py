"""Exact rational scalars shared by every layer of the tool.

All numeric state is `fractions.Fraction`. Floats never enter: decimal text
like "0.05" is parsed digit-exactly (1/20), and serialization emits "p/q"
strings that survive a round trip unchanged.
"""

from __future__ import annotations

from fractions import Fraction

Rational = Fraction

_ALLOWED = frozenset("0123456789/.-+_ ")


def parse_rational(text: str | int) -> Fraction:
    """Parse an integer, decimal string, or "p/q" string into a Fraction.

    Accepts int directly (JSON integers). Strings may be "3", "-7",
    "0.05", "1/3", "-2/5". Anything else, including float input, raises
    ValueError: floats are rejected so inexactness cannot sneak in.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, Fraction):
        return text
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r} (floats are not accepted)")
    stripped = text.strip()
    if not stripped or not set(stripped) <= _ALLOWED:
        raise ValueError(f"not a rational: {text!r}")
    try:
        return Fraction(stripped)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {text!r}") from exc


def as_fraction(value) -> Fraction:
    """Canonical Fraction from any exact rational (int, Fraction, gmpy2 mpq).

    Fraction(mpq) would smuggle gmpy2 integers into the Fraction's
    internals, which gmpy2 itself then refuses to mix with; going through
    ints keeps every Fraction plain."""
    if type(value) is Fraction:
        return value
    if isinstance(value, int):
        return Fraction(value)
    return Fraction(int(value.numerator), int(value.denominator))


def format_rational(value: Fraction) -> str:
    """Render as "p" for integers, "p/q" otherwise. Inverse of parse_rational."""
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
