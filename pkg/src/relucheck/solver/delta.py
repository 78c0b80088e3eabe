"""Rationals extended with an infinitesimal, for strict inequalities.

A DeltaRational r + k*delta compares lexicographically on (r, k), which
is exactly the order induced by substituting any sufficiently small
positive rational for delta. Strict bounds like x < b become the closed
bound x <= b - delta; after a feasible point is found, a concrete
positive delta small enough for every strict constraint is computed and
substituted back out, so reported models are plain rationals.
"""

from __future__ import annotations

from fractions import Fraction

from ..rationals import as_fraction


class DeltaRational:
    __slots__ = ("real", "delta")

    def __init__(self, real, delta=0):
        self.real = real
        self.delta = delta

    def __add__(self, other: "DeltaRational") -> "DeltaRational":
        return DeltaRational(self.real + other.real, self.delta + other.delta)

    def __sub__(self, other: "DeltaRational") -> "DeltaRational":
        return DeltaRational(self.real - other.real, self.delta - other.delta)

    def __neg__(self) -> "DeltaRational":
        return DeltaRational(-self.real, -self.delta)

    def scale(self, factor) -> "DeltaRational":
        """Multiply by a plain rational (delta stays first order)."""
        return DeltaRational(self.real * factor, self.delta * factor)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DeltaRational):
            return NotImplemented
        return self.real == other.real and self.delta == other.delta

    def __lt__(self, other: "DeltaRational") -> bool:
        if self.real != other.real:
            return self.real < other.real
        return self.delta < other.delta

    def __le__(self, other: "DeltaRational") -> bool:
        if self.real != other.real:
            return self.real < other.real
        return self.delta <= other.delta

    def __gt__(self, other: "DeltaRational") -> bool:
        return not self.__le__(other)

    def __ge__(self, other: "DeltaRational") -> bool:
        return not self.__lt__(other)

    def __hash__(self) -> int:
        return hash((self.real, self.delta))

    def __repr__(self) -> str:
        if not self.delta:
            return f"DR({self.real})"
        return f"DR({self.real}{self.delta:+}d)"

    def is_exact(self) -> bool:
        return not self.delta

    def concretize(self, eps) -> Fraction:
        return as_fraction(self.real + self.delta * eps)
