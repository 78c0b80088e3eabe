"""AST for the property language.

A property file declares networks (a network under verification plus
reference networks), a precondition over input vectors, a block of
assignments applying networks to inputs, and a postcondition over all
declared vectors. Formulas are boolean combinations of linear-arithmetic
atoms plus three sugared atom forms (argmax, L-infinity distance bounds,
vector equality) that desugar into the core comparison atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

NUV = "nuv"
SPEC = "spec"

LE = "<="
LT = "<"
GE = ">="
GT = ">"
EQ = "=="
NE = "!="

CORE_OPS = (LE, LT, EQ)
ALL_OPS = (LE, LT, GE, GT, EQ, NE)


@dataclass(frozen=True)
class NetworkDecl:
    role: str  # NUV or SPEC
    name: str
    path: str


@dataclass(frozen=True)
class VectorVar:
    """A declared vector. dim is None until bound against real networks."""

    name: str
    dim: int | None = None


@dataclass(frozen=True)
class Assignment:
    """target := network(source). Targets are written once and never re-fed."""

    target: str
    network: str
    source: str


@dataclass(frozen=True)
class ScalarRef:
    vector: str
    index: int


@dataclass(frozen=True)
class LinExpr:
    """Sum of rational-coefficient scalar terms plus a constant."""

    terms: tuple[tuple[Fraction, ScalarRef], ...] = ()
    const: Fraction = Fraction(0)

    def vectors(self) -> set[str]:
        return {ref.vector for _, ref in self.terms}


class Formula:
    """Base class; concrete nodes are frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Compare(Formula):
    lhs: LinExpr
    op: str
    rhs: LinExpr


@dataclass(frozen=True)
class ArgmaxIs(Formula):
    """argmax(vector) == index, true only for a strict unique maximum."""

    vector: str
    index: int


@dataclass(frozen=True)
class DistBound(Formula):
    """dist_inf(lhs, rhs) op bound with op restricted to <= and >."""

    lhs: str
    rhs: str
    op: str
    bound: Fraction


@dataclass(frozen=True)
class VecEq(Formula):
    lhs: str
    rhs: str


@dataclass(frozen=True)
class Property:
    networks: tuple[NetworkDecl, ...]
    pre: Formula
    assigns: tuple[Assignment, ...]
    post: Formula
    variables: tuple[VectorVar, ...]

    def var(self, name: str) -> VectorVar:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    def network(self, name: str) -> NetworkDecl:
        for n in self.networks:
            if n.name == name:
                return n
        raise KeyError(name)

    def input_names(self) -> tuple[str, ...]:
        seen: list[str] = []
        for a in self.assigns:
            if a.source not in seen:
                seen.append(a.source)
        return tuple(seen)

    def output_names(self) -> tuple[str, ...]:
        return tuple(a.target for a in self.assigns)

    def dims(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.variables:
            if v.dim is None:
                raise ValueError(f"variable {v.name} has no dimension; bind first")
            out[v.name] = v.dim
        return out


def free_vectors(f: Formula) -> set[str]:
    """Names of all vectors a formula mentions."""
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if isinstance(f, Not):
        return free_vectors(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return free_vectors(f.lhs) | free_vectors(f.rhs)
    if isinstance(f, Compare):
        return f.lhs.vectors() | f.rhs.vectors()
    if isinstance(f, ArgmaxIs):
        return {f.vector}
    if isinstance(f, (DistBound, VecEq)):
        return {f.lhs, f.rhs}
    raise TypeError(f"unknown formula node {f!r}")
