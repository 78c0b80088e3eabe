"""Lower sugared atoms to core comparison atoms (<=, < and == only).

Rewrites, with u_i shorthand for u[i]:

    a >= b                =>  b <= a
    a >  b                =>  b <  a
    a != b                =>  a < b  ||  b < a
    argmax(y) == c        =>  AND over j != c of  y_j < y_c   (strict, so ties fail)
    dist_inf(u, v) <= e   =>  AND over i of  u_i - v_i <= e  &&  v_i - u_i <= e
    dist_inf(u, v) >  e   =>  OR  over i of  e < u_i - v_i   ||  e < v_i - u_i
    u == v (vectors)      =>  AND over i of  u_i == v_i

Connectives pass through untouched. The result references the same
vectors and evaluates identically on every environment.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .ast import (
    And,
    ArgmaxIs,
    Compare,
    DistBound,
    EQ,
    FalseF,
    Formula,
    GE,
    GT,
    Implies,
    LE,
    LinExpr,
    LT,
    NE,
    Not,
    Or,
    Property,
    ScalarRef,
    TrueF,
    VecEq,
)

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _ref(vec: str, i: int) -> LinExpr:
    return LinExpr(terms=((_ONE, ScalarRef(vec, i)),))


def _diff(u: str, v: str, i: int) -> LinExpr:
    return LinExpr(terms=((_ONE, ScalarRef(u, i)), (-_ONE, ScalarRef(v, i))))


def _const(value: Fraction) -> LinExpr:
    return LinExpr(const=value)


def _conj(parts: list[Formula]) -> Formula:
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _disj(parts: list[Formula]) -> Formula:
    if not parts:
        return FalseF()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def desugar_formula(f: Formula, dims: Mapping[str, int]) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Not):
        return Not(desugar_formula(f.arg, dims))
    if isinstance(f, And):
        return And(desugar_formula(f.lhs, dims), desugar_formula(f.rhs, dims))
    if isinstance(f, Or):
        return Or(desugar_formula(f.lhs, dims), desugar_formula(f.rhs, dims))
    if isinstance(f, Implies):
        return Implies(desugar_formula(f.lhs, dims), desugar_formula(f.rhs, dims))
    if isinstance(f, Compare):
        if f.op == GE:
            return Compare(f.rhs, LE, f.lhs)
        if f.op == GT:
            return Compare(f.rhs, LT, f.lhs)
        if f.op == NE:
            return Or(Compare(f.lhs, LT, f.rhs), Compare(f.rhs, LT, f.lhs))
        return f
    if isinstance(f, ArgmaxIs):
        dim = dims[f.vector]
        return _conj(
            [
                Compare(_ref(f.vector, j), LT, _ref(f.vector, f.index))
                for j in range(dim)
                if j != f.index
            ]
        )
    if isinstance(f, DistBound):
        dim = dims[f.lhs]
        if f.op == LE:
            parts: list[Formula] = []
            for i in range(dim):
                parts.append(Compare(_diff(f.lhs, f.rhs, i), LE, _const(f.bound)))
                parts.append(Compare(_diff(f.rhs, f.lhs, i), LE, _const(f.bound)))
            return _conj(parts)
        parts = []
        for i in range(dim):
            parts.append(Compare(_const(f.bound), LT, _diff(f.lhs, f.rhs, i)))
            parts.append(Compare(_const(f.bound), LT, _diff(f.rhs, f.lhs, i)))
        return _disj(parts)
    if isinstance(f, VecEq):
        dim = dims[f.lhs]
        return _conj([Compare(_ref(f.lhs, i), EQ, _ref(f.rhs, i)) for i in range(dim)])
    raise TypeError(f"unknown formula node {f!r}")


def desugar_property(prop: Property) -> Property:
    """Desugar pre and post; the property must be bound (dimensions known)."""
    dims = prop.dims()
    return Property(
        networks=prop.networks,
        pre=desugar_formula(prop.pre, dims),
        assigns=prop.assigns,
        post=desugar_formula(prop.post, dims),
        variables=prop.variables,
    )


def is_core(f: Formula) -> bool:
    """True when f contains only core atoms (Compare with <=, < or ==)."""
    if isinstance(f, (TrueF, FalseF)):
        return True
    if isinstance(f, Not):
        return is_core(f.arg)
    if isinstance(f, (And, Or, Implies)):
        return is_core(f.lhs) and is_core(f.rhs)
    if isinstance(f, Compare):
        return f.op in (LE, LT, EQ)
    return False
