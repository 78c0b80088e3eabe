"""Exact evaluation of formulas under a concrete vector environment."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

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
    TrueF,
    VecEq,
)

Env = Mapping[str, Sequence[Fraction]]


class UnboundVariableError(ValueError):
    pass


def _vector(env: Env, name: str) -> Sequence[Fraction]:
    try:
        return env[name]
    except KeyError:
        raise UnboundVariableError(f"no value bound for vector {name}") from None


def eval_linexpr(e: LinExpr, env: Env) -> Fraction:
    total = e.const
    for coef, ref in e.terms:
        vec = _vector(env, ref.vector)
        if not 0 <= ref.index < len(vec):
            raise UnboundVariableError(
                f"index {ref.index} out of range for {ref.vector} (length {len(vec)})"
            )
        total += coef * vec[ref.index]
    return total


_CMP = {
    LE: lambda a, b: a <= b,
    LT: lambda a, b: a < b,
    GE: lambda a, b: a >= b,
    GT: lambda a, b: a > b,
    EQ: lambda a, b: a == b,
    NE: lambda a, b: a != b,
}


def eval_formula(f: Formula, env: Env) -> bool:
    """Evaluate a formula. Sugared atoms are supported directly, with the
    same semantics their desugared forms have, so callers may evaluate
    either representation and get identical answers."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Not):
        return not eval_formula(f.arg, env)
    if isinstance(f, And):
        return eval_formula(f.lhs, env) and eval_formula(f.rhs, env)
    if isinstance(f, Or):
        return eval_formula(f.lhs, env) or eval_formula(f.rhs, env)
    if isinstance(f, Implies):
        return (not eval_formula(f.lhs, env)) or eval_formula(f.rhs, env)
    if isinstance(f, Compare):
        return _CMP[f.op](eval_linexpr(f.lhs, env), eval_linexpr(f.rhs, env))
    if isinstance(f, ArgmaxIs):
        vec = _vector(env, f.vector)
        if not 0 <= f.index < len(vec):
            raise UnboundVariableError(
                f"argmax class {f.index} out of range for {f.vector} (length {len(vec)})"
            )
        # strict unique maximum, ties at the top make the atom false
        top = vec[f.index]
        return all(vec[j] < top for j in range(len(vec)) if j != f.index)
    if isinstance(f, DistBound):
        u = _vector(env, f.lhs)
        v = _vector(env, f.rhs)
        if len(u) != len(v):
            raise UnboundVariableError(f"dist_inf over unequal lengths {len(u)} vs {len(v)}")
        dist = max((abs(a - b) for a, b in zip(u, v)), default=Fraction(0))
        return dist <= f.bound if f.op == LE else dist > f.bound
    if isinstance(f, VecEq):
        u = _vector(env, f.lhs)
        v = _vector(env, f.rhs)
        if len(u) != len(v):
            raise UnboundVariableError(f"vector equality over unequal lengths {len(u)} vs {len(v)}")
        return tuple(u) == tuple(v)
    raise TypeError(f"unknown formula node {f!r}")
