"""Pretty-printer for properties; inverse of the parser on ASTs.

parse_property(render_property(p)) == p for any parser-produced p.
Dimension annotations added by binding are not serialized (they are
recomputed by binding against the same networks).
"""

from __future__ import annotations

from ..rationals import format_rational
from .ast import (
    And,
    ArgmaxIs,
    Compare,
    DistBound,
    FalseF,
    Formula,
    Implies,
    LinExpr,
    Not,
    Or,
    Property,
    TrueF,
    VecEq,
)

_PREC_IMPLIES = 0
_PREC_OR = 1
_PREC_AND = 2
_PREC_ATOM = 3


def render_linexpr(e: LinExpr) -> str:
    parts: list[str] = []
    for coef, ref in e.terms:
        body = f"{ref.vector}[{ref.index}]"
        mag = abs(coef)
        if mag != 1:
            body = f"{format_rational(mag)} * {body}"
        parts.append(("- " if coef < 0 else "+ ") + body)
    if e.const != 0 or not e.terms:
        parts.append(("- " if e.const < 0 else "+ ") + format_rational(abs(e.const)))
    first = parts[0]
    head = "-" + first[2:] if first.startswith("- ") else first[2:]
    return " ".join([head] + parts[1:])


def _render(f: Formula, level: int) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        inner = f.arg
        if isinstance(inner, (TrueF, FalseF)):
            return "!" + _render(inner, _PREC_ATOM)
        return "!(" + _render(inner, _PREC_IMPLIES) + ")"
    if isinstance(f, Implies):
        text = _render(f.lhs, _PREC_OR) + " -> " + _render(f.rhs, _PREC_IMPLIES)
        return f"({text})" if level > _PREC_IMPLIES else text
    if isinstance(f, Or):
        text = _render(f.lhs, _PREC_OR) + " || " + _render(f.rhs, _PREC_AND)
        return f"({text})" if level > _PREC_OR else text
    if isinstance(f, And):
        text = _render(f.lhs, _PREC_AND) + " && " + _render(f.rhs, _PREC_ATOM)
        return f"({text})" if level > _PREC_AND else text
    if isinstance(f, Compare):
        return f"{render_linexpr(f.lhs)} {f.op} {render_linexpr(f.rhs)}"
    if isinstance(f, ArgmaxIs):
        return f"argmax({f.vector}) == {f.index}"
    if isinstance(f, DistBound):
        return f"dist_inf({f.lhs}, {f.rhs}) {f.op} {format_rational(f.bound)}"
    if isinstance(f, VecEq):
        return f"{f.lhs} == {f.rhs}"
    raise TypeError(f"unknown formula node {f!r}")


def render_formula(f: Formula) -> str:
    return _render(f, _PREC_IMPLIES)


def render_property(p: Property) -> str:
    lines: list[str] = []
    for net in p.networks:
        lines.append(f'{net.role} {net.name} = "{net.path}";')
    lines.append("")
    lines.append("pre {")
    lines.append("  " + render_formula(p.pre))
    lines.append("}")
    lines.append("")
    for a in p.assigns:
        lines.append(f"{a.target} := {a.network}({a.source});")
    lines.append("")
    lines.append("post {")
    lines.append("  " + render_formula(p.post))
    lines.append("}")
    return "\n".join(lines) + "\n"
