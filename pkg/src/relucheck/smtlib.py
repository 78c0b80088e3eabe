"""SMT-LIB 2 (QF_LRA) export of verification conditions, plus model import.

The exported document is self-contained: variable declarations with
provenance comments, the affine network equalities, each ReLU as the
pair of guarded implications

    (=> (<= y 0) (= x 0))      (=> (> y 0) (= x y))

and one assertion for the skeleton, followed by a single check-sat and
get-model. sat therefore means the property is falsified and the model
is a counterexample; unsat means verified. Rationals are emitted as
(/ p q) with unary minus, and files are UTF-8 with LF newlines.
"""

from __future__ import annotations

import shutil
import subprocess
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping

from .compiler import (
    BAnd,
    BAtom,
    BFalse,
    BNode,
    BOr,
    BTrue,
    EQ,
    LE,
    LinearConstraint,
    LT,
    NET_INPUT,
    NEURON_PRE,
    VC,
    VarMap,
)

_OP_SMT = {LE: "<=", LT: "<", EQ: "="}


def _num(q: Fraction) -> str:
    q = Fraction(q)
    if q < 0:
        return f"(- {_num(-q)})"
    if q.denominator == 1:
        return str(q.numerator)
    return f"(/ {q.numerator} {q.denominator})"


def _term(coef: Fraction, var: int) -> str:
    if coef == 1:
        return f"v{var}"
    if coef == -1:
        return f"(- v{var})"
    return f"(* {_num(coef)} v{var})"


def _sum(terms: Iterable[tuple[Fraction, int]]) -> str:
    parts = [_term(c, v) for c, v in terms]
    if not parts:
        return "0"
    if len(parts) == 1:
        return parts[0]
    return "(+ " + " ".join(parts) + ")"


def _constraint(c: LinearConstraint) -> str:
    return f"({_OP_SMT[c.op]} {_sum(c.terms)} {_num(c.rhs)})"


def _skeleton(node: BNode, atoms: list[LinearConstraint]) -> str:
    if isinstance(node, BTrue):
        return "true"
    if isinstance(node, BFalse):
        return "false"
    if isinstance(node, BAtom):
        return _constraint(atoms[node.atom])
    if isinstance(node, (BAnd, BOr)):
        op = "and" if isinstance(node, BAnd) else "or"
        return f"({op} " + " ".join(_skeleton(p, atoms) for p in node.parts) + ")"
    raise TypeError(f"unknown skeleton node {node!r}")


def _describe(varmap: VarMap, var: int) -> str:
    info = varmap.provenance[var]
    if info.kind == NET_INPUT:
        return f"input {info.vector}[{info.index}]"
    port = varmap.ports[info.assignment]
    stage = "pre" if info.kind == NEURON_PRE else "post"
    vec = f" = {info.vector}[{info.index}]" if info.vector else ""
    return (
        f"{port.network} (assignment {info.assignment}) "
        f"layer {info.layer} neuron {info.index} {stage}{vec}"
    )


def export_smt2(vc: VC) -> str:
    """Render the VC as one SMT-LIB 2 document (text, LF newlines)."""
    lines: list[str] = []
    lines.append("; verification condition: sat = property falsified, unsat = verified")
    for name, ids in vc.varmap.vectors.items():
        lines.append(f"; vector {name}: " + " ".join(f"v{i}" for i in ids))
    lines.append("(set-option :produce-models true)")
    lines.append("(set-logic QF_LRA)")
    for var in range(vc.num_vars):
        lines.append(f"(declare-const v{var} Real)  ; {_describe(vc.varmap, var)}")
    lines.append("; affine neuron definitions")
    for c in vc.hard_constraints:
        lines.append(f"(assert {_constraint(c)})")
    lines.append("; relu phase implications")
    for r in vc.relus:
        lines.append(f"(assert (=> (<= v{r.pre} 0) (= v{r.post} 0)))")
        lines.append(f"(assert (=> (> v{r.pre} 0) (= v{r.post} v{r.pre})))")
    lines.append("; precondition and negated postcondition")
    lines.append(f"(assert {_skeleton(vc.skeleton, vc.atoms)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- model import ---------------------------------------------------------


class ModelParseError(ValueError):
    pass


def _sexprs(text: str) -> list:
    out: list = []
    stack: list[list] = [out]
    token = ""

    def flush() -> None:
        nonlocal token
        if token:
            stack[-1].append(token)
            token = ""

    i = 0
    while i < len(text):
        ch = text[i]
        if ch == ";":
            flush()
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            flush()
            fresh: list = []
            stack[-1].append(fresh)
            stack.append(fresh)
        elif ch == ")":
            flush()
            if len(stack) == 1:
                raise ModelParseError("unbalanced parentheses in model")
            stack.pop()
        elif ch.isspace():
            flush()
        else:
            token += ch
        i += 1
    flush()
    if len(stack) != 1:
        raise ModelParseError("unbalanced parentheses in model")
    return out


def _value(node) -> Fraction:
    if isinstance(node, str):
        try:
            return Fraction(node)
        except ValueError as exc:
            raise ModelParseError(f"not a rational literal: {node!r}") from exc
    if not node:
        raise ModelParseError("empty value expression")
    head = node[0]
    if head == "-" and len(node) == 2:
        return -_value(node[1])
    if head == "/" and len(node) == 3:
        return _value(node[1]) / _value(node[2])
    if head == "+" and len(node) == 2:
        return _value(node[1])
    raise ModelParseError(f"unsupported value expression {node!r}")


def import_model(text: str, varmap: VarMap | None = None) -> dict[int, Fraction]:
    """Read a solver model into variable-id -> exact value.

    Accepts both the bare binding list ((v0 (/ 1 2)) ...) and define-fun
    style output, with or without the enclosing "model" keyword. Decimal
    literals are parsed exactly. Unknown names are ignored; names of the
    form v<k> land at id k."""
    tree = _sexprs(text)
    bindings: dict[int, Fraction] = {}

    def visit(node) -> None:
        if not isinstance(node, list) or not node:
            return
        if node[0] == "define-fun" and len(node) >= 5:
            _record(node[1], node[-1])
            return
        if len(node) == 2 and isinstance(node[0], str) and _is_var_name(node[0]):
            _record(node[0], node[1])
            return
        for sub in node:
            visit(sub)

    def _is_var_name(name: str) -> bool:
        return name.startswith("v") and name[1:].isdigit()

    def _record(name, value) -> None:
        if not (isinstance(name, str) and name.startswith("v") and name[1:].isdigit()):
            return
        var = int(name[1:])
        if varmap is not None and var >= len(varmap.provenance):
            return
        bindings[var] = _value(value)

    for node in tree:
        visit(node)
    if not bindings:
        raise ModelParseError("no variable bindings found in model text")
    return bindings


# -- optional external-solver glue -----------------------------------------

_SOLVER_CANDIDATES: tuple[tuple[str, tuple[str, ...]], ...] = (
    ("z3", ("-smt2",)),
    ("cvc5", ("--produce-models",)),
    ("cvc4", ("--produce-models", "--lang", "smt2")),
    ("mathsat", ()),
    ("yices-smt2", ()),
)


def find_external_solver() -> tuple[str, tuple[str, ...]] | None:
    """First SMT solver binary found on PATH, with its argument prefix."""
    for name, args in _SOLVER_CANDIDATES:
        path = shutil.which(name)
        if path:
            return path, args
    return None


def run_external_solver(
    smt2_text: str,
    solver: tuple[str, tuple[str, ...]] | None = None,
    timeout: float | None = None,
) -> tuple[str, str]:
    """Run an external solver on the document; return (verdict, raw output).

    verdict is "sat", "unsat" or "unknown"."""
    chosen = solver or find_external_solver()
    if chosen is None:
        raise RuntimeError("no SMT solver found on PATH")
    path, args = chosen
    with tempfile.NamedTemporaryFile(
        "w", suffix=".smt2", delete=False, encoding="utf-8"
    ) as handle:
        handle.write(smt2_text)
        fname = handle.name
    try:
        proc = subprocess.run(
            [path, *args, fname],
            capture_output=True,
            text=True,
            timeout=timeout,
        )
    finally:
        Path(fname).unlink(missing_ok=True)
    verdict = "unknown"
    for line in proc.stdout.splitlines():
        word = line.strip()
        if word in ("sat", "unsat", "unknown"):
            verdict = word
            break
    return verdict, proc.stdout
