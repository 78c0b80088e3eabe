"""Recursive-descent parser for property files.

Connective precedence, loosest first: -> (right associative), ||, &&, !.
Atoms are linear comparisons, argmax(v) == k, dist_inf(u, v) <= c or > c,
and whole-vector equality u == v. Scalar indexing is 0-based.
"""

from __future__ import annotations

from fractions import Fraction

from .ast import (
    ALL_OPS,
    And,
    ArgmaxIs,
    Assignment,
    Compare,
    DistBound,
    FalseF,
    Formula,
    Implies,
    LinExpr,
    NetworkDecl,
    Not,
    NUV,
    Or,
    Property,
    ScalarRef,
    SPEC,
    TrueF,
    VecEq,
    VectorVar,
    free_vectors,
)
from .lexer import SpecSyntaxError, Token, tokenize


class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def take(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            want = what or repr(kind)
            raise SpecSyntaxError(f"expected {want}, found {tok.text or 'end of file'!r}", tok.line, tok.col)
        return self.take()

    def error(self, msg: str) -> SpecSyntaxError:
        tok = self.peek()
        return SpecSyntaxError(msg, tok.line, tok.col)

    # -- top level -----------------------------------------------------

    def property(self) -> Property:
        nets = [self.net_decl()]
        while self.peek().kind in (NUV, SPEC):
            nets.append(self.net_decl())
        names = [n.name for n in nets]
        for name in names:
            if names.count(name) > 1:
                raise self.error(f"network {name} declared twice")

        self.expect("pre")
        self.expect("{")
        pre = self.formula()
        self.expect("}")

        assigns = [self.assignment()]
        while self.peek().kind == "ident":
            assigns.append(self.assignment())

        self.expect("post")
        self.expect("{")
        post = self.formula()
        self.expect("}")
        self.expect("eof", "end of file")

        return self.check_structure(tuple(nets), pre, tuple(assigns), post)

    def net_decl(self) -> NetworkDecl:
        role_tok = self.take()
        if role_tok.kind not in (NUV, SPEC):
            raise SpecSyntaxError(
                f"expected 'nuv' or 'spec' declaration, found {role_tok.text!r}",
                role_tok.line,
                role_tok.col,
            )
        name = self.expect("ident", "network name").text
        self.expect("=")
        path = self.expect("string", "quoted file path")
        self.expect(";")
        return NetworkDecl(role=role_tok.kind, name=name, path=str(path.value))

    def assignment(self) -> Assignment:
        target = self.expect("ident", "assignment target").text
        self.expect(":=")
        network = self.expect("ident", "network name").text
        self.expect("(")
        source = self.expect("ident", "input vector name").text
        self.expect(")")
        self.expect(";")
        return Assignment(target=target, network=network, source=source)

    def check_structure(
        self,
        nets: tuple[NetworkDecl, ...],
        pre: Formula,
        assigns: tuple[Assignment, ...],
        post: Formula,
    ) -> Property:
        net_names = {n.name for n in nets}
        targets: list[str] = []
        sources: list[str] = []
        order: list[str] = []
        for a in assigns:
            if a.network not in net_names:
                raise SpecSyntaxError(f"assignment uses undeclared network {a.network}")
            if a.source in targets or a.source == a.target:
                raise SpecSyntaxError(
                    f"{a.source} is a network output and cannot feed another network"
                )
            if a.target in targets or a.target in sources:
                raise SpecSyntaxError(f"{a.target} assigned more than once")
            if a.source not in sources:
                sources.append(a.source)
                order.append(a.source)
            targets.append(a.target)
            order.append(a.target)
        roles = {n.name: n.role for n in nets}
        if not any(roles[a.network] == NUV for a in assigns):
            raise SpecSyntaxError("no assignment applies a nuv network")

        for name in sorted(free_vectors(pre)):
            if name not in sources:
                kind = "a network output" if name in targets else "undeclared"
                raise SpecSyntaxError(f"precondition mentions {name}, which is {kind}")
        declared = set(sources) | set(targets)
        for name in sorted(free_vectors(post)):
            if name not in declared:
                raise SpecSyntaxError(f"postcondition mentions undeclared vector {name}")

        return Property(
            networks=nets,
            pre=pre,
            assigns=assigns,
            post=post,
            variables=tuple(VectorVar(name) for name in order),
        )

    # -- formulas ------------------------------------------------------

    def formula(self) -> Formula:
        lhs = self.disjunction()
        if self.peek().kind == "->":
            self.take()
            return Implies(lhs, self.formula())
        return lhs

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek().kind == "||":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "&&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.take()
            return Not(self.unary())
        if tok.kind == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind == "true":
            self.take()
            return TrueF()
        if tok.kind == "false":
            self.take()
            return FalseF()
        return self.atom()

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "argmax":
            return self.argmax_atom()
        if tok.kind == "dist_inf":
            return self.dist_atom()
        if (
            tok.kind == "ident"
            and self.peek(1).kind == "=="
            and self.peek(2).kind == "ident"
            and self.peek(3).kind != "["
        ):
            lhs = self.take().text
            self.take()
            rhs = self.take().text
            return VecEq(lhs, rhs)
        lhs = self.linexpr()
        op_tok = self.peek()
        if op_tok.kind not in ALL_OPS:
            raise self.error(f"expected a comparison operator, found {op_tok.text!r}")
        self.take()
        rhs = self.linexpr()
        return Compare(lhs, op_tok.kind, rhs)

    def argmax_atom(self) -> Formula:
        self.take()
        self.expect("(")
        vec = self.expect("ident", "vector name").text
        self.expect(")")
        self.expect("==")
        idx = self.int_literal("argmax class index")
        return ArgmaxIs(vec, idx)

    def dist_atom(self) -> Formula:
        self.take()
        self.expect("(")
        lhs = self.expect("ident", "vector name").text
        self.expect(",")
        rhs = self.expect("ident", "vector name").text
        self.expect(")")
        op_tok = self.peek()
        if op_tok.kind not in ("<=", ">"):
            raise self.error("dist_inf supports only <= and > comparisons")
        self.take()
        bound = self.signed_number("distance bound")
        return DistBound(lhs, rhs, op_tok.kind, bound)

    # -- linear expressions --------------------------------------------

    def linexpr(self) -> LinExpr:
        terms: list[tuple[Fraction, ScalarRef]] = []
        const = Fraction(0)
        sign = Fraction(1)
        if self.peek().kind == "-":
            self.take()
            sign = Fraction(-1)
        while True:
            coef, ref = self.term()
            if ref is None:
                const += sign * coef
            else:
                terms.append((sign * coef, ref))
            nxt = self.peek()
            if nxt.kind == "+":
                self.take()
                sign = Fraction(1)
            elif nxt.kind == "-":
                self.take()
                sign = Fraction(-1)
            else:
                return LinExpr(terms=tuple(terms), const=const)

    def term(self) -> tuple[Fraction, ScalarRef | None]:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            coef = Fraction(tok.value)  # type: ignore[arg-type]
            if self.peek().kind == "*":
                self.take()
                return coef, self.scalar_ref()
            return coef, None
        if tok.kind == "ident":
            return Fraction(1), self.scalar_ref()
        raise self.error(f"expected a number or indexed vector, found {tok.text or 'end of file'!r}")

    def scalar_ref(self) -> ScalarRef:
        name_tok = self.expect("ident", "vector name")
        if self.peek().kind != "[":
            raise self.error(f"vector {name_tok.text} needs an index, like {name_tok.text}[0]")
        self.take()
        idx = self.int_literal("vector index")
        self.expect("]")
        return ScalarRef(name_tok.text, idx)

    def int_literal(self, what: str) -> int:
        tok = self.expect("num", what)
        value = Fraction(tok.value)  # type: ignore[arg-type]
        if value.denominator != 1 or value < 0:
            raise SpecSyntaxError(f"{what} must be a non-negative integer", tok.line, tok.col)
        return int(value)

    def signed_number(self, what: str) -> Fraction:
        negative = False
        if self.peek().kind == "-":
            self.take()
            negative = True
        tok = self.expect("num", what)
        value = Fraction(tok.value)  # type: ignore[arg-type]
        return -value if negative else value


def parse_property(text: str) -> Property:
    """Parse and structurally check a property document."""
    return _Parser(tokenize(text)).property()
