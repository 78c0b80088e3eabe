"""Property language: parsing, binding, desugaring, evaluation, rendering."""

from .ast import (
    ALL_OPS,
    And,
    ArgmaxIs,
    Assignment,
    Compare,
    CORE_OPS,
    DistBound,
    EQ,
    FalseF,
    Formula,
    free_vectors,
    GE,
    GT,
    Implies,
    LE,
    LinExpr,
    LT,
    NE,
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
)
from .binder import bind, BindError
from .desugar import desugar_formula, desugar_property, is_core
from .evalform import Env, eval_formula, eval_linexpr, UnboundVariableError
from .lexer import SpecSyntaxError, Token, tokenize
from .parser import parse_property
from .render import render_formula, render_linexpr, render_property

__all__ = [
    "ALL_OPS",
    "And",
    "ArgmaxIs",
    "Assignment",
    "BindError",
    "Compare",
    "CORE_OPS",
    "DistBound",
    "EQ",
    "Env",
    "FalseF",
    "Formula",
    "free_vectors",
    "GE",
    "GT",
    "Implies",
    "LE",
    "LinExpr",
    "LT",
    "NE",
    "NetworkDecl",
    "Not",
    "NUV",
    "Or",
    "Property",
    "ScalarRef",
    "SPEC",
    "SpecSyntaxError",
    "Token",
    "TrueF",
    "UnboundVariableError",
    "VecEq",
    "VectorVar",
    "bind",
    "desugar_formula",
    "desugar_property",
    "eval_formula",
    "eval_linexpr",
    "is_core",
    "parse_property",
    "render_formula",
    "render_linexpr",
    "render_property",
    "tokenize",
]
