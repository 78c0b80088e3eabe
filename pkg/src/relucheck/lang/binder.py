"""Dimension binding: attach concrete network shapes to a parsed property."""

from __future__ import annotations

from typing import Mapping

from ..network import Network
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
    VectorVar,
)


class BindError(ValueError):
    pass


def bind(prop: Property, networks: Mapping[str, Network]) -> Property:
    """Return a copy of prop with every vector dimension filled in.

    Dimensions come from the networks: an assignment's source takes the
    network's input_dim, its target the output_dim. A vector feeding two
    networks of different input_dim is an error, as is any index out of
    range in a formula. Binding an already-bound property re-checks and
    returns an equal property (idempotent).
    """
    for decl in prop.networks:
        if decl.name not in networks:
            raise BindError(f"no network loaded for declaration {decl.name}")

    dims: dict[str, int] = {v.name: v.dim for v in prop.variables if v.dim is not None}

    def settle(name: str, dim: int, why: str) -> None:
        known = dims.get(name)
        if known is not None and known != dim:
            raise BindError(f"{name} would need dimension {dim} {why}, but it is {known}")
        dims[name] = dim

    for a in prop.assigns:
        net = networks[a.network]
        settle(a.source, net.input_dim, f"to feed {a.network}")
        settle(a.target, net.output_dim, f"as the output of {a.network}")

    _check_formula(prop.pre, dims, "precondition")
    _check_formula(prop.post, dims, "postcondition")

    return Property(
        networks=prop.networks,
        pre=prop.pre,
        assigns=prop.assigns,
        post=prop.post,
        variables=tuple(VectorVar(v.name, dims[v.name]) for v in prop.variables),
    )


def _check_expr(e: LinExpr, dims: Mapping[str, int], where: str) -> None:
    for _, ref in e.terms:
        dim = dims.get(ref.vector)
        if dim is None:
            raise BindError(f"{where}: unknown vector {ref.vector}")
        if not 0 <= ref.index < dim:
            raise BindError(
                f"{where}: index {ref.index} out of range for {ref.vector} (dimension {dim})"
            )


def _check_formula(f: Formula, dims: Mapping[str, int], where: str) -> None:
    if isinstance(f, (TrueF, FalseF)):
        return
    if isinstance(f, Not):
        _check_formula(f.arg, dims, where)
        return
    if isinstance(f, (And, Or, Implies)):
        _check_formula(f.lhs, dims, where)
        _check_formula(f.rhs, dims, where)
        return
    if isinstance(f, Compare):
        _check_expr(f.lhs, dims, where)
        _check_expr(f.rhs, dims, where)
        return
    if isinstance(f, ArgmaxIs):
        dim = dims.get(f.vector)
        if dim is None:
            raise BindError(f"{where}: unknown vector {f.vector}")
        if not 0 <= f.index < dim:
            raise BindError(
                f"{where}: argmax class {f.index} out of range for {f.vector} (dimension {dim})"
            )
        return
    if isinstance(f, (DistBound, VecEq)):
        for name in (f.lhs, f.rhs):
            if name not in dims:
                raise BindError(f"{where}: unknown vector {name}")
        if dims[f.lhs] != dims[f.rhs]:
            raise BindError(
                f"{where}: {f.lhs} and {f.rhs} have different dimensions "
                f"({dims[f.lhs]} vs {dims[f.rhs]})"
            )
        return
    raise TypeError(f"unknown formula node {f!r}")
