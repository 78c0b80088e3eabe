"""Ready-made property builders for common verification queries.

Each builder returns property-language source text produced by the
canonical renderer, so the output is guaranteed to re-parse. Dimensions
are taken from the actual network files; mismatches fail fast here
rather than at bind time with a less specific message.
"""

from __future__ import annotations

from fractions import Fraction

from .lang.ast import (
    And,
    ArgmaxIs,
    Assignment,
    Compare,
    DistBound,
    Formula,
    GT,
    Implies,
    LE,
    LinExpr,
    NE,
    NetworkDecl,
    Property,
    ScalarRef,
    TrueF,
    VecEq,
    VectorVar,
    EQ,
    NUV,
    SPEC,
)
from .lang.render import render_property
from .network import Network

TEMPLATE_KINDS = ("agreement", "certified-confidence", "equivalence", "fairness")


class TemplateError(ValueError):
    pass


def _conj(parts: list[Formula]) -> Formula:
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _num(x) -> LinExpr:
    return LinExpr((), Fraction(x))


def _sref(vec: str, i: int) -> LinExpr:
    return LinExpr(((Fraction(1), ScalarRef(vec, i)),), Fraction(0))


def _box(vec: str, dim: int, lo: Fraction | None, hi: Fraction | None) -> list[Formula]:
    atoms: list[Formula] = []
    for i in range(dim):
        if lo is not None:
            atoms.append(Compare(_num(lo), LE, _sref(vec, i)))
        if hi is not None:
            atoms.append(Compare(_sref(vec, i), LE, _num(hi)))
    return atoms


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise TemplateError(msg)


def agreement_property(
    nuv: Network,
    nuv_path: str,
    ref: Network,
    ref_path: str,
    target_class: int,
    lo: Fraction | None = Fraction(0),
    hi: Fraction | None = Fraction(1),
) -> str:
    """Whenever the reference yes/no detector says yes, the network under
    verification must put its strict maximum on target_class."""
    _require(nuv.input_dim == ref.input_dim, "networks take different input sizes")
    _require(ref.output_dim == 2, "reference detector must have exactly 2 outputs")
    _require(0 <= target_class < nuv.output_dim, "target class out of range")
    prop = Property(
        networks=(
            NetworkDecl(NUV, nuv.name, nuv_path),
            NetworkDecl(SPEC, ref.name, ref_path),
        ),
        pre=_conj(_box("x", nuv.input_dim, lo, hi)),
        assigns=(
            Assignment("y1", nuv.name, "x"),
            Assignment("y2", ref.name, "x"),
        ),
        post=Implies(
            Compare(_sref("y2", 1), GT, _sref("y2", 0)),
            ArgmaxIs("y1", target_class),
        ),
        variables=(VectorVar("x"), VectorVar("y1"), VectorVar("y2")),
    )
    return render_property(prop)


def certified_confidence_property(
    nuv: Network,
    nuv_path: str,
    autoencoder: Network,
    ae_path: str,
    target_class: int,
    epsilon: Fraction,
    margin: Fraction,
    lo: Fraction | None = Fraction(0),
    hi: Fraction | None = Fraction(1),
) -> str:
    """On inputs the autoencoder reconstructs within epsilon, a
    target_class answer must win by more than `margin` on average
    against the other scores.

    The margin comparison is stated with cleared denominators: with n
    outputs, n*y1[c] - sum_{j != c} y1[j] > n*margin."""
    _require(nuv.input_dim == autoencoder.input_dim, "networks take different input sizes")
    _require(
        autoencoder.output_dim == autoencoder.input_dim,
        "autoencoder must reconstruct its input (output size == input size)",
    )
    n = nuv.output_dim
    _require(0 <= target_class < n, "target class out of range")
    _require(n >= 2, "network under verification needs at least 2 outputs")
    lhs_terms = [(Fraction(n), ScalarRef("y1", target_class))]
    lhs_terms += [
        (Fraction(-1), ScalarRef("y1", j)) for j in range(n) if j != target_class
    ]
    margin_atom = Compare(
        LinExpr(tuple(lhs_terms), Fraction(0)),
        GT,
        _num(Fraction(n) * Fraction(margin)),
    )
    prop = Property(
        networks=(
            NetworkDecl(NUV, nuv.name, nuv_path),
            NetworkDecl(SPEC, autoencoder.name, ae_path),
        ),
        pre=_conj(_box("x", nuv.input_dim, lo, hi)),
        assigns=(
            Assignment("y1", nuv.name, "x"),
            Assignment("y2", autoencoder.name, "x"),
        ),
        post=Implies(
            And(
                DistBound("y2", "x", LE, Fraction(epsilon)),
                ArgmaxIs("y1", target_class),
            ),
            margin_atom,
        ),
        variables=(VectorVar("x"), VectorVar("y1"), VectorVar("y2")),
    )
    return render_property(prop)


def equivalence_property(
    nuv: Network,
    nuv_path: str,
    ref: Network,
    ref_path: str,
    epsilon: Fraction,
    lo: Fraction | None = Fraction(0),
    hi: Fraction | None = Fraction(1),
) -> str:
    """Outputs of the two networks stay within epsilon in the sup norm."""
    _require(nuv.input_dim == ref.input_dim, "networks take different input sizes")
    _require(nuv.output_dim == ref.output_dim, "networks produce different output sizes")
    prop = Property(
        networks=(
            NetworkDecl(NUV, nuv.name, nuv_path),
            NetworkDecl(SPEC, ref.name, ref_path),
        ),
        pre=_conj(_box("x", nuv.input_dim, lo, hi)),
        assigns=(
            Assignment("y1", nuv.name, "x"),
            Assignment("y2", ref.name, "x"),
        ),
        post=DistBound("y1", "y2", LE, Fraction(epsilon)),
        variables=(VectorVar("x"), VectorVar("y1"), VectorVar("y2")),
    )
    return render_property(prop)


def fairness_property(
    nuv: Network,
    nuv_path: str,
    sensitive_index: int,
    lo: Fraction | None = Fraction(0),
    hi: Fraction | None = Fraction(1),
) -> str:
    """Changing only the sensitive input feature must not change any output."""
    dim = nuv.input_dim
    _require(0 <= sensitive_index < dim, "sensitive index out of range")
    pre_parts: list[Formula] = []
    pre_parts += _box("x1", dim, lo, hi)
    pre_parts += _box("x2", dim, lo, hi)
    pre_parts.append(
        Compare(_sref("x1", sensitive_index), NE, _sref("x2", sensitive_index))
    )
    for j in range(dim):
        if j != sensitive_index:
            pre_parts.append(Compare(_sref("x1", j), EQ, _sref("x2", j)))
    prop = Property(
        networks=(NetworkDecl(NUV, nuv.name, nuv_path),),
        pre=_conj(pre_parts),
        assigns=(
            Assignment("y1", nuv.name, "x1"),
            Assignment("y2", nuv.name, "x2"),
        ),
        post=VecEq("y1", "y2"),
        variables=(
            VectorVar("x1"),
            VectorVar("x2"),
            VectorVar("y1"),
            VectorVar("y2"),
        ),
    )
    return render_property(prop)
