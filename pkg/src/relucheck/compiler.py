"""Compile a bound property plus its networks into a verification condition.

The VC is the satisfiability problem for

    pre  AND  network-assignment constraints  AND  NOT post

so a satisfying assignment is a counterexample to the property and
unsatisfiability proves the property. Every non-input neuron nu
contributes a fresh pre-activation variable Y_nu defined by an affine
equality over the previous layer; ReLU neurons add a post-activation
variable X_nu tied to Y_nu by a ReluConstraint, which the solver
resolves by phase splitting, while identity neurons simply expose Y_nu
itself. Input vectors shared between assignments reuse the same solver
variables, so cross-network claims (same input into f and g) hold by
construction.

Compilation is deterministic: variable ids follow assignment order, and
atoms are interned in first-use order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .lang import (
    And,
    Compare,
    EQ,
    FalseF,
    Formula,
    Implies,
    LE,
    LinExpr,
    LT,
    Not,
    Or,
    Property,
    TrueF,
    desugar_property,
)
from .network import LINEAR, Network, RELU, evaluate

NET_INPUT = "input"
NEURON_PRE = "pre"
NEURON_POST = "post"
AUXILIARY = "aux"


@dataclass(frozen=True)
class VarInfo:
    """Provenance of one solver variable."""

    kind: str
    assignment: int | None = None  # which assignment introduced it
    layer: int | None = None
    index: int = 0
    vector: str | None = None  # property-level vector it realizes, if any


@dataclass(frozen=True)
class LinearConstraint:
    """terms . vars  op  rhs, terms sorted by variable id with no zeros."""

    terms: tuple[tuple[Fraction, int], ...]
    op: str  # one of <=, <, ==
    rhs: Fraction


@dataclass(frozen=True)
class ReluConstraint:
    """post = max(0, pre), resolved by the solver via phase splitting."""

    pre: int
    post: int


@dataclass(frozen=True)
class AffineDef:
    """var = terms . vars + const, one per neuron weighted sum."""

    var: int
    terms: tuple[tuple[Fraction, int], ...]
    const: Fraction


# Skeleton nodes: negation-normal boolean structure over atom indices.


class BNode:
    __slots__ = ()


@dataclass(frozen=True)
class BTrue(BNode):
    pass


@dataclass(frozen=True)
class BFalse(BNode):
    pass


@dataclass(frozen=True)
class BAtom(BNode):
    atom: int


@dataclass(frozen=True)
class BAnd(BNode):
    parts: tuple[BNode, ...]


@dataclass(frozen=True)
class BOr(BNode):
    parts: tuple[BNode, ...]


@dataclass(frozen=True)
class PortRecord:
    """Solver-variable windows for one assignment target := network(source)."""

    assignment: int
    network: str
    target: str
    source: str
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]


@dataclass
class VarMap:
    provenance: list[VarInfo] = field(default_factory=list)
    vectors: dict[str, tuple[int, ...]] = field(default_factory=dict)
    ports: list[PortRecord] = field(default_factory=list)

    def name(self, var: int) -> str:
        return f"v{var}"

    @property
    def num_vars(self) -> int:
        return len(self.provenance)


@dataclass
class VC:
    skeleton: BNode
    atoms: list[LinearConstraint]
    hard_constraints: list[LinearConstraint]
    relus: list[ReluConstraint]
    definitions: list[AffineDef]
    varmap: VarMap
    input_boxes: dict[int, tuple[Fraction | None, Fraction | None]]

    @property
    def num_vars(self) -> int:
        return self.varmap.num_vars


class CompileError(ValueError):
    pass


# -- negation normal form over core formulas ---------------------------


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, TrueF):
        return FalseF() if neg else f
    if isinstance(f, FalseF):
        return TrueF() if neg else f
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, And):
        if neg:
            return Or(_nnf(f.lhs, True), _nnf(f.rhs, True))
        return And(_nnf(f.lhs, False), _nnf(f.rhs, False))
    if isinstance(f, Or):
        if neg:
            return And(_nnf(f.lhs, True), _nnf(f.rhs, True))
        return Or(_nnf(f.lhs, False), _nnf(f.rhs, False))
    if isinstance(f, Implies):
        if neg:
            return And(_nnf(f.lhs, False), _nnf(f.rhs, True))
        return Or(_nnf(f.lhs, True), _nnf(f.rhs, False))
    if isinstance(f, Compare):
        if not neg:
            return f
        if f.op == LE:
            return Compare(f.rhs, LT, f.lhs)
        if f.op == LT:
            return Compare(f.rhs, LE, f.lhs)
        if f.op == EQ:
            return Or(Compare(f.lhs, LT, f.rhs), Compare(f.rhs, LT, f.lhs))
        raise CompileError(f"non-core comparison {f.op} reached negation; desugar first")
    raise CompileError(f"cannot negate non-core formula node {type(f).__name__}; desugar first")


def to_nnf(f: Formula) -> Formula:
    """Push negations onto atoms; output uses only And/Or and positive atoms."""
    return _nnf(f, False)


def negate(f: Formula) -> Formula:
    """Negation-normal negation of a core formula.

    negate(x <= 3) is 3 < x; negate(a && b) is !a || !b with the
    negations pushed all the way down.
    """
    return _nnf(f, True)


# -- encoding -----------------------------------------------------------


class _Builder:
    def __init__(self) -> None:
        self.varmap = VarMap()
        self.definitions: list[AffineDef] = []
        self.relus: list[ReluConstraint] = []
        self.atoms: list[LinearConstraint] = []
        self._atom_ids: dict[tuple, int] = {}

    def new_var(self, info: VarInfo) -> int:
        self.varmap.provenance.append(info)
        return len(self.varmap.provenance) - 1

    def vector_vars(self, name: str, dim: int, assignment: int) -> tuple[int, ...]:
        got = self.varmap.vectors.get(name)
        if got is not None:
            return got
        ids = tuple(
            self.new_var(VarInfo(NET_INPUT, assignment=assignment, index=i, vector=name))
            for i in range(dim)
        )
        self.varmap.vectors[name] = ids
        return ids

    def intern_atom(self, c: LinearConstraint) -> int:
        key = (c.terms, c.op, c.rhs)
        got = self._atom_ids.get(key)
        if got is not None:
            return got
        self.atoms.append(c)
        idx = len(self.atoms) - 1
        self._atom_ids[key] = idx
        return idx


def encode_network(
    net: Network,
    builder: _Builder,
    assignment: int,
    input_vars: Sequence[int],
    target: str,
) -> tuple[int, ...]:
    """Unroll one application of net onto fresh Y/X variables.

    Returns the output-layer value variable ids. Every neuron adds one
    weighted-sum definition for its Y variable; ReLU neurons add a fresh
    X variable tied to Y by a ReluConstraint. Identity neurons need no
    second variable: their value IS the weighted sum, so downstream
    layers and property atoms reference Y directly and the solver carries
    one row less per neuron.
    """
    if len(input_vars) != net.input_dim:
        raise CompileError(
            f"{net.name} expects {net.input_dim} inputs, got {len(input_vars)} wires"
        )
    prev: Sequence[int] = tuple(input_vars)
    for l, layer in enumerate(net.layers):
        post_vars: list[int] = []
        vec = target if l == len(net.layers) - 1 else None
        for i in range(layer.size):
            relu = layer.activation == RELU
            y = builder.new_var(
                VarInfo(
                    NEURON_PRE,
                    assignment=assignment,
                    layer=l,
                    index=i,
                    vector=None if relu else vec,
                )
            )
            terms = tuple(
                (w, v) for w, v in zip(layer.weights[i], prev) if w
            )
            builder.definitions.append(AffineDef(y, terms, layer.bias[i]))
            if relu:
                x = builder.new_var(
                    VarInfo(NEURON_POST, assignment=assignment, layer=l, index=i, vector=vec)
                )
                builder.relus.append(ReluConstraint(pre=y, post=x))
            else:
                x = y
            post_vars.append(x)
        prev = tuple(post_vars)
    return tuple(prev)


def _to_constraint(f: Compare, vectors: Mapping[str, tuple[int, ...]]) -> LinearConstraint | None:
    """Normalize lhs op rhs into sorted combined terms; None if constant."""
    acc: dict[int, Fraction] = {}

    def fold(e: LinExpr, sign: int) -> Fraction:
        for coef, ref in e.terms:
            var = vectors[ref.vector][ref.index]
            acc[var] = acc.get(var, Fraction(0)) + sign * coef
        return e.const

    lc = fold(f.lhs, 1)
    rc = fold(f.rhs, -1)
    rhs = rc - lc
    terms = tuple((c, v) for v, c in sorted(acc.items()) if c)
    if not terms:
        return None
    return LinearConstraint(terms=terms, op=f.op, rhs=rhs)


def _const_truth(f: Compare) -> bool:
    lhs = f.lhs.const
    rhs = f.rhs.const
    if f.op == LE:
        return lhs <= rhs
    if f.op == LT:
        return lhs < rhs
    return lhs == rhs


def _skeletonize(f: Formula, builder: _Builder) -> BNode:
    if isinstance(f, TrueF):
        return BTrue()
    if isinstance(f, FalseF):
        return BFalse()
    if isinstance(f, Compare):
        c = _to_constraint(f, builder.varmap.vectors)
        if c is None:
            return BTrue() if _const_truth(f) else BFalse()
        return BAtom(builder.intern_atom(c))
    if isinstance(f, (And, Or)):
        con = isinstance(f, And)
        parts: list[BNode] = []
        for sub in (f.lhs, f.rhs):
            node = _skeletonize(sub, builder)
            if isinstance(node, BTrue):
                if not con:
                    return BTrue()
                continue
            if isinstance(node, BFalse):
                if con:
                    return BFalse()
                continue
            if con and isinstance(node, BAnd):
                parts.extend(node.parts)
            elif not con and isinstance(node, BOr):
                parts.extend(node.parts)
            else:
                parts.append(node)
        if not parts:
            return BTrue() if con else BFalse()
        if len(parts) == 1:
            return parts[0]
        return BAnd(tuple(parts)) if con else BOr(tuple(parts))
    raise CompileError(f"skeleton expects NNF, found {type(f).__name__}")


def _tighten_boxes(
    atoms: Iterable[LinearConstraint],
    input_vars: set[int],
    rounds: int = 8,
) -> dict[int, tuple[Fraction | None, Fraction | None]]:
    """Interval tightening over the always-true atoms that touch inputs only.

    Sound relaxation: strict bounds are kept as closed intervals, which is
    fine because boxes only prune, never decide.
    """
    usable = [c for c in atoms if all(v in input_vars for _, v in c.terms)]
    boxes: dict[int, tuple[Fraction | None, Fraction | None]] = {v: (None, None) for v in input_vars}

    def shrink(var: int, lo: Fraction | None, hi: Fraction | None) -> bool:
        old_lo, old_hi = boxes[var]
        new_lo = old_lo if lo is None or (old_lo is not None and old_lo >= lo) else lo
        new_hi = old_hi if hi is None or (old_hi is not None and old_hi <= hi) else hi
        if (new_lo, new_hi) == (old_lo, old_hi):
            return False
        boxes[var] = (new_lo, new_hi)
        return True

    def bound_one(c: LinearConstraint, upper: bool) -> bool:
        # terms . x <= rhs (upper) or terms . x >= rhs (lower, from ==)
        changed = False
        for coef, var in c.terms:
            rest_lo = Fraction(0)
            ok = True
            for coef2, var2 in c.terms:
                if var2 == var:
                    continue
                lo2, hi2 = boxes[var2]
                want = lo2 if (coef2 > 0) == upper else hi2
                if want is None:
                    ok = False
                    break
                rest_lo += coef2 * want
            if not ok:
                continue
            budget = (c.rhs - rest_lo) / coef
            if (coef > 0) == upper:
                changed |= shrink(var, None, budget)
            else:
                changed |= shrink(var, budget, None)
        return changed

    for _ in range(rounds):
        changed = False
        for c in usable:
            if c.op in (LE, LT):
                changed |= bound_one(c, upper=True)
            else:  # equality, both directions
                changed |= bound_one(c, upper=True)
                changed |= bound_one(c, upper=False)
        if not changed:
            break
    return {v: b for v, b in boxes.items() if b != (None, None)}


def _top_conjunct_atoms(node: BNode) -> list[int]:
    if isinstance(node, BAtom):
        return [node.atom]
    if isinstance(node, BAnd):
        out: list[int] = []
        for part in node.parts:
            if isinstance(part, BAtom):
                out.append(part.atom)
        return out
    return []


def compile_property(prop: Property, networks: Mapping[str, Network]) -> VC:
    """Build the VC for a bound property.

    Desugars first if needed, encodes every assignment (inputs shared by
    name), and assembles the skeleton NNF(pre && !post) over interned
    atoms. Runs a short interval-tightening pass over the unconditional
    input-only atoms to seed input boxes for the solver.
    """
    prop = desugar_property(prop)
    builder = _Builder()
    for idx, a in enumerate(prop.assigns):
        net = networks[a.network]
        ins = builder.vector_vars(a.source, net.input_dim, idx)
        outs = encode_network(net, builder, idx, ins, a.target)
        builder.varmap.vectors[a.target] = outs
        builder.varmap.ports.append(
            PortRecord(
                assignment=idx,
                network=a.network,
                target=a.target,
                source=a.source,
                inputs=ins,
                outputs=outs,
            )
        )

    skeleton = _skeletonize(And(to_nnf(prop.pre), negate(prop.post)), builder)

    hard = [
        LinearConstraint(
            terms=tuple(sorted([(Fraction(-1), d.var)] + [(c, v) for c, v in d.terms], key=lambda t: t[1])),
            op=EQ,
            rhs=-d.const,
        )
        for d in builder.definitions
    ]

    input_vars = {
        v for ids in (builder.varmap.vectors[n] for n in {p.source for p in builder.varmap.ports})
        for v in ids
    }
    unconditional = [builder.atoms[i] for i in _top_conjunct_atoms(skeleton)]
    boxes = _tighten_boxes(unconditional, input_vars)

    return VC(
        skeleton=skeleton,
        atoms=builder.atoms,
        hard_constraints=hard,
        relus=builder.relus,
        definitions=builder.definitions,
        varmap=builder.varmap,
        input_boxes=boxes,
    )


# -- concrete assignments over VC variables ------------------------------


def satisfies_constraint(c: LinearConstraint, values: Mapping[int, Fraction]) -> bool:
    total = sum((coef * values[v] for coef, v in c.terms), Fraction(0))
    if c.op == LE:
        return total <= c.rhs
    if c.op == LT:
        return total < c.rhs
    return total == c.rhs


def satisfies_relu(r: ReluConstraint, values: Mapping[int, Fraction]) -> bool:
    y = values[r.pre]
    x = values[r.post]
    return x == (y if y > 0 else Fraction(0))


def eval_skeleton(node: BNode, atom_truth: Sequence[bool]) -> bool:
    if isinstance(node, BTrue):
        return True
    if isinstance(node, BFalse):
        return False
    if isinstance(node, BAtom):
        return atom_truth[node.atom]
    if isinstance(node, BAnd):
        return all(eval_skeleton(p, atom_truth) for p in node.parts)
    if isinstance(node, BOr):
        return any(eval_skeleton(p, atom_truth) for p in node.parts)
    raise TypeError(f"unknown skeleton node {node!r}")


def trace_assignment(
    vc: VC,
    networks: Mapping[str, Network],
    inputs: Mapping[str, Sequence[Fraction]],
) -> dict[int, Fraction]:
    """Evaluate every port's network on concrete inputs and lay the traces
    over the VC variables. The result satisfies all hard constraints and
    relus by construction (the consistency tests pin this down)."""
    values: dict[int, Fraction] = {}
    for port in vc.varmap.ports:
        x = [Fraction(v) for v in inputs[port.source]]
        for var, val in zip(vc.varmap.vectors[port.source], x):
            values[var] = val
        net = networks[port.network]
        _, trace = evaluate(net, x)
        # walk this port's Y/X vars in allocation order
        for var, info in enumerate(vc.varmap.provenance):
            if info.assignment != port.assignment or info.kind == NET_INPUT:
                continue
            if info.kind == NEURON_PRE:
                values[var] = trace.pre[info.layer][info.index]
            elif info.kind == NEURON_POST:
                values[var] = trace.post[info.layer][info.index]
    return values
