"""CNF translation of the VC skeleton.

The skeleton arrives in negation normal form with positive atoms only,
so the polarity-aware (Plaisted-Greenbaum) translation emits one
implication per connective node instead of a full equivalence: for a
definition variable d of AND(p1..pk) the clauses are (!d | p_i), for
OR(p1..pk) the single clause (!d | p1 | ... | pk). The root contributes
unit clauses. Because the skeleton is monotone in its atoms, any model
of this CNF extends to a model of the skeleton and vice versa.

Boolean variables are 1-based ints; a negative literal is the negated
variable. Atom indices map to the first block of variables in atom
order, connective definitions follow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..compiler import BAnd, BAtom, BFalse, BNode, BOr, BTrue


@dataclass
class CNF:
    clauses: list[list[int]]
    atom_var: dict[int, int]  # atom index -> boolean variable
    num_vars: int
    var_atom: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.var_atom:
            self.var_atom = {v: a for a, v in self.atom_var.items()}


def to_cnf(skeleton: BNode, num_atoms: int) -> CNF:
    """Translate a folded skeleton (no BTrue/BFalse below the root)."""
    atom_var = {a: a + 1 for a in range(num_atoms)}
    clauses: list[list[int]] = []
    next_var = num_atoms + 1
    memo: dict[BNode, int] = {}

    def define(node: BNode) -> int:
        nonlocal next_var
        got = memo.get(node)
        if got is not None:
            return got
        if isinstance(node, BAtom):
            memo[node] = atom_var[node.atom]
            return memo[node]
        if isinstance(node, (BTrue, BFalse)):
            raise ValueError("constants must be folded away before CNF translation")
        d = next_var
        next_var += 1
        memo[node] = d
        if isinstance(node, BAnd):
            for part in node.parts:
                clauses.append([-d, define(part)])
        elif isinstance(node, BOr):
            clauses.append([-d] + [define(part) for part in node.parts])
        else:
            raise TypeError(f"unknown skeleton node {node!r}")
        return d

    if isinstance(skeleton, BTrue):
        return CNF(clauses=[], atom_var=atom_var, num_vars=num_atoms)
    if isinstance(skeleton, BFalse):
        return CNF(clauses=[[]], atom_var=atom_var, num_vars=num_atoms)
    if isinstance(skeleton, BAnd):
        # flatten the root so top-level conjuncts become unit clauses
        for part in skeleton.parts:
            clauses.append([define(part)])
    else:
        clauses.append([define(skeleton)])
    return CNF(clauses=clauses, atom_var=atom_var, num_vars=next_var - 1)
