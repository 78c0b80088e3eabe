"""Counterexample replay: confirm a claimed violation by direct evaluation.

A counterexample consists of concrete input vectors for the free
variables of a property. Replaying it means running every assignment
through its network with exact arithmetic and checking that the
precondition holds and the postcondition does not. No tolerance is
involved anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .lang.ast import Property
from .lang.evalform import eval_formula
from .network import Network, evaluate


@dataclass(frozen=True)
class ReplayResult:
    confirmed: bool
    pre_holds: bool
    post_holds: bool
    env: Mapping[str, tuple[Fraction, ...]]
    problems: tuple[str, ...]

    @property
    def message(self) -> str:
        if self.problems:
            return "; ".join(self.problems)
        if self.confirmed:
            return "counterexample confirmed: precondition holds, postcondition fails"
        if not self.pre_holds:
            return "not a counterexample: precondition does not hold"
        return "not a counterexample: postcondition holds"


def replay(
    prop: Property,
    networks: Mapping[str, Network],
    inputs: Mapping[str, Sequence[Fraction]],
) -> ReplayResult:
    """Evaluate the property at the given inputs, exactly."""
    env: dict[str, tuple[Fraction, ...]] = {}
    problems: list[str] = []
    for name in prop.input_names():
        if name not in inputs:
            problems.append(f"missing input vector {name!r}")
            continue
        env[name] = tuple(Fraction(x) for x in inputs[name])
    if problems:
        return ReplayResult(False, False, False, env, tuple(problems))

    for assign in prop.assigns:
        net = networks.get(assign.network)
        if net is None:
            problems.append(f"missing network {assign.network!r}")
            break
        vec = env[assign.source]
        if len(vec) != net.input_dim:
            problems.append(
                f"{assign.source} has {len(vec)} entries, "
                f"{assign.network} expects {net.input_dim}"
            )
            break
        outputs, _ = evaluate(net, vec)
        env[assign.target] = tuple(outputs)
    if problems:
        return ReplayResult(False, False, False, env, tuple(problems))

    pre_holds = eval_formula(prop.pre, env)
    post_holds = eval_formula(prop.post, env)
    confirmed = pre_holds and not post_holds
    return ReplayResult(confirmed, pre_holds, post_holds, env, ())
