"""Machine-readable verification reports.

Reports are plain JSON with a fixed key order and exact rationals as
"p/q" strings, so a repeated single-threaded run produces a
byte-identical document. Wall-clock time is deliberately excluded; the
stats block carries only deterministic work counters. Multi-threaded
runs embed a note that the counterexample, when several exist, can vary
with scheduling.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .rationals import format_rational, parse_rational
from .solver.search import SolverStats

TOOL_NAME = "relucheck"
TOOL_VERSION = "0.1.0"

PARALLEL_NOTE = (
    "threads > 1: when multiple counterexamples exist, which one is "
    "reported depends on scheduling"
)


@dataclass(frozen=True)
class CexAssignment:
    """One realized assignment step of a counterexample."""

    target: str
    network: str
    source: str
    inputs: tuple[Fraction, ...]
    outputs: tuple[Fraction, ...]


@dataclass(frozen=True)
class Report:
    spec_path: str
    networks: Mapping[str, str]
    verdict: str
    reason: str | None
    config: Mapping[str, object]
    stats: SolverStats
    counterexample: tuple[CexAssignment, ...] | None
    note: str | None = None


def build_counterexample(
    prop,
    networks,
    inputs: Mapping[str, Sequence[Fraction]],
) -> tuple[CexAssignment, ...]:
    """Re-run each network on the given input vectors.

    Outputs are recomputed from the network files rather than read out
    of the solver model, so the report is meaningful on its own."""
    from .network import evaluate

    env: dict[str, tuple[Fraction, ...]] = {
        name: tuple(vec) for name, vec in inputs.items()
    }
    steps = []
    for assign in prop.assigns:
        net = networks[assign.network]
        outputs, _ = evaluate(net, env[assign.source])
        env[assign.target] = tuple(outputs)
        steps.append(
            CexAssignment(
                target=assign.target,
                network=assign.network,
                source=assign.source,
                inputs=tuple(env[assign.source]),
                outputs=tuple(outputs),
            )
        )
    return tuple(steps)


def report_to_dict(report: Report) -> dict:
    doc: dict = {
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "spec": report.spec_path,
        "networks": {name: path for name, path in report.networks.items()},
        "verdict": report.verdict,
        "reason": report.reason,
        "config": dict(report.config),
        "stats": {
            "splits": report.stats.splits,
            "pivots": report.stats.pivots,
            "propagations": report.stats.propagations,
        },
        "counterexample": None,
    }
    if report.counterexample is not None:
        doc["counterexample"] = [
            {
                "target": step.target,
                "network": step.network,
                "source": step.source,
                "inputs": [format_rational(x) for x in step.inputs],
                "outputs": [format_rational(x) for x in step.outputs],
            }
            for step in report.counterexample
        ]
    if report.note:
        doc["note"] = report.note
    return doc


def render_report(report: Report) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def counterexample_inputs(doc: dict) -> dict[str, tuple[Fraction, ...]]:
    """Pull the source vectors out of a parsed report document."""
    cex = doc.get("counterexample")
    if not cex:
        raise ValueError("report has no counterexample")
    inputs: dict[str, tuple[Fraction, ...]] = {}
    for step in cex:
        vec = tuple(parse_rational(x) for x in step["inputs"])
        prev = inputs.get(step["source"])
        if prev is not None and prev != vec:
            raise ValueError(f"conflicting inputs for {step['source']!r}")
        inputs[step["source"]] = vec
    return inputs
