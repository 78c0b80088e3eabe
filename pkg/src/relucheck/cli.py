"""Command line front end.

Subcommands: verify, template, eval, export, check-cex. Network paths
inside a property file are resolved relative to the property file's
directory; --network NAME=PATH overrides are resolved relative to the
current directory. Exit codes for verify: 0 verified, 1 falsified,
2 unknown, 3 error. check-cex: 0 confirmed, 1 refuted, 3 error. All
other subcommands: 0 ok, 3 error. Reports go to --out when given,
otherwise stdout; human-readable progress and timing go to stderr so
report output stays machine-clean.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from . import templates
from .compiler import CompileError, compile_property
from .lang import BindError, SpecSyntaxError, bind, parse_property
from .network import Network, NetworkFormatError, evaluate, load_network
from .rationals import format_rational, parse_rational
from .replay import replay
from .report import (
    PARALLEL_NOTE,
    Report,
    build_counterexample,
    counterexample_inputs,
    render_report,
)
from .smtlib import (
    ModelParseError,
    export_smt2,
    find_external_solver,
    import_model,
    run_external_solver,
)
from .solver.search import (
    FALSIFIED,
    UNKNOWN,
    VERIFIED,
    SolverConfig,
    SolverStats,
    solve,
)

EXIT_VERIFIED = 0
EXIT_FALSIFIED = 1
EXIT_UNKNOWN = 2
EXIT_ERROR = 3

_VERDICT_EXIT = {VERIFIED: EXIT_VERIFIED, FALSIFIED: EXIT_FALSIFIED, UNKNOWN: EXIT_UNKNOWN}


class CliError(Exception):
    pass


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _write_out(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _parse_overrides(items: Sequence[str]) -> dict[str, str]:
    over: dict[str, str] = {}
    for item in items:
        name, sep, path = item.partition("=")
        if not sep or not name or not path:
            raise CliError(f"--network expects NAME=PATH, got {item!r}")
        over[name] = path
    return over


def _load_spec(spec_path: str, overrides: Sequence[str]):
    """Parse, resolve network files and bind. Returns (prop, nets, paths)."""
    try:
        text = Path(spec_path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {spec_path}: {exc}") from exc
    prop = parse_property(text)
    over = _parse_overrides(overrides)
    base = Path(spec_path).resolve().parent
    networks: dict[str, Network] = {}
    paths: dict[str, str] = {}
    for decl in prop.networks:
        if decl.name in over:
            full = Path(over[decl.name])
        else:
            full = Path(decl.path)
            if not full.is_absolute():
                full = base / full
        try:
            networks[decl.name] = load_network(full.read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliError(f"cannot read network {decl.name!r}: {exc}") from exc
        paths[decl.name] = str(full)
    return bind(prop, networks), networks, paths


def _input_vectors(
    model: Mapping[int, Fraction], prop, varmap
) -> dict[str, tuple[Fraction, ...]]:
    # variables a solver model omits are unconstrained; zero is as good
    # a witness as any and replay catches it if not
    out: dict[str, tuple[Fraction, ...]] = {}
    for name in prop.input_names():
        ids = varmap.vectors[name]
        out[name] = tuple(model.get(v, Fraction(0)) for v in ids)
    return out


def _load_network_file(path: str) -> Network:
    try:
        return load_network(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read network file {path}: {exc}") from exc


# -- verify ----------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    prop, networks, paths = _load_spec(args.spec, args.network)
    vc = compile_property(prop, networks)
    config_doc = {
        "backend": args.backend,
        "timeout": args.timeout,
        "threads": args.threads,
        "seed": args.seed,
    }
    started = time.monotonic()
    if args.backend == "smt2":
        verdict, reason, model, stats, note = _run_smt2_backend(vc, args.timeout)
    else:
        result = solve(
            vc,
            SolverConfig(timeout=args.timeout, threads=args.threads, seed=args.seed),
        )
        verdict, reason, model, stats = result.verdict, result.reason, result.model, result.stats
        note = result.note
        if note is None and args.threads > 1:
            note = PARALLEL_NOTE
    elapsed_ms = (time.monotonic() - started) * 1000.0

    cex = None
    if verdict == FALSIFIED:
        assert model is not None
        inputs = _input_vectors(model, prop, vc.varmap)
        outcome = replay(prop, networks, inputs)
        if not outcome.confirmed:
            _say(f"internal error: counterexample failed replay: {outcome.message}")
            return EXIT_ERROR
        cex = build_counterexample(prop, networks, inputs)

    report = Report(
        spec_path=args.spec,
        networks=paths,
        verdict=verdict,
        reason=reason,
        config=config_doc,
        stats=stats,
        counterexample=cex,
        note=note,
    )
    _write_out(render_report(report), args.out)
    _say(
        f"verdict: {verdict}"
        + (f" ({reason})" if reason else "")
        + f"  [{elapsed_ms:.0f} ms, splits={stats.splits}"
        + f" pivots={stats.pivots} propagations={stats.propagations}]"
    )
    if cex:
        names = ", ".join(sorted({s.source for s in cex}))
        _say(f"counterexample over {names} confirmed by replay")
    return _VERDICT_EXIT[verdict]


def _run_smt2_backend(vc, timeout: float | None):
    solver = find_external_solver()
    if solver is None:
        raise CliError(
            "backend smt2 needs an external solver on PATH "
            "(tried z3, cvc5, cvc4, mathsat, yices-smt2)"
        )
    doc = export_smt2(vc)
    answer, output = run_external_solver(doc, solver, timeout=timeout)
    note = f"external solver: {Path(solver[0]).name}"
    stats = SolverStats()
    if answer == "sat":
        try:
            model = import_model(output, vc.varmap)
        except ModelParseError as exc:
            raise CliError(f"solver said sat but model was unreadable: {exc}") from exc
        return FALSIFIED, None, model, stats, note
    if answer == "unsat":
        return VERIFIED, None, None, stats, note
    return UNKNOWN, "external", None, stats, note


# -- template --------------------------------------------------------------


def _box_args(args: argparse.Namespace) -> tuple[Fraction | None, Fraction | None]:
    if args.no_box:
        return None, None
    return parse_rational(args.lo), parse_rational(args.hi)


def cmd_template(args: argparse.Namespace) -> int:
    nuv = _load_network_file(args.nuv)
    lo, hi = _box_args(args)
    kind = args.kind
    if kind == "fairness":
        if args.sensitive is None:
            raise CliError("fairness template needs --sensitive INDEX")
        text = templates.fairness_property(nuv, args.nuv, args.sensitive, lo, hi)
    else:
        if not args.ref:
            raise CliError(f"{kind} template needs --ref PATH")
        ref = _load_network_file(args.ref)
        if ref.name == nuv.name:
            raise CliError(
                f"both networks are named {nuv.name!r}; "
                "give them distinct name fields"
            )
        if kind == "agreement":
            if args.target_class is None:
                raise CliError("agreement template needs --class INDEX")
            text = templates.agreement_property(
                nuv, args.nuv, ref, args.ref, args.target_class, lo, hi
            )
        elif kind == "certified-confidence":
            if args.target_class is None:
                raise CliError("certified-confidence template needs --class INDEX")
            if args.eps is None or args.margin is None:
                raise CliError("certified-confidence template needs --eps and --margin")
            text = templates.certified_confidence_property(
                nuv,
                args.nuv,
                ref,
                args.ref,
                args.target_class,
                parse_rational(args.eps),
                parse_rational(args.margin),
                lo,
                hi,
            )
        else:  # equivalence
            if args.eps is None:
                raise CliError("equivalence template needs --eps")
            text = templates.equivalence_property(
                nuv, args.nuv, ref, args.ref, parse_rational(args.eps), lo, hi
            )
    _write_out(text, args.out)
    return 0


# -- eval ------------------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> int:
    net = _load_network_file(args.network)
    try:
        vec = tuple(parse_rational(part.strip()) for part in args.input.split(","))
    except ValueError as exc:
        raise CliError(f"bad --input: {exc}") from exc
    outputs, trace = evaluate(net, vec)
    if args.trace:
        for k in range(len(net.layers)):
            pre = ", ".join(format_rational(x) for x in trace.pre[k])
            post = ", ".join(format_rational(x) for x in trace.post[k])
            _say(f"layer {k}: pre [{pre}] post [{post}]")
    print(",".join(format_rational(x) for x in outputs))
    return 0


# -- export ----------------------------------------------------------------


def cmd_export(args: argparse.Namespace) -> int:
    prop, networks, _ = _load_spec(args.spec, args.network)
    vc = compile_property(prop, networks)
    _write_out(export_smt2(vc), args.out)
    return 0


# -- check-cex -------------------------------------------------------------


def cmd_check_cex(args: argparse.Namespace) -> int:
    prop, networks, _ = _load_spec(args.spec, args.network)
    try:
        doc = json.loads(Path(args.report).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read report {args.report}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"report is not valid JSON: {exc}") from exc
    try:
        inputs = counterexample_inputs(doc)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    outcome = replay(prop, networks, inputs)
    _say(outcome.message)
    if outcome.problems:
        return EXIT_ERROR
    return 0 if outcome.confirmed else 1


# -- argument parsing ------------------------------------------------------


def _add_network_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--network",
        action="append",
        default=[],
        metavar="NAME=PATH",
        help="override the file for a declared network (repeatable)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relucheck",
        description="exact verification of piecewise-linear (relu) networks "
        "against relational properties",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="decide a property file")
    p.add_argument("spec", help="property file")
    _add_network_flag(p)
    p.add_argument("--timeout", type=float, default=1800.0, metavar="SECONDS")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("builtin", "smt2"), default="builtin")
    p.add_argument("--out", metavar="FILE", help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("template", help="generate a property file")
    p.add_argument("kind", choices=templates.TEMPLATE_KINDS)
    p.add_argument("--nuv", required=True, metavar="PATH", help="network under verification")
    p.add_argument("--ref", metavar="PATH", help="reference network (detector, autoencoder, twin)")
    p.add_argument("--class", dest="target_class", type=int, metavar="INDEX")
    p.add_argument("--eps", metavar="NUM", help="distance bound, exact rational")
    p.add_argument("--margin", metavar="NUM", help="required mean score margin")
    p.add_argument("--sensitive", type=int, metavar="INDEX", help="protected input feature")
    p.add_argument("--lo", default="0", metavar="NUM", help="input box lower bound")
    p.add_argument("--hi", default="1", metavar="NUM", help="input box upper bound")
    p.add_argument("--no-box", action="store_true", help="omit input box constraints")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_template)

    p = sub.add_parser("eval", help="run a network on one input, exactly")
    p.add_argument("network", help="network file")
    p.add_argument("--input", required=True, metavar="CSV", help="comma-separated rationals")
    p.add_argument("--trace", action="store_true", help="print per-layer values to stderr")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export", help="write the verification condition as SMT-LIB 2")
    p.add_argument("spec", help="property file")
    _add_network_flag(p)
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("check-cex", help="replay a reported counterexample")
    p.add_argument("spec", help="property file")
    p.add_argument("report", help="JSON report with a counterexample")
    _add_network_flag(p)
    p.set_defaults(func=cmd_check_cex)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR
    except (SpecSyntaxError, BindError, NetworkFormatError, CompileError) as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR
    except ValueError as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
