"""relucheck: exact decision procedure for relu-network properties.

The pipeline is parse -> bind -> compile -> solve:

    from relucheck import (
        bind, compile_property, load_network, parse_property, solve,
    )

    prop = bind(parse_property(spec_text), networks)
    result = solve(compile_property(prop, networks))

All arithmetic is exact rational arithmetic; a "falsified" verdict
always comes with a counterexample that replays on the actual networks.
"""

from .compiler import CompileError, VC, compile_property
from .lang import (
    BindError,
    Property,
    SpecSyntaxError,
    bind,
    parse_property,
    render_property,
)
from .network import (
    EvalTrace,
    Network,
    NetworkFormatError,
    evaluate,
    load_network,
    render_network,
    validate,
)
from .rationals import Rational, format_rational, parse_rational
from .replay import ReplayResult, replay
from .report import Report, build_counterexample, render_report
from .smtlib import export_smt2, import_model
from .solver import (
    FALSIFIED,
    UNKNOWN,
    VERIFIED,
    SolverConfig,
    SolverResult,
    SolverStats,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "BindError",
    "CompileError",
    "EvalTrace",
    "FALSIFIED",
    "Network",
    "NetworkFormatError",
    "Property",
    "Rational",
    "ReplayResult",
    "Report",
    "SolverConfig",
    "SolverResult",
    "SolverStats",
    "SpecSyntaxError",
    "UNKNOWN",
    "VC",
    "VERIFIED",
    "bind",
    "build_counterexample",
    "compile_property",
    "evaluate",
    "export_smt2",
    "format_rational",
    "import_model",
    "load_network",
    "parse_property",
    "parse_rational",
    "render_network",
    "render_property",
    "render_report",
    "replay",
    "solve",
    "validate",
    "__version__",
]
