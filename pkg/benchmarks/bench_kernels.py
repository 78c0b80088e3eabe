#!/usr/bin/env python3
"""Compare the compiled row kernels against the pure-Python twin.

Two views:

  1. Microbenchmarks of the row operations the simplex spends its time
     in, on dense rows shaped like the wide layers of the acceptance
     instance (hundreds of entries, integer cells of a few machine
     words).
  2. One end-to-end verification run per backend, in subprocesses so the
     import-time backend choice (RELUCHECK_PURE=1) is honored.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import os
import random
import statistics
import subprocess
import sys
import time

from relucheck import _rowops_py
from relucheck.kernels import COMPILED

try:
    from relucheck import _rowops
except ImportError:
    _rowops = None

try:
    from gmpy2 import mpz
except ImportError:
    mpz = int

WIDTH = 400
BITS = 120
REPS = 400


def _rows(rng: random.Random):
    a = [mpz(rng.getrandbits(BITS) - (1 << (BITS - 1))) for _ in range(WIDTH)]
    b = [mpz(rng.getrandbits(BITS) - (1 << (BITS - 1))) for _ in range(WIDTH)]
    for i in rng.sample(range(WIDTH), WIDTH // 3):
        b[i] = mpz(0)
    return a, b


def _time(fn, setup, reps: int = REPS) -> float:
    samples = []
    for _ in range(5):
        args = [setup() for _ in range(reps)]
        started = time.perf_counter()
        for arg in args:
            fn(*arg)
        samples.append((time.perf_counter() - started) / reps)
    return statistics.median(samples)


def bench_kernels() -> None:
    rng = random.Random(0)
    ct, cs = mpz(987654321987654321), mpz(123456789123456789)
    g = mpz(3)
    cases = [
        ("row_combine", lambda impl: lambda t, s: impl.row_combine(t, s, ct, cs)),
        ("row_axpy", lambda impl: lambda t, s: impl.row_axpy(t, s, cs)),
        ("row_idiv", lambda impl: lambda t, s: impl.row_idiv([v * g for v in t], g)),
        ("nonzero_indices", lambda impl: lambda t, s: impl.nonzero_indices(s)),
    ]
    print(f"rows of {WIDTH} cells, ~{BITS}-bit integers, median of 5x{REPS}")
    print(f"{'kernel':<18}{'pure us':>12}{'compiled us':>14}{'speedup':>10}")
    for name, make in cases:
        pure = _time(make(_rowops_py), lambda: _rows(rng))
        if _rowops is None:
            print(f"{name:<18}{pure * 1e6:>12.1f}{'n/a':>14}{'n/a':>10}")
            continue
        comp = _time(make(_rowops), lambda: _rows(rng))
        print(
            f"{name:<18}{pure * 1e6:>12.1f}{comp * 1e6:>14.1f}"
            f"{pure / comp:>9.2f}x"
        )


VERIFY_SNIPPET = r"""
import sys, time
sys.path.insert(0, "tests")
from fractions import Fraction
from bignets import build_autoencoder, build_classifier, winning_class
from relucheck import kernels
from relucheck.compiler import compile_property
from relucheck.lang import bind, parse_property
from relucheck.solver import SolverConfig, solve
from relucheck.templates import certified_confidence_property

clf = build_classifier()
ae = build_autoencoder()
spec = certified_confidence_property(
    clf, "clf.json", ae, "ae.json",
    target_class=winning_class(clf),
    epsilon=Fraction(1, 10), margin=Fraction(1),
)
nets = {clf.name: clf, ae.name: ae}
prop = bind(parse_property(spec), nets)
vc = compile_property(prop, nets)
started = time.monotonic()
result = solve(vc, SolverConfig(timeout=1800.0))
elapsed = time.monotonic() - started
print(f"{'compiled' if kernels.COMPILED else 'pure':>8}: "
      f"{result.verdict} in {elapsed:6.1f}s  "
      f"pivots={result.stats.pivots} splits={result.stats.splits}")
"""


def bench_verify() -> None:
    print()
    print("end-to-end: certified-confidence instance, 196 inputs, 20 relus")
    for pure in (False, True):
        env = dict(os.environ)
        if pure:
            env["RELUCHECK_PURE"] = "1"
        else:
            env.pop("RELUCHECK_PURE", None)
        proc = subprocess.run(
            [sys.executable, "-c", VERIFY_SNIPPET],
            env=env,
            text=True,
            capture_output=True,
        )
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            raise SystemExit(proc.returncode)
        print(proc.stdout, end="")


if __name__ == "__main__":
    if not COMPILED:
        print("note: compiled extension inactive in this process", file=sys.stderr)
    bench_kernels()
    bench_verify()
