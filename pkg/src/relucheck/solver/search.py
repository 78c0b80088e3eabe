"""Complete search over the VC: booleans first, then ReLU phases.

Strategy (fixed, so runs are reproducible):

  1. Unit-propagate the CNF skeleton; decide the first unassigned
     boolean variable, trying true before false, with chronological
     backtracking and no clause learning.
  2. Atoms assigned true are asserted into the simplex as bounds; the
     tableau is re-checked after every batch of assertions.
  3. Once the booleans are complete and the tableau feasible, the lowest
     numbered relu whose exact semantics the current assignment violates
     is split, trying the phase the assignment already leans toward
     first. An assignment exact on every relu is a model outright, with
     any leftover phases undecided. Interval propagation runs after
     every phase fix and may force further phases; forced phases are
     asserted without branching.

Every decision or split strictly shrinks (unassigned booleans +
undecided relus), so the search terminates. A satisfying leaf yields an
exact rational model (the infinitesimal for strict bounds is
instantiated as half the tightest remaining slack); exhausting the tree
proves the VC unsatisfiable, i.e. the property holds.

With threads > 1 the top of the phase tree is split into disjoint
assumption sets solved in separate processes. The first falsifying
branch wins and the rest are cancelled, so which counterexample comes
back may vary between runs (the verdict never does); single-threaded
runs are fully deterministic.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from ..compiler import (
    EQ,
    LinearConstraint,
    LT,
    VC,
    VarMap,
    eval_skeleton,
    satisfies_constraint,
    satisfies_relu,
)
from .bounds import ACTIVE, INACTIVE, propagate_bounds
from .delta import DeltaRational
from .simplex import (
    dr,
    RAT,
    ResourceBudgetExceeded,
    Tableau,
    ZERO,
)
from .tseitin import to_cnf

VERIFIED = "verified"
FALSIFIED = "falsified"
UNKNOWN = "unknown"

UNDECIDED = "undecided"


@dataclass
class SolverConfig:
    timeout: float | None = 1800.0
    threads: int = 1
    seed: int = 0  # reserved; the pinned strategy takes no random choices


@dataclass
class SolverStats:
    splits: int = 0
    pivots: int = 0
    propagations: int = 0
    time_ms: int = 0


@dataclass
class SolverResult:
    verdict: str
    model: dict[int, Fraction] | None
    stats: SolverStats
    reason: str | None = None  # for unknown verdicts: "timeout" or "resource"
    note: str | None = None


class _Engine:
    def __init__(self, vc: VC, config: SolverConfig, assumptions: Sequence[tuple[int, str]] = ()):
        self.vc = vc
        self.config = config
        self.deadline = None if config.timeout is None else time.monotonic() + config.timeout
        self.stats = SolverStats()

        n0 = vc.num_vars
        self.dvar = {}
        nxt = n0
        for i, _ in enumerate(vc.relus):
            self.dvar[i] = nxt
            nxt += 1

        # atoms: single-variable ones become direct bounds, the rest share
        # slack variables keyed by their scale-normalized term vector
        self.slack_of: dict[tuple, int] = {}
        slack_rows: list[tuple[int, tuple]] = []
        self.atom_plan: list[list[tuple[str, int, DeltaRational]]] = []
        for c in vc.atoms:
            if len(c.terms) == 1:
                coef, v = c.terms[0]
                self.atom_plan.append(_direct_plan(v, coef, c))
            else:
                scale = c.terms[0][0]
                key = tuple((co / scale, v) for co, v in c.terms)
                s = self.slack_of.get(key)
                if s is None:
                    s = nxt
                    nxt += 1
                    self.slack_of[key] = s
                    slack_rows.append((s, key))
                self.atom_plan.append(_direct_plan(s, scale, c, scaled=True))

        self.t = Tableau(nxt)
        self.t.on_pivot = self._tick
        for d in vc.definitions:
            self.t.add_row(d.var, [(RAT(co), v) for co, v in d.terms], RAT(d.const))
        for i, r in enumerate(vc.relus):
            self.t.add_row(self.dvar[i], [(RAT(1), r.post), (RAT(-1), r.pre)], ZERO)
        for s, key in slack_rows:
            self.t.add_row(s, [(RAT(co), v) for co, v in key], ZERO)

        self.phase: list[str] = [UNDECIDED] * len(vc.relus)
        self.phase_trail: list[tuple[int, str]] = []

        cnf = to_cnf(vc.skeleton, len(vc.atoms))
        self.clauses = cnf.clauses
        self.atom_var = cnf.atom_var
        self.var_atom = cnf.var_atom
        self.nbools = cnf.num_vars
        self.assign: list[bool | None] = [None] * (self.nbools + 1)
        self.bool_trail: list[int] = []
        occurring = sorted({abs(l) for cl in self.clauses for l in cl})
        self.decision_vars = occurring
        self.assumptions = tuple(assumptions)
        self._failed = False

        # permanent facts: input boxes and the relu relaxation x >= max(0, y)
        for var, (lo, hi) in vc.input_boxes.items():
            if lo is not None and self._conflict(self.t.assert_lower(var, dr(lo), ("box", var, "lo"))):
                return
            if hi is not None and self._conflict(self.t.assert_upper(var, dr(hi), ("box", var, "hi"))):
                return
        for i, r in enumerate(vc.relus):
            if self._conflict(self.t.assert_lower(r.post, dr(0), ("relu", i, "nonneg"))):
                return
            if self._conflict(self.t.assert_lower(self.dvar[i], dr(0), ("relu", i, "slope"))):
                return
        self._warm_start()
        for idx, ph in self.assumptions:
            if not self._fix_phase(idx, ph):
                self._failed = True
                return

    def _conflict(self, c) -> bool:
        if c is not None:
            self._failed = True
            return True
        return False

    def _warm_start(self) -> None:
        """Seed beta with a forward evaluation at the box centre.

        A concrete trace satisfies every definition row and the ReLU
        relaxation exactly, so the first simplex check starts from a
        network-consistent point and only walks to repair property atoms.
        Starting from beta = 0 instead violates every bias row at once,
        and on wide layers the resulting pivot chains blow up the exact
        arithmetic."""
        t = self.t
        zero = DeltaRational(ZERO, ZERO)
        for var, (lo, hi) in self.vc.input_boxes.items():
            if lo is not None and hi is not None:
                val = (lo + hi) / 2
            else:
                val = lo if lo is not None else hi
            if val:
                t.set_nonbasic(var, dr(val))
        for r in self.vc.relus:
            pre = t.beta[r.pre]
            val = pre if zero < pre else zero
            if val != t.beta[r.post]:
                t.set_nonbasic(r.post, val)

    def _tick(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise ResourceBudgetExceeded("timeout")

    # -- trail management -------------------------------------------------

    def _mark(self) -> tuple[int, int, int]:
        return (self.t.mark(), len(self.bool_trail), len(self.phase_trail))

    def _pop(self, mark: tuple[int, int, int]) -> None:
        tmark, bmark, pmark = mark
        self.t.pop_to(tmark)
        while len(self.bool_trail) > bmark:
            self.assign[self.bool_trail.pop()] = None
        while len(self.phase_trail) > pmark:
            idx, old = self.phase_trail.pop()
            self.phase[idx] = old

    # -- boolean layer ----------------------------------------------------

    def _set(self, var: int, value: bool) -> bool:
        """Assign a boolean; asserting the theory atom if it turns true."""
        self.assign[var] = value
        self.bool_trail.append(var)
        if value and var in self.var_atom:
            for side, v, bound in self.atom_plan[self.var_atom[var]]:
                if side == "lo":
                    c = self.t.assert_lower(v, bound, ("atom", self.var_atom[var]))
                else:
                    c = self.t.assert_upper(v, bound, ("atom", self.var_atom[var]))
                if c is not None:
                    return False
        return True

    def _bool_fixpoint(self) -> bool:
        changed = True
        while changed:
            changed = False
            for clause in self.clauses:
                sat = False
                unassigned = None
                count = 0
                for lit in clause:
                    val = self.assign[abs(lit)]
                    if val is None:
                        count += 1
                        unassigned = lit
                    elif val == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if count == 0:
                    return False
                if count == 1:
                    self.stats.propagations += 1
                    if not self._set(abs(unassigned), unassigned > 0):
                        return False
                    changed = True
        return True

    # -- theory layer -------------------------------------------------------

    def _fix_phase(self, idx: int, phase: str) -> bool:
        r = self.vc.relus[idx]
        self.phase_trail.append((idx, self.phase[idx]))
        self.phase[idx] = phase
        origin = ("phase", idx, phase)
        if phase == INACTIVE:
            if self.t.assert_upper(r.pre, dr(0), origin) is not None:
                return False
            if self.t.assert_upper(r.post, dr(0), origin) is not None:
                return False
        else:
            if self.t.assert_lower(r.pre, dr(0), origin) is not None:
                return False
            if self.t.assert_upper(self.dvar[idx], dr(0), origin) is not None:
                return False
        return True

    def _theory_refresh(self) -> bool:
        """Interval pass + derived bounds + forced phases, then a simplex
        check. Returns False when the current branch is contradictory."""
        self._tick()
        while True:
            phases = {i: p for i, p in enumerate(self.phase) if p != UNDECIDED}
            im = propagate_bounds(self.vc, phases)
            if im.empty:
                return False
            before = len(self.t.trail)
            for var, lo in im.lo.items():
                if lo is not None:
                    if self.t.assert_lower(var, dr(lo), ("itv", var, "lo")) is not None:
                        return False
            for var, hi in im.hi.items():
                if hi is not None:
                    if self.t.assert_upper(var, dr(hi), ("itv", var, "hi")) is not None:
                        return False
            self.stats.propagations += len(self.t.trail) - before
            fresh = [(i, p) for i, p in im.forced.items() if self.phase[i] == UNDECIDED]
            if not fresh:
                break
            for idx, ph in sorted(fresh):
                self.stats.propagations += 1
                if not self._fix_phase(idx, ph):
                    return False
        conflict = self.t.check()
        self.stats.pivots = self.t.pivots
        return conflict is None

    # -- search -----------------------------------------------------------

    def _search(self) -> bool:
        self._tick()
        if not self._bool_fixpoint():
            return False
        if not self._theory_refresh():
            return False
        for var in self.decision_vars:
            if self.assign[var] is None:
                for value in (True, False):
                    mark = self._mark()
                    ok = self._set(var, value)
                    if ok and self._search():
                        return True
                    self._pop(mark)
                return False
        return self._split()

    def _split(self) -> bool:
        # split the first relu the current assignment gets wrong; if the
        # assignment is exact on every relu it is already a model and the
        # remaining phases need no deciding
        target = -1
        lean = INACTIVE
        model = None
        for i, p in enumerate(self.phase):
            if p != UNDECIDED:
                continue
            r = self.vc.relus[i]
            if model is None:
                # concretized, so the delta choice cannot flip a phase later
                model = self.t.model()
            pre = model[r.pre]
            post = model[r.post]
            if post != max(pre, 0):
                target = i
                lean = ACTIVE if pre > 0 else INACTIVE
                break
        if target == -1:
            return True
        self.stats.splits += 1
        second = ACTIVE if lean == INACTIVE else INACTIVE
        for phase in (lean, second):
            mark = self._mark()
            if self._fix_phase(target, phase) and self._theory_refresh():
                if self._split():
                    return True
            self._pop(mark)
        return False

    # -- results ------------------------------------------------------------

    def run(self) -> SolverResult:
        started = time.monotonic()
        try:
            if self._failed:
                return self._done(VERIFIED, None, started)
            if any(len(cl) == 0 for cl in self.clauses):
                return self._done(VERIFIED, None, started)
            if self._search():
                model = {v: val for v, val in self.t.model().items() if v < self.vc.num_vars}
                self._validate(model)
                return self._done(FALSIFIED, model, started)
            return self._done(VERIFIED, None, started)
        except ResourceBudgetExceeded as exc:
            out = self._done(UNKNOWN, None, started)
            out.reason = str(exc) or "timeout"
            return out
        except (MemoryError, RecursionError):
            out = self._done(UNKNOWN, None, started)
            out.reason = "resource"
            return out

    def _done(self, verdict: str, model, started: float) -> SolverResult:
        self.stats.pivots = self.t.pivots
        self.stats.time_ms = int((time.monotonic() - started) * 1000)
        return SolverResult(verdict=verdict, model=model, stats=self.stats)

    def _validate(self, model: Mapping[int, Fraction]) -> None:
        vc = self.vc
        for c in vc.hard_constraints:
            if not satisfies_constraint(c, model):
                raise RuntimeError("internal error: model violates a network constraint")
        for r in vc.relus:
            if not satisfies_relu(r, model):
                raise RuntimeError("internal error: model violates a relu")
        truths = [satisfies_constraint(a, model) for a in vc.atoms]
        if not eval_skeleton(vc.skeleton, truths):
            raise RuntimeError("internal error: model does not satisfy the skeleton")


def _direct_plan(
    var: int, scale: Fraction, c: LinearConstraint, scaled: bool = False
) -> list[tuple[str, int, DeltaRational]]:
    """Bound assertions implementing atom c via variable var.

    For single-term atoms var is the variable itself and scale its
    coefficient; for slack-backed atoms the slack equals terms/scale, so
    the bound is rhs/scale with the direction flipped when scale < 0."""
    bound = Fraction(c.rhs) / Fraction(scale)
    flip = scale < 0
    if c.op == EQ:
        return [("lo", var, dr(bound)), ("hi", var, dr(bound))]
    strict = c.op == LT
    upper = not flip
    if upper:
        return [("hi", var, dr(bound, -1 if strict else 0))]
    return [("lo", var, dr(bound, 1 if strict else 0))]


def extract_counterexample(
    model: Mapping[int, Fraction], varmap: VarMap
) -> list[dict[str, object]]:
    """Concrete per-assignment input/output vectors from a model."""
    out = []
    for port in varmap.ports:
        out.append(
            {
                "network": port.network,
                "target": port.target,
                "source": port.source,
                "input": [model[v] for v in port.inputs],
                "output": [model[v] for v in port.outputs],
            }
        )
    return out


def _solve_worker(args) -> SolverResult:
    vc, config, assumptions = args
    return _Engine(vc, config, assumptions).run()


def _parallel_solve(vc: VC, config: SolverConfig) -> SolverResult:
    import multiprocessing as mp

    im = propagate_bounds(vc)
    undecided = [i for i in range(len(vc.relus)) if i not in im.forced]
    k = 0
    while (1 << k) < config.threads and k < len(undecided) and k < 8:
        k += 1
    chosen = undecided[:k]
    if not chosen:
        return _Engine(vc, config).run()
    jobs = []
    for mask in range(1 << len(chosen)):
        assumptions = tuple(
            (r, ACTIVE if (mask >> pos) & 1 else INACTIVE) for pos, r in enumerate(chosen)
        )
        jobs.append((vc, config, assumptions))

    started = time.monotonic()
    deadline = None if config.timeout is None else started + config.timeout + 5.0
    results: list[SolverResult] = []
    with mp.Pool(processes=config.threads) as pool:
        pending = [pool.apply_async(_solve_worker, (job,)) for job in jobs]
        while pending:
            still = []
            for handle in pending:
                if handle.ready():
                    res = handle.get()
                    if res.verdict == FALSIFIED:
                        pool.terminate()
                        res.stats.time_ms = int((time.monotonic() - started) * 1000)
                        res.note = (
                            "parallel run: the counterexample depends on completion order"
                        )
                        return res
                    results.append(res)
                else:
                    still.append(handle)
            pending = still
            if pending and deadline is not None and time.monotonic() > deadline:
                pool.terminate()
                stats = SolverStats(time_ms=int((time.monotonic() - started) * 1000))
                return SolverResult(
                    UNKNOWN,
                    None,
                    stats,
                    reason="timeout",
                    note="parallel run: aggregate statistics depend on scheduling",
                )
            if pending:
                time.sleep(0.01)
    stats = SolverStats(
        splits=sum(r.stats.splits for r in results),
        pivots=sum(r.stats.pivots for r in results),
        propagations=sum(r.stats.propagations for r in results),
        time_ms=int((time.monotonic() - started) * 1000),
    )
    note = "parallel run: aggregate statistics depend on scheduling"
    for r in results:
        if r.verdict == UNKNOWN:
            return SolverResult(UNKNOWN, None, stats, reason=r.reason, note=note)
    return SolverResult(VERIFIED, None, stats, note=note)


def solve(vc: VC, config: SolverConfig | None = None) -> SolverResult:
    """Decide the VC: verified (unsatisfiable), falsified (model found),
    or unknown when the time or memory budget runs out."""
    config = config or SolverConfig()
    limit = 10000 + 4 * (len(vc.relus) + len(vc.atoms))
    if sys.getrecursionlimit() < limit:
        sys.setrecursionlimit(limit)
    if config.threads > 1:
        return _parallel_solve(vc, config)
    return _Engine(vc, config).run()
