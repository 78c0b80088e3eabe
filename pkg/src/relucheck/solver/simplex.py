"""Incremental exact simplex over per-variable bounds.

General-form tableau: every constraint row defines a basic variable as an
affine combination of nonbasic ones, and all facts are bounds on single
variables. Assert/retract of bounds is cheap (a trail restores them on
backtrack; the basis itself never rolls back), which is what the search
loop needs when it flips ReLU phases.

Rows are kept fraction-free: dense lists of exact integers (gmpy2.mpz
when available) in the shape

    form . x + const == 0      with form[basic] == den > 0

and gcd content 1, so the basic variable reads x_b = -(rest + const)/den.
A pivot combines rows integer-to-integer (new = ce*old - co*pivotrow)
and strips the common content afterwards; that keeps entries close to
minors of the original system instead of the compounding ratio towers a
normalized rational tableau produces, which in practice is the
difference between hundred-bit and hundred-thousand-bit entries on wide
networks. The inner loops live in the compiled kernels.

A column index (variable -> rows that may mention it) keeps pivots and
nonbasic updates away from untouched rows, and a set of suspect basic
variables is maintained incrementally so check() never rescans the whole
tableau per pivot. Bounds and the candidate assignment beta are
DeltaRational over plain rationals so strict inequalities shift by an
infinitesimal.

Pivot selection is heuristic first (largest violation leaves, sparsest
eligible column with the shortest entry enters) because Bland's rule
stalls badly on dense instances; after a budget proportional to the
tableau it falls back to Bland's rule (smallest violated basic, smallest
eligible nonbasic), which cannot cycle, so check() always terminates.
Either way a "feasible" answer is only reported after a full
authoritative scan, so the suspect set is an accelerator, never a
soundness assumption.

When certificates are requested, every row carries the multipliers
expressing it over the original defining equalities; an infeasibility
then yields a Farkas certificate over the caller's facts that
verify_certificate can replay with no access to solver state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

try:
    from gmpy2 import gcd as _gcd, lcm as _lcm, mpq as _mpq, mpz as _mpz

    def RAT(x) -> object:
        return _mpq(x)

    INT = _mpz
    HAVE_GMPY = True
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    from math import gcd as _gcd, lcm as _lcm

    RAT = Fraction
    INT = int
    HAVE_GMPY = False

from ..compiler import EQ, LE, LinearConstraint, LT
from ..kernels import nonzero_indices, row_combine, row_idiv
from ..rationals import as_fraction
from .delta import DeltaRational

ZERO = RAT(0)
ONE = RAT(1)
IZERO = INT(0)
IONE = INT(1)


def dr(real, delta=0) -> DeltaRational:
    return DeltaRational(RAT(real), RAT(delta))


DR_ZERO = dr(0)


def _ratio(num, den) -> object:
    """Exact num/den for integer cells."""
    if HAVE_GMPY:
        return _mpq(num, den)
    return Fraction(num, den)


def _content(form: list, const) -> object:
    """gcd of all nonzero cells and the constant; 0 for the zero row."""
    g = -const if const < 0 else const
    for c in form:
        if c:
            g = _gcd(g, c)
            if g == 1:
                return g
    return g


class ResourceBudgetExceeded(Exception):
    """Raised from the pivot hook to abandon a solve (timeout etc.)."""


@dataclass
class Row:
    form: list
    const: object
    combo: dict | None


@dataclass(frozen=True)
class Certificate:
    """Farkas refutation: sum(mult * fact) == (0 <= negative).

    Fact tags are caller-chosen opaque tuples; multipliers are positive
    Fractions except on equality facts, where they are signed.
    """

    entries: tuple[tuple[Fraction, tuple], ...]


@dataclass
class Conflict:
    certificate: Certificate | None = None


@dataclass
class Feasible:
    model: dict[int, Fraction]


@dataclass
class Infeasible:
    certificate: Certificate


class Tableau:
    def __init__(self, nvars: int, certificates: bool = False):
        self.n = nvars
        self.lower: list[DeltaRational | None] = [None] * nvars
        self.upper: list[DeltaRational | None] = [None] * nvars
        self.lo_origin: list[tuple | None] = [None] * nvars
        self.hi_origin: list[tuple | None] = [None] * nvars
        self.beta: list[DeltaRational] = [DR_ZERO] * nvars
        self.rows: dict[int, Row] = {}
        # var -> keys of rows whose form may mention it (superset; stale
        # entries are dropped lazily when a lookup finds a zero)
        self.cols: dict[int, set[int]] = {}
        # basic vars possibly outside their bounds; every beta or bound
        # mutation that can create a violation flags the row here
        self.bad: set[int] = set()
        self.trail: list[tuple] = []
        self.pivots = 0
        self.certificates = certificates
        self.on_pivot: Callable[[], None] | None = None
        # last assignment a successful check() produced; conflicts roll
        # beta back to it so sibling branches do not inherit a half
        # repaired assignment and pay hundreds of pivots to recover
        self._good: list[DeltaRational] | None = None

    # -- rows ---------------------------------------------------------

    def add_row(self, var: int, terms: Iterable[tuple[object, int]], const: object) -> None:
        """Define var = terms . x + const. Must precede all bound asserts.

        References to already-basic variables are substituted away, so row
        forms only ever mention nonbasic variables (plus their own)."""
        if var in self.rows:
            raise ValueError(f"variable {var} defined twice")
        acc = [ZERO] * self.n
        acc[var] = ONE
        aconst = -RAT(const)
        for c, v in terms:
            acc[v] -= RAT(c)
        combo = {var: ONE} if self.certificates else None
        # substitute basic references (their forms are already basic-free)
        for v in list(self.rows):
            f = acc[v]
            if f:
                other = self.rows[v]
                oform = other.form
                fac = _ratio(f, oform[v])
                for j in nonzero_indices(oform):
                    acc[j] -= fac * oform[j]
                aconst -= fac * other.const
                if combo is not None and other.combo:
                    for k, m in other.combo.items():
                        combo[k] = combo.get(k, ZERO) - fac * m
        # clear denominators, strip content
        scale = IONE
        for c in acc:
            if c:
                scale = _lcm(scale, c.denominator)
        scale = _lcm(scale, aconst.denominator)
        form = [INT(c * scale) if c else IZERO for c in acc]
        rconst = INT(aconst * scale)
        g = _content(form, rconst)
        if g > 1:
            row_idiv(form, g)
            rconst = rconst // g
            scale_q = _ratio(scale, g)
        else:
            scale_q = scale
        if combo is not None:
            combo = {k: m * scale_q for k, m in combo.items() if m}
        self.rows[var] = Row(form, rconst, combo)
        for j in nonzero_indices(form):
            if j != var:
                self.cols.setdefault(j, set()).add(var)
        self.beta[var] = self._row_value(var)

    def _row_value(self, var: int) -> DeltaRational:
        row = self.rows[var]
        form = row.form
        real = RAT(row.const)
        delta = ZERO
        beta = self.beta
        for j in nonzero_indices(form):
            if j != var:
                c = form[j]
                b = beta[j]
                real += c * b.real
                delta += c * b.delta
        den = form[var]
        return DeltaRational(-real / den, -delta / den)

    # -- bounds with trail ---------------------------------------------

    def mark(self) -> int:
        return len(self.trail)

    def pop_to(self, mark: int) -> None:
        while len(self.trail) > mark:
            side, var, value, origin = self.trail.pop()
            if side == "lo":
                self.lower[var] = value
                self.lo_origin[var] = origin
            else:
                self.upper[var] = value
                self.hi_origin[var] = origin

    def assert_lower(self, var: int, value: DeltaRational, origin: tuple) -> Conflict | None:
        cur = self.lower[var]
        if cur is not None and value <= cur:
            return None
        up = self.upper[var]
        if up is not None and up < value:
            return self._bounds_conflict(var, origin, self.hi_origin[var], value, up)
        self.trail.append(("lo", var, cur, self.lo_origin[var]))
        self.lower[var] = value
        self.lo_origin[var] = origin
        if self.beta[var] < value:
            if var in self.rows:
                self.bad.add(var)
            else:
                self._update(var, value)
        return None

    def assert_upper(self, var: int, value: DeltaRational, origin: tuple) -> Conflict | None:
        cur = self.upper[var]
        if cur is not None and cur <= value:
            return None
        lo = self.lower[var]
        if lo is not None and value < lo:
            return self._bounds_conflict(var, self.lo_origin[var], origin, lo, value)
        self.trail.append(("hi", var, cur, self.hi_origin[var]))
        self.upper[var] = value
        self.hi_origin[var] = origin
        if value < self.beta[var]:
            if var in self.rows:
                self.bad.add(var)
            else:
                self._update(var, value)
        return None

    def _bounds_conflict(self, var, lo_origin, hi_origin, lo, hi) -> Conflict:
        cert = None
        if self.certificates:
            cert = Certificate(
                entries=(
                    (Fraction(1), lo_origin),
                    (Fraction(1), hi_origin),
                )
            )
        return Conflict(certificate=cert)

    def set_nonbasic(self, var: int, value: DeltaRational) -> None:
        """Move a nonbasic variable's assignment, clamped into its bounds,
        propagating the shift through every dependent row.

        Feasibility bookkeeping stays intact, so callers may seed beta at
        any point they like (the search warm-starts on a forward network
        evaluation, which satisfies every definition row by construction)."""
        if var in self.rows:
            raise ValueError(f"variable {var} is basic")
        lo = self.lower[var]
        if lo is not None and value < lo:
            value = lo
        up = self.upper[var]
        if up is not None and up < value:
            value = up
        self._update(var, value)

    def _update(self, var: int, value: DeltaRational) -> None:
        theta = value - self.beta[var]
        self.beta[var] = value
        if not theta.real and not theta.delta:
            return
        keys = self.cols.get(var)
        if not keys:
            return
        rows = self.rows
        beta = self.beta
        stale = None
        for bvar in keys:
            row = rows.get(bvar)
            c = row.form[var] if row is not None else None
            if not c:
                if stale is None:
                    stale = []
                stale.append(bvar)
                continue
            b = beta[bvar] + theta.scale(_ratio(-c, row.form[bvar]))
            beta[bvar] = b
            lo = self.lower[bvar]
            if lo is not None and b < lo:
                self.bad.add(bvar)
            else:
                up = self.upper[bvar]
                if up is not None and up < b:
                    self.bad.add(bvar)
        if stale:
            keys.difference_update(stale)

    # -- the simplex loop ------------------------------------------------

    def check(self) -> Conflict | None:
        """Restore feasibility or report a conflict. None means feasible:
        beta satisfies every row and every bound."""
        budget = 256 + 4 * len(self.rows)
        while True:
            bland = budget <= 0
            bvar = -1
            low = False
            if not bland:
                # largest violation among the suspects, ties to the
                # smallest index; entries no longer violated drop out
                best = None
                drop = None
                for v in self.bad:
                    b = self.beta[v]
                    lo = self.lower[v]
                    if lo is not None and b < lo:
                        gap, isl = lo - b, True
                    else:
                        up = self.upper[v]
                        if up is not None and up < b:
                            gap, isl = b - up, False
                        else:
                            if drop is None:
                                drop = []
                            drop.append(v)
                            continue
                    if best is None or best < gap or (gap == best and v < bvar):
                        best = gap
                        bvar, low = v, isl
                if drop:
                    self.bad.difference_update(drop)
            if bvar == -1:
                # authoritative scan: sole gate for "feasible", and the
                # selector while on Bland's rule
                for v in self.rows:
                    b = self.beta[v]
                    lo = self.lower[v]
                    if lo is not None and b < lo:
                        if bvar == -1 or v < bvar:
                            bvar, low = v, True
                        continue
                    up = self.upper[v]
                    if up is not None and up < b:
                        if bvar == -1 or v < bvar:
                            bvar, low = v, False
                if bvar == -1:
                    self.bad.clear()
                    self._good = list(self.beta)
                    return None
            row = self.rows[bvar]
            form = row.form
            target = self.lower[bvar] if low else self.upper[bvar]
            evar = -1
            # the row's own coefficient is positive, so x_bvar moves
            # against form[j]: growing x_bvar needs form[j] * x_j to drop
            if bland:
                for j, c in enumerate(form):
                    if not c or j == bvar:
                        continue
                    if (c < 0) == low:
                        # need x_j to grow
                        up_j = self.upper[j]
                        if up_j is None or self.beta[j] < up_j:
                            evar = j
                            break
                    else:
                        lo_j = self.lower[j]
                        if lo_j is None or lo_j < self.beta[j]:
                            evar = j
                            break
            else:
                # sparsest eligible column limits work per pivot; among
                # equals the shortest coefficient limits entry growth
                width = -1
                bits = 0
                for j in nonzero_indices(form):
                    if j == bvar:
                        continue
                    c = form[j]
                    if (c < 0) == low:
                        up_j = self.upper[j]
                        if up_j is not None and not (self.beta[j] < up_j):
                            continue
                    else:
                        lo_j = self.lower[j]
                        if lo_j is not None and not (lo_j < self.beta[j]):
                            continue
                    w = len(self.cols.get(j, ()))
                    if evar == -1 or w < width:
                        evar = j
                        width = w
                        bits = c.bit_length()
                    elif w == width:
                        nb = c.bit_length()
                        if nb < bits:
                            evar = j
                            bits = nb
            if evar == -1:
                conflict = Conflict(certificate=self._row_conflict(bvar, low))
                self._rewind_assignment()
                return conflict
            self._pivot_and_update(bvar, target, evar)
            self.pivots += 1
            budget -= 1
            if self.on_pivot is not None and self.pivots % 64 == 0:
                self.on_pivot()

    def _rewind_assignment(self) -> None:
        """Drop the half-repaired assignment a conflict leaves behind.

        Nonbasic variables return to the last feasible assignment (clamped
        into the current bounds, which may since have tightened); basics
        are recomputed from their rows, and the suspect set is rebuilt.
        One pass over the tableau, roughly the price of a pivot."""
        snap = self._good
        if snap is None:
            return
        beta = self.beta
        rows = self.rows
        for v in range(self.n):
            if v not in rows:
                val = snap[v]
                lo = self.lower[v]
                if lo is not None and val < lo:
                    val = lo
                up = self.upper[v]
                if up is not None and up < val:
                    val = up
                beta[v] = val
        bad = set()
        for b in rows:
            val = self._row_value(b)
            beta[b] = val
            lo = self.lower[b]
            if lo is not None and val < lo:
                bad.add(b)
            else:
                up = self.upper[b]
                if up is not None and up < val:
                    bad.add(b)
        self.bad = bad

    def _pivot_and_update(self, bvar: int, target: DeltaRational, evar: int) -> None:
        rows = self.rows
        beta = self.beta
        cols = self.cols
        row = rows.pop(bvar)
        form = row.form
        den = form[bvar]
        ce = form[evar]
        theta = (target - beta[bvar]).scale(_ratio(den, -ce))
        beta[bvar] = target
        self.bad.discard(bvar)
        b = beta[evar] + theta
        beta[evar] = b
        lo = self.lower[evar]
        if lo is not None and b < lo:
            self.bad.add(evar)
        else:
            up = self.upper[evar]
            if up is not None and up < b:
                self.bad.add(evar)
        keys = cols.get(evar)
        affected = []
        if keys:
            for ovar in keys:
                orow = rows.get(ovar)
                if orow is None:
                    continue
                c = orow.form[evar]
                if c:
                    affected.append((ovar, orow, c))
        for ovar, orow, c in affected:
            b = beta[ovar] + theta.scale(_ratio(-c, orow.form[ovar]))
            beta[ovar] = b
            lo = self.lower[ovar]
            if lo is not None and b < lo:
                self.bad.add(ovar)
            else:
                up = self.upper[ovar]
                if up is not None and up < b:
                    self.bad.add(ovar)
        if ce < 0:
            # the new basic coefficient must come out positive
            for j in nonzero_indices(form):
                form[j] = -form[j]
            row.const = -row.const
            if row.combo is not None:
                row.combo = {k: -m for k, m in row.combo.items()}
            ce = -ce
        nz = nonzero_indices(form)
        # the pivot row changes key from bvar to evar
        for j in nz:
            s = cols.get(j)
            if s is not None:
                s.discard(bvar)
            if j != evar:
                if s is None:
                    s = cols.setdefault(j, set())
                s.add(evar)
        for ovar, orow, f in affected:
            # new = ce*old - f*pivotrow zeroes old[evar]; the pivot row
            # never mentions ovar, so old's basic cell scales by ce > 0
            # and stays positive
            row_combine(orow.form, form, ce, f)
            orow.const = ce * orow.const - f * row.const
            if orow.combo is not None:
                combo = {k: ce * m for k, m in orow.combo.items()}
                if row.combo:
                    for k, m in row.combo.items():
                        combo[k] = combo.get(k, ZERO) - f * m
                orow.combo = combo
            g = _content(orow.form, orow.const)
            if g > 1:
                row_idiv(orow.form, g)
                orow.const = orow.const // g
                if orow.combo is not None:
                    orow.combo = {k: m / g for k, m in orow.combo.items() if m}
            for j in nz:
                if j != evar and j != ovar:
                    cols.setdefault(j, set()).add(ovar)
        if keys:
            # every other row's evar coefficient was just eliminated
            keys.clear()
        rows[evar] = row

    def _row_conflict(self, bvar: int, low: bool) -> Certificate | None:
        if not self.certificates:
            return None
        row = self.rows[bvar]
        den = as_fraction(int(row.form[bvar]))
        entries: list[tuple[Fraction, tuple]] = []
        if low:
            entries.append((Fraction(1), self.lo_origin[bvar]))
        else:
            entries.append((Fraction(1), self.hi_origin[bvar]))
        for j, c in enumerate(row.form):
            if not c or j == bvar:
                continue
            a = Fraction(int(-c)) / den  # d x_bvar / d x_j
            if low:
                # wanted x_bvar to grow; every mover is pinned
                if a > 0:
                    entries.append((a, self.hi_origin[j]))
                else:
                    entries.append((-a, self.lo_origin[j]))
            else:
                if a > 0:
                    entries.append((a, self.lo_origin[j]))
                else:
                    entries.append((-a, self.hi_origin[j]))
        sign = 1 if low else -1
        for k, m in (row.combo or {}).items():
            if m:
                entries.append((sign * as_fraction(m) / den, ("def", k)))
        return Certificate(entries=tuple(entries))

    # -- models ----------------------------------------------------------

    def smallest_delta(self) -> Fraction:
        """Half the tightest slack a strict bound leaves; 1 if none bind."""
        best: Fraction | None = None
        for v in range(self.n):
            b = self.beta[v]
            lo = self.lower[v]
            if lo is not None and lo.delta > b.delta:
                cand = as_fraction(b.real - lo.real) / as_fraction(lo.delta - b.delta)
                if best is None or cand < best:
                    best = cand
            up = self.upper[v]
            if up is not None and b.delta > up.delta:
                cand = as_fraction(up.real - b.real) / as_fraction(b.delta - up.delta)
                if best is None or cand < best:
                    best = cand
        if best is None:
            return Fraction(1)
        return best / 2

    def model(self) -> dict[int, Fraction]:
        eps = self.smallest_delta()
        return {v: self.beta[v].concretize(eps) for v in range(self.n)}


# -- one-shot feasibility with certificates -------------------------------


def _cert_mult_ok(fact: tuple, mult: Fraction) -> bool:
    if fact[0] == "def":
        return mult != 0
    return mult > 0


def _fact_form(
    fact: tuple,
    constraints: Sequence[LinearConstraint],
    var_bounds: Mapping[int, tuple[Fraction | None, Fraction | None]],
    nvars: int,
) -> tuple[dict[int, Fraction], DeltaRational]:
    """Resolve a fact tag to (linear form, rhs) with form . x <= rhs."""
    kind = fact[0]
    if kind == "cons_up":
        i = fact[1]
        return {nvars + i: Fraction(1)}, DeltaRational(
            Fraction(constraints[i].rhs), Fraction(-1 if constraints[i].op == LT else 0)
        )
    if kind == "cons_lo":
        i = fact[1]
        return {nvars + i: Fraction(-1)}, DeltaRational(Fraction(-constraints[i].rhs), Fraction(0))
    if kind == "def":
        s = fact[1]
        i = s - nvars
        form = {s: Fraction(1)}
        for c, v in constraints[i].terms:
            form[v] = form.get(v, Fraction(0)) - Fraction(c)
        return form, DeltaRational(Fraction(0), Fraction(0))
    if kind == "var_lo":
        v = fact[1]
        lo = var_bounds[v][0]
        return {v: Fraction(-1)}, DeltaRational(Fraction(-lo), Fraction(0))
    if kind == "var_hi":
        v = fact[1]
        hi = var_bounds[v][1]
        return {v: Fraction(1)}, DeltaRational(Fraction(hi), Fraction(0))
    raise ValueError(f"unknown certificate fact {fact!r}")


def verify_certificate(
    constraints: Sequence[LinearConstraint],
    var_bounds: Mapping[int, tuple[Fraction | None, Fraction | None]] | None,
    cert: Certificate,
) -> bool:
    """Replay a Farkas certificate using nothing but the original input.

    True when the weighted facts cancel every variable and leave an
    impossible constant comparison (0 <= negative, or 0 < 0)."""
    var_bounds = var_bounds or {}
    nvars = 0
    for c in constraints:
        for _, v in c.terms:
            nvars = max(nvars, v + 1)
    for v in var_bounds:
        nvars = max(nvars, v + 1)
    total: dict[int, Fraction] = {}
    rhs = DeltaRational(Fraction(0), Fraction(0))
    for mult, fact in cert.entries:
        if not _cert_mult_ok(fact, mult):
            return False
        try:
            form, frhs = _fact_form(fact, constraints, var_bounds, nvars)
        except (ValueError, IndexError, KeyError, TypeError):
            return False
        for v, c in form.items():
            total[v] = total.get(v, Fraction(0)) + mult * c
        rhs = rhs + frhs.scale(mult)
    if any(c != 0 for c in total.values()):
        return False
    return rhs < DeltaRational(Fraction(0), Fraction(0))


def simplex_check(
    constraints: Sequence[LinearConstraint],
    var_bounds: Mapping[int, tuple[Fraction | None, Fraction | None]] | None = None,
) -> Feasible | Infeasible:
    """Decide one conjunction of linear constraints plus variable boxes.

    Feasible carries an exact model over the problem variables;
    Infeasible carries a Farkas certificate over the inputs (fact tags
    ("cons_up", i), ("cons_lo", i), ("def", slack), ("var_lo", v),
    ("var_hi", v)) that verify_certificate can check independently."""
    var_bounds = dict(var_bounds or {})
    nvars = 0
    for c in constraints:
        for _, v in c.terms:
            nvars = max(nvars, v + 1)
    for v in var_bounds:
        nvars = max(nvars, v + 1)
    t = Tableau(nvars + len(constraints), certificates=True)
    for i, c in enumerate(constraints):
        t.add_row(nvars + i, [(RAT(co), v) for co, v in c.terms], ZERO)
    conflict = None
    for i, c in enumerate(constraints):
        s = nvars + i
        if c.op == LE:
            conflict = t.assert_upper(s, dr(c.rhs), ("cons_up", i))
        elif c.op == LT:
            conflict = t.assert_upper(s, dr(c.rhs, -1), ("cons_up", i))
        elif c.op == EQ:
            conflict = t.assert_upper(s, dr(c.rhs), ("cons_up", i))
            if conflict is None:
                conflict = t.assert_lower(s, dr(c.rhs), ("cons_lo", i))
        else:
            raise ValueError(f"unsupported constraint op {c.op}")
        if conflict is not None:
            return Infeasible(conflict.certificate)
    for v, (lo, hi) in var_bounds.items():
        if lo is not None:
            conflict = t.assert_lower(v, dr(lo), ("var_lo", v))
            if conflict is not None:
                return Infeasible(conflict.certificate)
        if hi is not None:
            conflict = t.assert_upper(v, dr(hi), ("var_hi", v))
            if conflict is not None:
                return Infeasible(conflict.certificate)
    conflict = t.check()
    if conflict is not None:
        return Infeasible(conflict.certificate)
    full = t.model()
    return Feasible({v: full[v] for v in range(nvars)})
