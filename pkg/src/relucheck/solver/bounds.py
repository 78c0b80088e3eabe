"""Interval propagation over the VC's affine definitions.

One forward pass in variable order is a fixpoint because definitions
form a DAG: every definition only references earlier variables. ReLU
post-activations clamp their pre-activation interval; a pre-activation
interval that is entirely nonpositive (resp. nonnegative) forces the
Inactive (resp. Active) phase, which the search then asserts instead of
splitting.

Intervals are closed and optional on either side (None = unbounded).
They are a sound relaxation only, used to prune: verdicts always rest on
the exact simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from ..compiler import VC

INACTIVE = "inactive"
ACTIVE = "active"

Bound = Fraction | None


@dataclass
class IntervalMap:
    lo: dict[int, Bound] = field(default_factory=dict)
    hi: dict[int, Bound] = field(default_factory=dict)
    forced: dict[int, str] = field(default_factory=dict)  # relu index -> phase
    empty: bool = False  # some interval became contradictory

    def interval(self, var: int) -> tuple[Bound, Bound]:
        return self.lo.get(var), self.hi.get(var)


def _sum_interval(
    terms, const: Fraction, lo: Mapping[int, Bound], hi: Mapping[int, Bound]
) -> tuple[Bound, Bound]:
    acc_lo: Bound = const
    acc_hi: Bound = const
    for c, v in terms:
        vlo = lo.get(v)
        vhi = hi.get(v)
        if c > 0:
            src_lo, src_hi = vlo, vhi
        else:
            src_lo, src_hi = vhi, vlo
        if acc_lo is not None:
            acc_lo = None if src_lo is None else acc_lo + c * src_lo
        if acc_hi is not None:
            acc_hi = None if src_hi is None else acc_hi + c * src_hi
        if acc_lo is None and acc_hi is None:
            return None, None
    return acc_lo, acc_hi


def propagate_bounds(vc: VC, phases: Mapping[int, str] | None = None) -> IntervalMap:
    """Forward interval pass honoring any decided ReLU phases.

    Input boxes seed the pass; every affine definition gets the interval
    of its right-hand side; ReLU posts get the clamped interval under
    the given (or forced) phase. Returns intervals for every variable
    that gained at least one finite side, plus the forced phases."""
    phases = dict(phases or {})
    out = IntervalMap()
    zero = Fraction(0)
    for var, (lo, hi) in vc.input_boxes.items():
        out.lo[var] = lo
        out.hi[var] = hi
        if lo is not None and hi is not None and lo > hi:
            out.empty = True

    relu_of_pre = {r.pre: i for i, r in enumerate(vc.relus)}
    post_of_pre = {r.pre: r.post for r in vc.relus}

    for d in vc.definitions:
        dlo, dhi = _sum_interval(d.terms, d.const, out.lo, out.hi)
        out.lo[d.var] = dlo
        out.hi[d.var] = dhi
        if dlo is not None and dhi is not None and dlo > dhi:
            out.empty = True
        idx = relu_of_pre.get(d.var)
        if idx is None:
            continue
        phase = phases.get(idx)
        if phase is None:
            if dhi is not None and dhi <= zero:
                phase = INACTIVE
                out.forced[idx] = phase
            elif dlo is not None and dlo >= zero:
                phase = ACTIVE
                out.forced[idx] = phase
        post = post_of_pre[d.var]
        if phase == INACTIVE:
            out.lo[post] = zero
            out.hi[post] = zero
            # the phase also caps the pre-activation
            if dhi is None or dhi > zero:
                out.hi[d.var] = zero
            if dlo is not None and dlo > zero:
                out.empty = True
        elif phase == ACTIVE:
            out.lo[post] = dlo if dlo is not None and dlo > zero else zero
            out.hi[post] = dhi
            if dlo is None or dlo < zero:
                out.lo[d.var] = zero
            if dhi is not None and dhi < zero:
                out.empty = True
        else:
            out.lo[post] = dlo if dlo is not None and dlo > zero else zero
            out.hi[post] = None if dhi is None else (dhi if dhi > zero else zero)
    return out
