"""Pure-Python twins of the compiled row kernels.

Same semantics as _rowops.pyx; selected by relucheck.kernels when the
extension is unavailable or RELUCHECK_PURE=1.
"""

from __future__ import annotations


def row_axpy(target: list, source: list, factor) -> None:
    """target += factor * source, elementwise, skipping zero source cells."""
    for i, s in enumerate(source):
        if s:
            target[i] = target[i] + factor * s


def row_scale(row: list, factor) -> None:
    """row *= factor in place, skipping zeros."""
    for i, v in enumerate(row):
        if v:
            row[i] = v * factor


def row_dot(row: list, values: list, zero):
    """Sum of row[i] * values[i] over nonzero row cells, starting from zero."""
    acc = zero
    for i, v in enumerate(row):
        if v:
            acc = acc + v * values[i]
    return acc


def row_combine(target: list, source: list, ct, cs) -> None:
    """target = ct * target - cs * source, elementwise.

    The fraction-free pivot step: both scalars are integers, so entries
    stay integers and any common content is stripped afterwards."""
    for i, s in enumerate(source):
        t = target[i]
        if s:
            target[i] = ct * t - cs * s
        elif t:
            target[i] = ct * t


def row_idiv(row: list, divisor) -> None:
    """row //= divisor in place, skipping zeros. Division must be exact."""
    for i, v in enumerate(row):
        if v:
            row[i] = v // divisor


def nonzero_indices(row: list) -> list:
    return [i for i, v in enumerate(row) if v]
