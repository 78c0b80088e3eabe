# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled row kernels for the dense exact tableau.

The cells are arbitrary exact Python number objects (gmpy2 mpz/mpq, int
or Fraction); the win over the pure twin comes from C-level list
iteration and the zero-skip test, which dominate on sparse rows.
"""


def row_axpy(list target, list source, factor):
    """target += factor * source, elementwise, skipping zero source cells."""
    cdef Py_ssize_t i, n = len(source)
    for i in range(n):
        s = source[i]
        if s:
            target[i] = target[i] + factor * s


def row_scale(list row, factor):
    """row *= factor in place, skipping zeros."""
    cdef Py_ssize_t i, n = len(row)
    for i in range(n):
        v = row[i]
        if v:
            row[i] = v * factor


def row_dot(list row, list values, zero):
    """Sum of row[i] * values[i] over nonzero row cells, starting from zero."""
    cdef Py_ssize_t i, n = len(row)
    acc = zero
    for i in range(n):
        v = row[i]
        if v:
            acc = acc + v * values[i]
    return acc


def row_combine(list target, list source, ct, cs):
    """target = ct * target - cs * source, elementwise.

    The fraction-free pivot step: both scalars are integers, so entries
    stay integers and any common content is stripped afterwards."""
    cdef Py_ssize_t i, n = len(source)
    for i in range(n):
        s = source[i]
        t = target[i]
        if s:
            target[i] = ct * t - cs * s
        elif t:
            target[i] = ct * t


def row_idiv(list row, divisor):
    """row //= divisor in place, skipping zeros. Division must be exact."""
    cdef Py_ssize_t i, n = len(row)
    for i in range(n):
        v = row[i]
        if v:
            row[i] = v // divisor


def nonzero_indices(list row):
    cdef Py_ssize_t i, n = len(row)
    out = []
    for i in range(n):
        if row[i]:
            out.append(i)
    return out
