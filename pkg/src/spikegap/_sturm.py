"""Sturm-sequence eigenvalue counting and bisection for symmetric tridiagonals.

The count of eigenvalues below x equals the number of negative pivots in the
LDL^T factorization of T - xI, computed by the standard scalar recurrence
q_k = (d_k - x) - e_k^2 / q_{k-1} with a LAPACK-style pivot floor.  float64
counts are JIT-compiled with numba when available; an mpmath twin provides
arbitrary-precision counting for gaps below float64 resolution.
"""

import numpy as np
from mpmath import mp

try:
    from numba import njit as _njit

    def _jit(f):
        return _njit(cache=True)(f)

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    def _jit(f):
        return f

    HAVE_NUMBA = False

_SAFMIN = float(np.finfo(np.float64).tiny)


def pivot_floor(e2):
    """LAPACK-style pivmin: smallest admissible pivot magnitude."""
    emax = float(np.max(e2)) if len(e2) else 1.0
    return _SAFMIN * max(1.0, emax)


@_jit
def count_below_f64(d, e2, x, pivmin):
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0.0:
        count += 1
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


@_jit
def bisect_index_f64(d, e2, index, lo, hi, tol, pivmin):
    """Shrink [lo, hi] around the (index+1)-th smallest eigenvalue."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # float64 resolution floor
        if count_below_f64(d, e2, mid, pivmin) >= index + 1:
            hi = mid
        else:
            lo = mid
    return lo, hi


def count_below_mp(d, e2, x, pivmin):
    """mpmath twin of count_below_f64; d, e2 are lists of mpf."""
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def bisect_index_mp(d, e2, index, lo, hi, tol, pivmin):
    two = mp.mpf(2)
    while hi - lo > tol:
        mid = (lo + hi) / two
        if count_below_mp(d, e2, mid, pivmin) >= index + 1:
            hi = mid
        else:
            lo = mid
    return lo, hi
