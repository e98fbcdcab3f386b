"""Compiled right-side line search for ``Lp`` and ``SupSum(Lp)`` spaces.

Mirrors ``sup_inf_array`` row by row and follows the same bisection and
early-exit rules as the numpy path in ``symmetry._line_roots``, which stays
the reference and handles every other descriptor.
"""
from __future__ import annotations

import numba
import numpy as np

from .spaces import INF, TOL_ACTIVE, ZERO_REL, Lp, SupSum, resolve

# relation codes
BJ, PLUS, MINUS, MID = 0, 1, 2, 3
RELATION_CODES = {"bj": BJ, "rho_plus": PLUS, "rho_minus": MINUS, "rho": MID}


def flat_layout(space):
    """``(count, inner_dim, p)`` with ``p = inf`` for the sup norm, or None."""
    space = resolve(space)
    if isinstance(space, SupSum) and isinstance(space.inner, Lp):
        inner = space.inner
        count = space.count
    elif isinstance(space, Lp):
        inner, count = space, 1
    else:
        return None
    p = np.inf if inner.p is INF else float(inner.p)
    return count, inner.dim, p


@numba.njit(cache=True, error_model="numpy", inline="always")
def _block_norm(y, lo, m, p):
    if p == np.inf:
        s = 0.0
        for i in range(lo, lo + m):
            s = max(s, abs(y[i]))
        return s
    if p == 1.0:
        s = 0.0
        for i in range(lo, lo + m):
            s += abs(y[i])
        return s
    top = 0.0
    for i in range(lo, lo + m):
        top = max(top, abs(y[i]))
    if top == 0.0:
        return 0.0
    s = 0.0
    for i in range(lo, lo + m):
        s += (abs(y[i]) / top) ** p
    return top * s ** (1.0 / p)


@numba.njit(cache=True, error_model="numpy", inline="always")
def _block_sup_inf(y, x, lo, m, p, ny):
    """sup/inf of f(x) over Ext J(y) restricted to one block of norm ``ny``."""
    if m == 1:
        v = np.sign(y[lo]) * x[lo]
        return v, v
    if p == np.inf:
        hi_v, lo_v = -np.inf, np.inf
        for i in range(lo, lo + m):
            if abs(y[i]) >= (1 - TOL_ACTIVE) * ny:
                v = np.sign(y[i]) * x[i]
                hi_v = max(hi_v, v)
                lo_v = min(lo_v, v)
        return hi_v, lo_v
    if p == 1.0:
        core, spread = 0.0, 0.0
        for i in range(lo, lo + m):
            if abs(y[i]) <= ZERO_REL * ny:
                spread += abs(x[i])
            else:
                core += np.sign(y[i]) * x[i]
        return core + spread, core - spread
    v = 0.0
    for i in range(lo, lo + m):
        v += np.sign(y[i]) * (abs(y[i]) / ny) ** (p - 1) * x[i]
    return v, v


@numba.njit(cache=True, error_model="numpy", inline="always")
def _derivs(y, x, nx, count, m, p, tol, bn):
    """``(rho'_+(y, x), rho'_-(y, x), tol_zero)``; ``bn`` is scratch space."""
    ny = 0.0
    for k in range(count):
        bn[k] = _block_norm(y, k * m, m, p)
        ny = max(ny, bn[k])
    if ny == 0.0:
        return 0.0, 0.0, tol
    s, i = -np.inf, np.inf
    for k in range(count):
        if bn[k] >= (1 - TOL_ACTIVE) * ny:
            bs, bi = _block_sup_inf(y, x, k * m, m, p, bn[k])
            s = max(s, bs)
            i = min(i, bi)
    return ny * s, ny * i, tol * (1 + ny * nx)


@numba.njit(cache=True, error_model="numpy", inline="always")
def _state(plus, minus, tz, rel):
    """-1 / 0 / +1: below, inside or above the zero set of ``y perp x``."""
    if rel == PLUS:
        lo_v = hi_v = plus
    elif rel == MINUS:
        lo_v = hi_v = minus
    elif rel == MID:
        lo_v = hi_v = (plus + minus) / 2
    else:
        lo_v, hi_v = plus, minus
    if lo_v < -tz:
        return -1
    if hi_v > tz:
        return 1
    return 0


@numba.njit(cache=True, error_model="numpy", inline="always")
def jump_value(plus_hi, minus_lo, rel):
    """Estimated relation value at the jump point, or NaN when it is not
    determined by one-sided limits (bj always holds at a jump)."""
    if rel == PLUS:
        return plus_hi
    if rel == MINUS:
        return minus_lo
    if rel == MID:
        return (plus_hi + minus_lo) / 2
    return np.nan


@numba.njit(cache=True, error_model="numpy")
def line_roots(Z, x, nx, count, m, p, rel, tol, span, steps, probe, margin):
    B, d = Z.shape
    out = np.full(B, np.nan)
    y = np.empty(d)
    bn = np.empty(count)
    for r in range(B):
        lo, hi = -span, span
        for j in range(d):
            y[j] = Z[r, j] + lo * x[j]
        plus, minus_lo, tz_lo = _derivs(y, x, nx, count, m, p, tol, bn)
        if _state(plus, minus_lo, tz_lo, rel) != -1:
            continue
        for j in range(d):
            y[j] = Z[r, j] + hi * x[j]
        plus_hi, minus, tz_hi = _derivs(y, x, nx, count, m, p, tol, bn)
        if _state(plus_hi, minus, tz_hi, rel) != 1:
            continue
        t = np.nan
        dropped = False
        for step in range(steps):
            if step == probe:
                v = jump_value(plus_hi, minus_lo, rel)
                if abs(v) > max(tz_lo, tz_hi) + margin * (1 + max(tz_lo, tz_hi) / tol):
                    dropped = True
                    break
            mid = (lo + hi) / 2
            for j in range(d):
                y[j] = Z[r, j] + mid * x[j]
            plus, minus, tz = _derivs(y, x, nx, count, m, p, tol, bn)
            st = _state(plus, minus, tz, rel)
            if st == 0:
                t = mid
                break
            if st < 0:
                lo, minus_lo, tz_lo = mid, minus, tz
            else:
                hi, plus_hi, tz_hi = mid, plus, tz
        if not dropped:
            out[r] = (lo + hi) / 2 if np.isnan(t) else t
    return out
