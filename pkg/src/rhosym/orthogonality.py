"""Birkhoff-James, rho_+, rho_- and rho orthogonality deciders.

A relation holds when the matching derivative vanishes within
``tol_zero = tol * (1 + ||x|| ||y||)``. Birkhoff-James orthogonality is the
closed two-sided condition ``rho'_- <= 0 <= rho'_+``.

For sup-direct-sums ``decide_via_omega`` uses the set
``Omega = {y*(g_k) : k in M_f, y* in Ext J(f_k)}``: ``sup Omega`` and
``inf Omega`` are the one-sided derivatives at the normalized ``f``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .derivatives import DerivativeTriple, rho, rho_array
from .spaces import (
    TOL_ACTIVE, SpaceError, Unsupported, as_supsum, check_point, dim, is_scalar,
    norm, norm_array,
)
from .support import dual_extreme_support

DEFAULT_TOL = 1e-7
RELATIONS = ("bj", "rho_plus", "rho_minus", "rho")
_GOLDEN = (math.sqrt(5) - 1) / 2


def tol_zero(nx: float, ny: float, tol: float = DEFAULT_TOL) -> float:
    return tol * (1 + nx * ny)


@dataclass(frozen=True)
class OrthoVerdict:
    triple: DerivativeTriple
    bj: bool
    rho_plus_orth: bool
    rho_minus_orth: bool
    rho_orth: bool
    tol_zero: float

    @classmethod
    def from_triple(cls, triple: DerivativeTriple, tz: float) -> "OrthoVerdict":
        return cls(
            triple=triple,
            bj=triple.rho_minus <= tz and triple.rho_plus >= -tz,
            rho_plus_orth=abs(triple.rho_plus) <= tz,
            rho_minus_orth=abs(triple.rho_minus) <= tz,
            rho_orth=abs(triple.rho) <= tz,
            tol_zero=tz,
        )

    def holds(self, relation: str) -> bool:
        return {"bj": self.bj, "rho_plus": self.rho_plus_orth,
                "rho_minus": self.rho_minus_orth, "rho": self.rho_orth}[relation]

    def flags(self) -> Tuple[bool, bool, bool, bool]:
        return (self.bj, self.rho_plus_orth, self.rho_minus_orth, self.rho_orth)

    def as_dict(self):
        return {**self.triple.as_dict(), "bj": self.bj, "rho_plus_orth": self.rho_plus_orth,
                "rho_minus_orth": self.rho_minus_orth, "rho_orth": self.rho_orth,
                "tol_zero": self.tol_zero}


def decide(space, x, y, tol: float = DEFAULT_TOL) -> OrthoVerdict:
    x = check_point(space, x)
    y = check_point(space, y)
    triple = rho(space, x, y)
    return OrthoVerdict.from_triple(triple, tol_zero(norm(space, x), norm(space, y), tol))


def holds_array(space, X, Y, relation: str, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Batched version of ``decide(...).holds(relation)``."""
    plus, minus = rho_array(space, X, Y)
    tz = tol * (1 + norm_array(space, X) * norm_array(space, Y))
    if relation == "bj":
        return (minus <= tz) & (plus >= -tz)
    if relation == "rho_plus":
        return np.abs(plus) <= tz
    if relation == "rho_minus":
        return np.abs(minus) <= tz
    if relation == "rho":
        return np.abs((plus + minus) / 2) <= tz
    raise ValueError(f"unknown relation {relation!r}")


def bj_minimization_check(space, x, y, tol: float = DEFAULT_TOL, grid: int = 1025) -> bool:
    """Cross-check ``x perp_B y`` by minimizing ``lambda -> ||x + lambda y||``.

    Coarse grid on ``[-4||x||/||y||, 4||x||/||y||]``, then golden-section
    refinement of the bracketing cell down to width 1e-10.
    """
    x = check_point(space, x)
    y = check_point(space, y)
    nx, ny = norm(space, x), norm(space, y)
    if nx == 0 or ny == 0:
        raise SpaceError("bj_minimization_check needs nonzero x and y")
    half = 4 * nx / ny
    lams = np.linspace(-half, half, grid)
    vals = norm_array(space, x[None, :] + lams[:, None] * y[None, :])
    j = int(np.argmin(vals))
    a, b = lams[max(j - 1, 0)], lams[min(j + 1, grid - 1)]

    def f(lam):
        return norm(space, x + lam * y)

    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    # the width target cannot go below the float spacing at |lambda|
    width = max(1e-10, 8 * np.spacing(max(abs(a), abs(b))))
    while b - a > width:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    best = min(vals[j], fc, fd, f(0.0))
    return bool(best >= nx - tol_zero(nx, ny, tol))


@dataclass(frozen=True)
class OmegaSet:
    values: np.ndarray
    contributors: List[Tuple[int, np.ndarray]] = field(repr=False)

    @property
    def sup(self) -> float:
        return float(self.values.max())

    @property
    def inf(self) -> float:
        return float(self.values.min())

    def as_dict(self):
        return {"values": self.values.tolist(),
                "contributors": [{"block": k, "functional": f.tolist()} for k, f in self.contributors],
                "sup": self.sup, "inf": self.inf}


def _blocks(sup_space, p):
    return p.reshape(sup_space.count, dim(sup_space.inner))


def omega_set(space, f, g) -> OmegaSet:
    """Values ``y*(g_k)`` over active blocks ``k`` and ``y* in Ext J(f_k)``."""
    sup_space = as_supsum(space)
    if sup_space is None:
        raise Unsupported(f"omega_set needs a sup-direct-sum, got {space}")
    f = check_point(sup_space, f)
    g = check_point(sup_space, g)
    fb, gb = _blocks(sup_space, f), _blocks(sup_space, g)
    bn = norm_array(sup_space.inner, fb)
    top = bn.max()
    if top == 0:
        raise SpaceError("omega_set of the zero function is undefined")
    active = np.flatnonzero(bn >= (1 - TOL_ACTIVE) * top)
    values, contributors = [], []
    if is_scalar(sup_space.inner):
        # sgn(f(k)) g(k) over M_f
        for k in active:
            s = np.sign(fb[k, 0])
            values.append(s * gb[k, 0])
            contributors.append((int(k), np.array([s])))
    else:
        for k in active:
            for ystar in dual_extreme_support(sup_space.inner, fb[k]).members():
                values.append(float(ystar @ gb[k]))
                contributors.append((int(k), ystar))
    return OmegaSet(np.array(values), contributors)


def decide_via_omega(space, f, g, tol: float = DEFAULT_TOL) -> OrthoVerdict:
    om = omega_set(space, f, g)
    sup_space = as_supsum(space)
    nf, ng = norm(sup_space, f), norm(sup_space, g)
    triple = DerivativeTriple(om.sup * nf, om.inf * nf, (om.sup + om.inf) / 2 * nf, "omega")
    return OrthoVerdict.from_triple(triple, tol_zero(nf, ng, tol))


def bj_interval(space, x, z):
    """Range of ``s`` such that ``x perp_B (z - s x)``."""
    t = rho(space, x, z)
    nx2 = norm(space, x) ** 2
    return t.rho_minus / nx2, t.rho_plus / nx2
