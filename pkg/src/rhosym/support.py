"""Extreme support functionals ``Ext J(x)`` of the supported spaces.

Functionals are dense arrays in the (flattened) dual coordinates, so pairing
with a point is a dot product. For sup-direct-sums the members are
``y* (x) delta_k``: the inner functional ``y*`` placed in block ``k`` and zero
elsewhere; ``BlockUnion.contributors`` keeps the ``(k, y*)`` pairs.

``sup``/``inf`` never materialize sign products: over ``l1`` they factorize
coordinatewise (add or subtract ``sum |y_i|`` over the free coordinates).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .spaces import (
    INF, TOL_ACTIVE, ZERO_REL, Dual, Lp, SpaceError, SupSum, Unsupported,
    block_norms, check_point, dim, norm_array, resolve, row_max, row_min,
    row_sum,
)

SIGN_CAP = 20


class CapExceeded(SpaceError):
    """Materializing the support set would exceed the sign-product cap."""


@dataclass(frozen=True, eq=False)
class Singleton:
    functional: np.ndarray

    def members(self, cap: int = SIGN_CAP) -> np.ndarray:
        return self.functional[None, :]

    def sup(self, y) -> float:
        return float(self.functional @ y)

    inf = sup

    def __len__(self):
        return 1


@dataclass(frozen=True, eq=False)
class FiniteList:
    functionals: np.ndarray  # (m, d)

    def members(self, cap: int = SIGN_CAP) -> np.ndarray:
        return self.functionals

    def sup(self, y) -> float:
        return float((self.functionals @ y).max())

    def inf(self, y) -> float:
        return float((self.functionals @ y).min())

    def __len__(self):
        return len(self.functionals)


@dataclass(frozen=True, eq=False)
class ProductSigns:
    """``l1`` support set: fixed signs on nonzero coordinates, free signs elsewhere."""

    base: np.ndarray
    free_indices: Tuple[int, ...]

    def members(self, cap: int = SIGN_CAP) -> np.ndarray:
        k = len(self.free_indices)
        if k > cap:
            raise CapExceeded(f"{k} free sign coordinates exceed the cap of {cap}")
        out = np.repeat(self.base[None, :], 2 ** k, axis=0)
        if k:
            signs = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
            out[:, list(self.free_indices)] = signs
        return out

    def _spread(self, y) -> float:
        return float(np.abs(np.asarray(y)[list(self.free_indices)]).sum()) if self.free_indices else 0.0

    def sup(self, y) -> float:
        return float(self.base @ y) + self._spread(y)

    def inf(self, y) -> float:
        return float(self.base @ y) - self._spread(y)

    def __len__(self):
        return 2 ** len(self.free_indices)


@dataclass(frozen=True, eq=False)
class BlockUnion:
    """Support set of a sup-direct-sum point: union over active blocks."""

    count: int
    inner_dim: int
    parts: Tuple[Tuple[int, object], ...]  # (block index, inner support set)

    def _block(self, y, k):
        return np.asarray(y)[k * self.inner_dim:(k + 1) * self.inner_dim]

    def sup(self, y) -> float:
        return max(part.sup(self._block(y, k)) for k, part in self.parts)

    def inf(self, y) -> float:
        return min(part.inf(self._block(y, k)) for k, part in self.parts)

    def contributors(self, cap: int = SIGN_CAP):
        """``(k, y*)`` pairs, one per member."""
        return [(k, f) for k, part in self.parts for f in part.members(cap)]

    def members(self, cap: int = SIGN_CAP) -> np.ndarray:
        pairs = self.contributors(cap)
        out = np.zeros((len(pairs), self.count * self.inner_dim))
        for row, (k, f) in enumerate(pairs):
            out[row, k * self.inner_dim:(k + 1) * self.inner_dim] = f
        return out

    def __len__(self):
        return sum(len(part) for _, part in self.parts)


def dual_extreme_support(space, x):
    """Extreme points of ``J(x / ||x||)``."""
    space = resolve(space)
    x = check_point(space, x)
    nx = float(norm_array(space, x))
    if nx == 0:
        raise SpaceError("support functionals of the zero point are undefined")
    if isinstance(space, Lp):
        xh = x / nx
        if space.dim == 1:
            return Singleton(np.sign(xh))
        if space.is_inf:
            a = np.abs(xh)
            idx = np.flatnonzero(a >= (1 - TOL_ACTIVE) * a.max())
            fs = np.zeros((len(idx), space.dim))
            fs[np.arange(len(idx)), idx] = np.sign(xh[idx])
            return FiniteList(fs)
        if space.p == 1:
            zero = np.abs(xh) <= ZERO_REL
            base = np.where(zero, 0.0, np.sign(xh))
            return ProductSigns(base, tuple(int(i) for i in np.flatnonzero(zero)))
        return Singleton(np.sign(xh) * np.abs(xh) ** (space.p - 1))
    if isinstance(space, SupSum):
        d = dim(space.inner)
        blocks = x.reshape(space.count, d)
        bn = block_norms(space, x)
        active = np.flatnonzero(bn >= (1 - TOL_ACTIVE) * bn.max())
        parts = tuple((int(k), dual_extreme_support(space.inner, blocks[k])) for k in active)
        return BlockUnion(space.count, d, parts)
    raise Unsupported(f"support functionals are not available for {space}")


def supports_analytic(space) -> bool:
    space = resolve(space)
    if isinstance(space, Lp):
        return True
    if isinstance(space, SupSum):
        return supports_analytic(space.inner)
    return False


def sup_inf_array(space, X: np.ndarray, Y: np.ndarray, nx=None):
    """Batched ``(sup, inf)`` of ``f(Y)`` over ``Ext J(X)``, row by row.

    Same rules as :func:`dual_extreme_support`, vectorized over leading axes.
    Rows of ``X`` must be nonzero; ``nx`` may carry their norms.
    """
    space = resolve(space)
    if isinstance(space, Lp):
        if space.dim == 1:
            v = np.sign(X[..., 0]) * Y[..., 0]
            return v, v
        if space.is_inf:
            a = np.abs(X)
            act = a >= (1 - TOL_ACTIVE) * row_max(a)[..., None]
            v = np.sign(X) * Y
            return (row_max(np.where(act, v, -np.inf)),
                    row_min(np.where(act, v, np.inf)))
        if nx is None:
            nx = norm_array(space, X)
        nx = nx[..., None]
        if space.p == 1:
            zero = np.abs(X) <= ZERO_REL * nx
            core = row_sum(np.where(zero, 0.0, np.sign(X)) * Y)
            spread = row_sum(np.where(zero, np.abs(Y), 0.0))
            return core + spread, core - spread
        if space.p == 2:
            v = row_sum(X * Y) / nx[..., 0]
            return v, v
        v = row_sum(np.sign(X) * (np.abs(X) / nx) ** (space.p - 1) * Y)
        return v, v
    if isinstance(space, SupSum):
        d = dim(space.inner)
        shape = X.shape[:-1] + (space.count, d)
        Xb, Yb = X.reshape(shape), Y.reshape(shape)
        bn = norm_array(space.inner, Xb)
        act = bn >= (1 - TOL_ACTIVE) * row_max(bn)[..., None]
        # inactive zero blocks get a harmless placeholder; they are masked out
        placeholder = np.zeros(d)
        placeholder[0] = 1.0
        Xsafe = np.where((bn > 0)[..., None], Xb, placeholder)
        s, i = sup_inf_array(space.inner, Xsafe, Yb)
        return (row_max(np.where(act, s, -np.inf)),
                row_min(np.where(act, i, np.inf)))
    raise Unsupported(f"support functionals are not available for {space}")
