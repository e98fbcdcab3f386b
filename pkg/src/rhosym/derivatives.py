"""One-sided norm derivatives rho'_+, rho'_- and their mean rho'.

``rho_plus(x, y) = ||x|| * lim_{t->0+} (||x + t y|| - ||x||) / t``, computed
exactly as ``||x|| * sup{f(y) : f in Ext J(x)}``. :func:`rho_fd` evaluates the
defining limit numerically and serves as an independent oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spaces import SpaceError, Unsupported, check_point, norm, norm_array
from .support import CapExceeded, dual_extreme_support, sup_inf_array

FD_STEPS = (1e-3, 1e-4, 1e-5, 1e-6)
MODES = ("plus", "minus", "rho")


@dataclass(frozen=True)
class DerivativeTriple:
    rho_plus: float
    rho_minus: float
    rho: float
    method: str = "analytic"

    def as_dict(self):
        return {"rho_plus": self.rho_plus, "rho_minus": self.rho_minus,
                "rho": self.rho, "method": self.method}

    def get(self, mode: str) -> float:
        return {"plus": self.rho_plus, "minus": self.rho_minus, "rho": self.rho}[mode]


def _triple(plus, minus, method):
    return DerivativeTriple(plus, minus, (plus + minus) / 2, method)


def _prepare(space, x, y):
    x = check_point(space, x)
    y = check_point(space, y)
    nx = norm(space, x)
    if nx == 0:
        raise SpaceError("norm derivatives at the zero point are undefined")
    return x, y, nx


def rho(space, x, y) -> DerivativeTriple:
    """Analytic triple; falls back to :func:`rho_fd` (tagged) when the
    support set of ``x`` is not available in closed form."""
    x, y, nx = _prepare(space, x, y)
    try:
        supp = dual_extreme_support(space, x)
        return _triple(nx * supp.sup(y), nx * supp.inf(y), "analytic")
    except (Unsupported, CapExceeded):
        return rho_fd(space, x, y)


def rho_plus(space, x, y) -> float:
    return rho(space, x, y).rho_plus


def rho_minus(space, x, y) -> float:
    return rho(space, x, y).rho_minus


def _one_sided_fd(space, x, y, nx, sign):
    steps = np.array(FD_STEPS) * sign
    pts = x[None, :] + steps[:, None] * y[None, :]
    quot = (norm_array(space, pts) - nx) / steps
    # first-order Richardson on the last pair (step ratio 10)
    return nx * (10 * quot[-1] - quot[-2]) / 9


def rho_fd(space, x, y) -> DerivativeTriple:
    """Difference quotients on ``t in FD_STEPS`` with one Richardson step."""
    x, y, nx = _prepare(space, x, y)
    return _triple(_one_sided_fd(space, x, y, nx, 1.0),
                   _one_sided_fd(space, x, y, nx, -1.0), "finite_difference")


def orthogonalize(space, x, z, mode: str = "rho") -> np.ndarray:
    """``z - (rho'_mode(x, z) / ||x||^2) x``, so that ``rho'_mode(x, .)`` vanishes.

    Uses ``rho'_(x, z + s x) = rho'_(x, z) + s ||x||^2``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    x, z, nx = _prepare(space, x, z)
    return z - (rho(space, x, z).get(mode) / nx ** 2) * x


def rho_array(space, X, Y, nx=None):
    """Batched ``(rho'_+, rho'_-)`` for rows of ``X`` (nonzero) and ``Y``.

    ``nx`` may carry precomputed norms of the rows of ``X``.
    """
    if nx is None:
        nx = norm_array(space, X)
    s, i = sup_inf_array(space, X, Y, nx)
    return nx * s, nx * i
