"""Left/right symmetric points for the four orthogonality relations.

``classify`` first tries a characterization that applies to the space and
relation (a "fast path"), then runs a randomized counterexample search. A
``symmetric`` verdict only ever comes from a fast path; the search alone can
produce ``not_symmetric`` (with a witness) or ``unknown``.

Search, left side: draw unit ``z``, shift it along ``x`` so that ``x perp y``
holds by construction (translation identity), and test ``not (y perp x)``.
Search, right side: on the line ``t -> z + t x`` the map
``t -> rho'(z + t x, x)`` is the one-sided derivative of the convex function
``||z + t x||^2 / 2``, hence nondecreasing; its zero set is an interval
located by bracketing on ``[-10, 10]`` followed by bisection.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels
from ._kernels import flat_layout
from .derivatives import rho_array
from .orthogonality import DEFAULT_TOL, RELATIONS, decide, holds_array
from .spaces import (
    TOL_ACTIVE, Lp, SpaceError, as_supsum, check_point, dim, is_euclidean,
    is_scalar, norm, norm_array, random_units, resolve,
)

SIDES = ("left", "right")
VERDICTS = ("symmetric", "not_symmetric", "unknown")
ZERO_ABS = 1e-12
LINE_SPAN = 10.0
LINE_CELLS = 64
BISECT_STEPS = 42
PROBE_STEP = 20
JUMP_MARGIN = 1e-3
CHUNK = 2048


class FastPathContradiction(AssertionError):
    """The search refuted a ``symmetric`` fast-path verdict."""


@dataclass(frozen=True, eq=False)
class SymmetryQuery:
    space: object
    point: np.ndarray
    side: str
    relation: str

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError(f"side must be one of {SIDES}, got {self.side!r}")
        if self.relation not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.relation!r}")
        object.__setattr__(self, "space", resolve(self.space))
        pt = check_point(self.space, self.point)
        if norm(self.space, pt) == 0:
            raise SpaceError("symmetry of the zero point is trivial and not classified")
        object.__setattr__(self, "point", pt)


@dataclass
class SymmetryReport:
    verdict: str
    witness: Optional[np.ndarray] = None
    rule: Optional[str] = None
    search_budget_used: int = 0
    seed: int = 0
    relation: str = ""
    side: str = ""
    space: str = ""
    point: Optional[np.ndarray] = field(default=None, repr=False)

    def as_dict(self):
        out = {"verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = [float(v) for v in self.witness]
        if self.rule is not None:
            out["rule"] = self.rule
        out.update(relation=self.relation, side=self.side, space=self.space,
                   seed=self.seed, budget_used=self.search_budget_used)
        return out


def _unit(space, x):
    x = check_point(space, x)
    nx = norm(space, x)
    if abs(nx - 1) > 1e-9:
        raise SpaceError(f"expected a unit vector, got norm {nx}")
    return x


def _derivs_for(relation, plus, minus):
    """The ``(lower, upper)`` values whose signs locate the zero set."""
    if relation == "rho_plus":
        return plus, plus
    if relation == "rho_minus":
        return minus, minus
    if relation == "rho":
        mid = (plus + minus) / 2
        return mid, mid
    # bj holds on the interval where rho'_+ >= 0 >= rho'_-
    return plus, minus


# ---------------------------------------------------------------------------
# search

def _left_candidates(space, x, Z, relation, rng):
    X = np.broadcast_to(x, Z.shape)
    plus, minus = rho_array(space, X, Z)
    nx2 = norm(space, x) ** 2
    if relation == "rho_plus":
        s = plus
    elif relation == "rho_minus":
        s = minus
    elif relation == "rho":
        s = (plus + minus) / 2
    else:
        s = minus + rng.random(len(Z)) * (plus - minus)
    return Z - (s / nx2)[:, None] * x[None, :]


def _jump_value(relation, plus_hi, minus_lo):
    if relation == "rho_plus":
        return plus_hi
    if relation == "rho_minus":
        return minus_lo
    if relation == "rho":
        return (plus_hi + minus_lo) / 2
    return np.full(len(plus_hi), np.nan)  # bj always holds at a jump


def _line_roots(space, x, Z, relation, tol):
    """One point per row of ``Z`` on ``z + t x`` where ``(z + t x) perp x``
    may hold, or NaN for rows that cannot produce one.

    The grid ``linspace(-LINE_SPAN, LINE_SPAN, LINE_CELLS + 1)`` consists of
    dyadic points of the interval, so bracketing over its cells is the first
    ``log2(LINE_CELLS)`` levels of the bisection below. Each step classifies
    the midpoint as below / inside / above the zero set; a row stops as soon
    as a midpoint lands inside, otherwise it converges to a jump point ``t*``.

    ``rho'_+`` is right-continuous and ``rho'_-`` left-continuous along the
    line, so after ``PROBE_STEP`` steps the bracket ends estimate the values
    at ``t*``. Rows whose estimate misses zero by more than
    ``JUMP_MARGIN * (1 + ||y|| ||x||)`` are dropped.
    """
    nx = norm(space, x)
    rel = _kernels.RELATION_CODES[relation]
    layout = flat_layout(space)
    if layout is not None:
        return _kernels.line_roots(np.ascontiguousarray(Z), np.ascontiguousarray(x), nx, *layout,
                                   rel, tol, LINE_SPAN, BISECT_STEPS, PROBE_STEP, JUMP_MARGIN)

    def derivs(t, Zr):
        Y = Zr + t[:, None] * x
        ny = norm_array(space, Y)
        plus, minus = rho_array(space, Y, np.broadcast_to(x, Y.shape), ny)
        return plus, minus, tol * (1 + ny * nx)

    def state(plus, minus, tz):
        lo_v, hi_v = _derivs_for(relation, plus, minus)
        return np.where(lo_v < -tz, -1, np.where(hi_v > tz, 1, 0))

    B = len(Z)
    lo = np.full(B, -LINE_SPAN)
    hi = np.full(B, LINE_SPAN)
    plus_lo, minus_lo, tz_lo = derivs(lo, Z)
    plus_hi, minus_hi, tz_hi = derivs(hi, Z)
    ok = (state(plus_lo, minus_lo, tz_lo) == -1) & (state(plus_hi, minus_hi, tz_hi) == 1)
    t = np.full(B, np.nan)
    open_ = np.flatnonzero(ok)
    for step in range(BISECT_STEPS):
        if open_.size == 0:
            break
        if step == PROBE_STEP:
            v = _jump_value(relation, plus_hi[open_], minus_lo[open_])
            tz = np.maximum(tz_lo[open_], tz_hi[open_])
            keep = ~(np.abs(v) > tz + JUMP_MARGIN * (1 + tz / tol))
            ok[open_[~keep]] = False
            open_ = open_[keep]
        mid = (lo[open_] + hi[open_]) / 2
        p_, m_, tz = derivs(mid, Z[open_])
        st = state(p_, m_, tz)
        inside = st == 0
        t[open_[inside]] = mid[inside]
        below, above = open_[st < 0], open_[st > 0]
        lo[below], minus_lo[below], tz_lo[below] = mid[st < 0], m_[st < 0], tz[st < 0]
        hi[above], plus_hi[above], tz_hi[above] = mid[st > 0], p_[st > 0], tz[st > 0]
        open_ = open_[~inside]
    t[open_] = (lo[open_] + hi[open_]) / 2
    t[~ok] = np.nan
    return t


def _search(space, x, side, relation, budget, seed, tol, want_witness=True):
    """Return ``(y, trials_used)``.

    With ``want_witness`` the target is a counterexample to symmetry; without
    it, any nonzero ``y`` with ``y perp x`` (right side only).
    """
    space = resolve(space)
    rng = np.random.default_rng(seed)
    used = 0
    while used < budget:
        n = min(CHUNK, budget - used)
        Z = random_units(space, rng, n)
        if side == "left":
            Y = _left_candidates(space, x, Z, relation, rng)
        else:
            t = _line_roots(space, x, Z, relation, tol)
            Y = Z + np.nan_to_num(t)[:, None] * x[None, :]
            Y[np.isnan(t)] = 0.0
        ny = norm_array(space, Y)
        live = ny > 1e-9
        Xb = np.broadcast_to(x, Y.shape)
        if live.any():
            Yl, Xl = Y[live], Xb[live]
            if side == "left":
                good = holds_array(space, Xl, Yl, relation, tol)
                if want_witness:
                    good &= ~holds_array(space, Yl, Xl, relation, tol)
            else:
                good = holds_array(space, Yl, Xl, relation, tol)
                if want_witness:
                    good &= ~holds_array(space, Xl, Yl, relation, tol)
            for j in np.flatnonzero(good):
                y = Yl[j]
                if _is_witness(space, x, y, side, relation, tol, strict=want_witness):
                    hit = int(np.flatnonzero(live)[j])
                    return y, used + hit + 1
        used += n
    return None, used


def _is_witness(space, x, y, side, relation, tol, strict=True) -> bool:
    if side == "left":
        fwd, back = decide(space, x, y, tol), decide(space, y, x, tol)
    else:
        fwd, back = decide(space, y, x, tol), decide(space, x, y, tol)
    return fwd.holds(relation) and (not strict or not back.holds(relation))


def find_counterexample(query: SymmetryQuery, budget: int = 10_000, seed: int = 0,
                        tol: float = DEFAULT_TOL):
    """A ``y`` refuting symmetry of ``query.point``, or None within ``budget`` trials."""
    space = query.space
    x = query.point / norm(space, query.point)
    y, _ = _search(space, x, query.side, query.relation, budget, seed, tol)
    if y is not None and not _is_witness(space, query.point, y, query.side, query.relation, tol):
        return None
    return y


# ---------------------------------------------------------------------------
# fast paths

def _inner_symmetric(inner, v, side, relation, budget, seed, tol):
    """Symmetry of a unit vector of the inner space: True/False/None."""
    if is_scalar(inner) or is_euclidean(inner):
        return True
    sub = as_supsum(inner)
    if sub is not None and relation in ("rho_plus", "rho_minus", "rho"):
        got, _ = _fastpath(inner, v, side, relation, budget, seed, tol)
        if got is not None:
            return got
    y, _ = _search(inner, v, side, relation, budget, seed, tol)
    return False if y is not None else None


def _has_nonzero_orth_to(inner, v, relation, budget, seed, tol):
    """Whether some nonzero ``w`` has ``w perp v``: True/False/None."""
    if np.all(np.abs(v) <= ZERO_ABS):
        return True
    if is_scalar(inner):
        return False  # w * v = 0 forces w = 0
    w, _ = _search(inner, v / norm(inner, v), "right", relation, budget, seed, tol, want_witness=False)
    return True if w is not None else None


def fastpath_left_supsum(space, x, relation: str, budget: int = 10_000, seed: int = 0,
                         tol: float = DEFAULT_TOL):
    """(rho_+/-)-left symmetry in a sup-direct-sum: exactly one unit block, all
    others zero, and the unit block left symmetric in the inner space."""
    sup = as_supsum(space)
    x = _unit(sup, x)
    blocks = x.reshape(sup.count, dim(sup.inner))
    bn = norm_array(sup.inner, blocks)
    nonzero = np.flatnonzero(bn > ZERO_ABS)
    if len(nonzero) != 1 or bn[nonzero[0]] < 1 - TOL_ACTIVE:
        return False
    k = nonzero[0]
    return _inner_symmetric(sup.inner, blocks[k] / bn[k], "left", relation, budget, seed, tol)


def fastpath_right_supsum(space, x, relation: str, budget: int = 10_000, seed: int = 0,
                          tol: float = DEFAULT_TOL):
    """(rho_+/-)-right symmetry in a sup-direct-sum.

    Singleton active set ``{i}``: ``x_i`` right symmetric and no nonzero ``w``
    with ``w perp x_k`` for ``k != i``. Otherwise no nonzero ``w perp x_k``
    for every ``k``. Over a scalar inner the latter means ``x_k != 0``.
    """
    sup = as_supsum(space)
    x = _unit(sup, x)
    blocks = x.reshape(sup.count, dim(sup.inner))
    bn = norm_array(sup.inner, blocks)
    active = np.flatnonzero(bn >= (1 - TOL_ACTIVE) * bn.max())
    if len(active) == 1:
        i = active[0]
        head = _inner_symmetric(sup.inner, blocks[i] / bn[i], "right", relation, budget, seed, tol)
        if head is False:
            return False
        others = [k for k in range(sup.count) if k != i]
    else:
        head = True
        others = list(range(sup.count))
    unknown = head is None
    for k in others:
        exists = _has_nonzero_orth_to(sup.inner, blocks[k], relation, budget, seed, tol)
        if exists is True:
            return False
        if exists is None:
            unknown = True
    return None if unknown else True


def fastpath_rho_ck(space, x, side: str):
    """rho-symmetry over a scalar inner (``C(K)`` with finite ``K``).

    left: every ``|x_k|`` is 0 or 1. right: no zero coordinate, and two equal
    moduli only at modulus 1.
    """
    sup = as_supsum(space)
    if sup is None or not is_scalar(sup.inner):
        raise SpaceError(f"fastpath_rho_ck needs a sup-direct-sum of scalars, got {space}")
    a = np.abs(_unit(sup, x))
    one = a >= 1 - TOL_ACTIVE
    zero = a <= ZERO_ABS
    if side == "left":
        return bool(np.all(one | zero))
    if zero.any():
        return False
    low = np.sort(a[~one])
    return bool(np.all(np.diff(low) > ZERO_ABS))


def _rho_screen(sup, x, side, budget, seed, tol):
    """Necessary conditions for rho-symmetry over a general inner.

    Returns False when a condition fails, None otherwise.
    """
    blocks = x.reshape(sup.count, dim(sup.inner))
    bn = norm_array(sup.inner, blocks)
    one = bn >= 1 - TOL_ACTIVE
    zero = bn <= ZERO_ABS
    if side == "left":
        return False if np.any(~one & ~zero) else None
    if zero.any():
        return False
    low = np.sort(bn[~one])
    if np.any(np.diff(low) <= ZERO_ABS):
        return False
    for k in np.flatnonzero(one):
        if _inner_symmetric(sup.inner, blocks[k] / bn[k], "right", "rho", budget, seed, tol) is False:
            return False
    return None


def _fastpath(space, x, side, relation, budget, seed, tol) -> Tuple[Optional[bool], Optional[str]]:
    space = resolve(space)
    if is_scalar(space):
        return True, "scalar"
    if is_euclidean(space):
        return True, "euclidean"
    sup = as_supsum(space)
    if sup is not None and relation in ("rho_plus", "rho_minus"):
        if side == "left":
            rule = "directsum(i)" if relation == "rho_plus" else "directsum(iii)"
            return fastpath_left_supsum(sup, x, relation, budget, seed, tol), rule
        if is_scalar(sup.inner):
            rule = "C(K) right corollary"
        else:
            rule = "directsum(ii)" if relation == "rho_plus" else "directsum(iv)"
        return fastpath_right_supsum(sup, x, relation, budget, seed, tol), rule
    if sup is not None and relation == "rho":
        if is_scalar(sup.inner):
            return fastpath_rho_ck(sup, x, side), f"{side}:rho:C(K)"
        rule = "directsum2(i)" if side == "left" else "directsum2(ii)"
        got = _rho_screen(sup, x, side, budget, seed, tol)
        return got, (rule if got is False else None)
    if (isinstance(space, Lp) and space.p == 1 and space.dim >= 3
            and relation == "bj" and side == "left"):
        return False, "no left symmetric points in l1(n), n >= 3"
    return None, None


def classify(query: SymmetryQuery, budget: int = 10_000, seed: int = 0,
             tol: float = DEFAULT_TOL) -> SymmetryReport:
    space, side, relation = query.space, query.side, query.relation
    x = query.point / norm(space, query.point)
    verdict_fp, rule = _fastpath(space, x, side, relation, budget, seed, tol)
    report = SymmetryReport("unknown", rule=rule, seed=seed, relation=relation, side=side,
                            space=str(space), point=query.point)
    y, used = _search(space, x, side, relation, budget, seed, tol)
    report.search_budget_used = used
    if y is not None and not _is_witness(space, query.point, y, side, relation, tol):
        y = None
    if verdict_fp is True:
        if y is not None:
            raise FastPathContradiction(
                f"{rule} says {query.point} is {side}-symmetric for {relation} in {space}, "
                f"but {y} is a counterexample")
        report.verdict = "symmetric"
    elif y is not None:
        report.verdict = "not_symmetric"
        report.witness = y
    return report


def grid_candidates(space, grid_step: float = 0.25) -> np.ndarray:
    """Unit-normalized grid points of ``[-1, 1]^d``, skipping norms below 0.25."""
    d = dim(space)
    if d > 4:
        raise SpaceError(f"grid classification is limited to dimension 4, got {d}")
    if not 0 < grid_step <= 1:
        raise ValueError("grid_step must lie in (0, 1]")
    ticks = np.arange(-1.0, 1.0 + grid_step / 2, grid_step)
    raw = np.array(list(itertools.product(ticks, repeat=d)))
    nr = norm_array(space, raw)
    keep = nr >= 0.25
    return raw[keep] / nr[keep, None]


def exhaustive_grid_classify(space, side: str, relation: str, grid_step: float = 0.25,
                             budget: int = 10_000, seed: int = 0,
                             tol: float = DEFAULT_TOL) -> List[Tuple[np.ndarray, SymmetryReport]]:
    """Classify every grid candidate. Candidates that normalize to the same
    unit vector share one classification."""
    space = resolve(space)
    out, seen = [], {}
    for x in grid_candidates(space, grid_step):
        key = tuple(np.round(x, 12))
        if key not in seen:
            seen[key] = classify(SymmetryQuery(space, x, side, relation), budget, seed, tol)
        out.append((x, seen[key]))
    return out
