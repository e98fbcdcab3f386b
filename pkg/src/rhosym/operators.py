"""Operators between supported spaces as dense matrices.

Exact operator norms come from enumerating extreme points:

* ``l1`` domain: ``+-e_i``;
* ``linf`` domain: the ``2^n`` sign vertices (``n <= VERTEX_CAP``);
* polyhedral codomain (``l1``, ``linf``): ``||T|| = max ||T^T y*||_{X*}`` over the
  vertices ``y*`` of the dual ball, with the norming points of ``T^T y*`` as
  attainment points;
* ``l2 -> l2``: power iteration on ``T^T T``.

Attainment points are unit vectors reported once per ``{x, -x}`` pair, with
the first nonzero coordinate positive.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .derivatives import DerivativeTriple
from .orthogonality import DEFAULT_TOL, OrthoVerdict, tol_zero
from .spaces import (
    INF, TOL_ACTIVE, Lp, SpaceError, SupSum, Unsupported, as_supsum, check_point, dim,
    dual, is_exposed, is_scalar, norm, norm_array, resolve,
)
from .support import dual_extreme_support
from .symmetry import SymmetryQuery, SymmetryReport, classify

VERTEX_CAP = 20
POWER_TOL = 1e-10
POWER_MAX_ITER = 100_000
_VERTEX_CHUNK = 1 << 16


class VertexCapExceeded(Unsupported):
    """Sign-vertex enumeration beyond ``VERTEX_CAP`` coordinates."""


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    domain: object
    codomain: object
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "domain", resolve(self.domain))
        object.__setattr__(self, "codomain", resolve(self.codomain))
        a = np.atleast_2d(np.asarray(self.entries, dtype=float))
        want = (dim(self.codomain), dim(self.domain))
        if a.shape != want:
            raise SpaceError(f"matrix of shape {a.shape} does not map {self.domain} to "
                             f"{self.codomain} (expected {want})")
        object.__setattr__(self, "entries", a)

    def __call__(self, x) -> np.ndarray:
        return self.entries @ check_point(self.domain, x)

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True)
class AttainmentSet:
    points: Tuple[np.ndarray, ...]
    norm: float
    route: str = field(default="", compare=False)

    def __len__(self):
        return len(self.points)

    def as_dict(self):
        return {"norm": self.norm, "route": self.route,
                "points": [p.tolist() for p in self.points]}


# ---------------------------------------------------------------------------
# constructors and isometries

def from_l1_columns(columns, codomain) -> MatrixOperator:
    """The operator ``l1(n) -> X`` sending ``e_i`` to ``columns[i]``."""
    cols = [check_point(resolve(codomain), c) for c in columns]
    if not cols:
        raise SpaceError("at least one column is required")
    return MatrixOperator(Lp(len(cols), 1), codomain, np.column_stack(cols))


def supsum_space(T: MatrixOperator) -> SupSum:
    """``linf^n(X)``, the image space of :func:`to_supsum`."""
    if not (isinstance(T.domain, Lp) and T.domain.p == 1):
        raise Unsupported(f"to_supsum needs an l1 domain, got {T.domain}")
    return SupSum(T.domain.dim, T.codomain)


def to_supsum(T: MatrixOperator) -> np.ndarray:
    """``(T e_1, ..., T e_n)`` as a flat point of :func:`supsum_space`."""
    supsum_space(T)
    return T.entries.T.reshape(-1).copy()


def dual_supsum_space(T: MatrixOperator) -> SupSum:
    """``linf^m(X*)``, the image space of :func:`to_dual_supsum`."""
    sup = as_supsum(T.codomain)
    if sup is None or not is_scalar(sup.inner):
        raise Unsupported(f"to_dual_supsum needs an linf codomain, got {T.codomain}")
    return SupSum(sup.count, dual(T.domain))


def to_dual_supsum(T: MatrixOperator) -> np.ndarray:
    """``(T* e_1*, ..., T* e_m*)``: the rows of the matrix, as functionals."""
    dual_supsum_space(T)
    return T.entries.reshape(-1).copy()


def adjoint(T: MatrixOperator) -> MatrixOperator:
    return MatrixOperator(dual(T.codomain), dual(T.domain), T.entries.T.copy())


def rank_one(f, y, domain, codomain) -> MatrixOperator:
    """``x -> f(x) y``."""
    domain, codomain = resolve(domain), resolve(codomain)
    f = check_point(domain, f)
    y = check_point(codomain, y)
    if not np.any(f) or not np.any(y):
        raise SpaceError("rank_one needs nonzero f and y")
    return MatrixOperator(domain, codomain, np.outer(y, f))


# ---------------------------------------------------------------------------
# extreme points

def _canonical(x):
    nz = np.flatnonzero(np.abs(x) > 0)
    return -x if nz.size and x[nz[0]] < 0 else x


def _sign_vertices(n, first_positive=True):
    """Rows of ``{-1, 1}^n``; with ``first_positive`` one row per ``{v, -v}``."""
    if n > VERTEX_CAP:
        raise VertexCapExceeded(f"vertex enumeration is capped at n = {VERTEX_CAP}, got {n}")
    free = n - 1 if first_positive else n
    tail = np.array(list(itertools.product((1.0, -1.0), repeat=free))).reshape(-1, free)
    if first_positive:
        return np.hstack([np.ones((len(tail), 1)), tail])
    return tail


def _lp_with(space, p):
    return isinstance(space, Lp) and space.dim > 1 and space.p == p


def domain_extreme_points(space) -> np.ndarray:
    """Extreme points of the unit ball, one per ``{x, -x}`` pair."""
    space = resolve(space)
    if isinstance(space, Lp) and space.dim == 1:
        return np.ones((1, 1))
    if _lp_with(space, 1):
        return np.eye(space.dim)
    if _lp_with(space, INF):
        return _sign_vertices(space.dim)
    sup = as_supsum(space)
    if sup is not None and is_scalar(sup.inner):
        return _sign_vertices(dim(sup))
    raise Unsupported(f"extreme points of the unit ball of {space} are not enumerable")


def _norming_point(space, g):
    """Unit ``x`` in ``space`` with ``g(x) = ||g||_{space*}``; ``g`` nonzero."""
    space = resolve(space)
    if isinstance(space, Lp) and not space.is_inf and space.p > 1 and space.dim > 1:
        q = space.p / (space.p - 1)
        a = np.abs(g) / np.abs(g).max()
        x = np.sign(g) * a ** (q - 1)
        return x / norm(space, x)
    raise Unsupported(f"norming points in {space} are not implemented")


def _max_over_rows(values_fn, rows):
    """Maximum of ``values_fn`` over ``rows`` and the rows within the active band."""
    vals = np.concatenate([values_fn(rows[lo:lo + _VERTEX_CHUNK])
                           for lo in range(0, len(rows), _VERTEX_CHUNK)])
    best = float(vals.max())
    return best, list(rows[vals >= (1 - TOL_ACTIVE) * best])


def _power_iteration(A: np.ndarray):
    """Largest eigenpair of the symmetric PSD matrix ``A``."""
    n = A.shape[0]
    v = np.ones(n) + np.arange(n) / (10.0 * n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(POWER_MAX_ITER):
        w = A @ v
        lam = float(v @ w)
        if lam == 0 or np.linalg.norm(w - lam * v) <= POWER_TOL * lam:
            break
        v = w / np.linalg.norm(w)
    else:
        raise ArithmeticError("power iteration did not reach the residual target")
    return lam, v


def _attainment(T: MatrixOperator) -> AttainmentSet:
    X, Y, A = T.domain, T.codomain, T.entries
    if not np.any(A):
        return AttainmentSet(tuple(), 0.0, "zero")
    try:
        ext = domain_extreme_points(X)
    except VertexCapExceeded:
        raise
    except Unsupported:
        ext = None
    if ext is not None:
        best, arg = _max_over_rows(lambda V: norm_array(Y, V @ A.T), ext)
        return AttainmentSet(tuple(_canonical(x) for x in arg), best, "domain vertices")
    if _lp_with(Y, 1) or _lp_with(Y, INF):
        dual_ext = domain_extreme_points(dual(Y))
        best, arg = _max_over_rows(lambda V: norm_array(dual(X), V @ A), dual_ext)
        pts = {tuple(np.round(_canonical(_norming_point(X, A.T @ ys)), 15)): None for ys in arg}
        return AttainmentSet(tuple(np.array(p) for p in pts), best, "codomain dual vertices")
    if _lp_with(X, 2.0) and isinstance(Y, Lp) and Y.p == 2.0:
        lam, v = _power_iteration(A.T @ A)
        return AttainmentSet((_canonical(v),), float(np.sqrt(lam)), "power iteration")
    raise Unsupported(f"operator norms from {X} to {Y} are not supported")


def operator_norm(T: MatrixOperator) -> float:
    return _attainment(T).norm


def attainment_set(T: MatrixOperator) -> AttainmentSet:
    """Points of ``M_T``: maximizing extreme points of the domain ball for
    polyhedral domains, norming points otherwise.

    For ``l2 -> l2`` with a repeated top singular value ``M_T`` is a sphere of
    the top singular subspace; the single returned point represents it.
    """
    return _attainment(T)


# ---------------------------------------------------------------------------
# orthogonality and symmetry screens

@dataclass(frozen=True)
class OperatorOmega:
    values: np.ndarray
    contributors: List[Tuple[np.ndarray, np.ndarray]] = field(repr=False)

    @property
    def sup(self) -> float:
        return float(self.values.max())

    @property
    def inf(self) -> float:
        return float(self.values.min())


def operator_omega(T: MatrixOperator, S: MatrixOperator) -> OperatorOmega:
    """``{y*(S x) : x in Ext B_X, y* in Ext B_{Y*}, y*(T x) = ||T||}``."""
    if T.domain != S.domain or T.codomain != S.codomain:
        raise SpaceError("T and S must act between the same spaces")
    att = attainment_set(T)
    if att.norm == 0:
        raise SpaceError("the Omega set of the zero operator is undefined")
    domain_extreme_points(T.domain)  # Ext B_X must be enumerable
    values, contributors = [], []
    for x in att.points:
        for ystar in dual_extreme_support(T.codomain, T(x)).members():
            values.append(float(ystar @ S(x)))
            contributors.append((x, ystar))
    return OperatorOmega(np.array(values), contributors)


def operator_omega_decide(T: MatrixOperator, S: MatrixOperator,
                          tol: float = DEFAULT_TOL) -> OrthoVerdict:
    om = operator_omega(T, S)
    nt, ns = operator_norm(T), operator_norm(S)
    triple = DerivativeTriple(nt * om.sup, nt * om.inf, nt * (om.sup + om.inf) / 2, "operator_omega")
    return OrthoVerdict.from_triple(triple, tol_zero(nt, ns, tol))


@dataclass
class ScreenReport:
    passed: bool
    checks: List[Tuple[np.ndarray, np.ndarray, SymmetryReport]] = field(default_factory=list)
    note: Optional[str] = None

    @property
    def violations(self):
        return [c for c in self.checks if c[2].verdict == "not_symmetric"]

    def as_dict(self):
        out = {"passed": self.passed, "checks": [
            {"x": x.tolist(), "Tx": tx.tolist(), **rep.as_dict()} for x, tx, rep in self.checks]}
        if self.note:
            out["note"] = self.note
        return out


def bj_left_necessary_screen(T: MatrixOperator, budget: int = 10_000, seed: int = 0,
                             tol: float = DEFAULT_TOL) -> ScreenReport:
    """Test the images ``T x`` of exposed points ``x in M_T`` for BJ left symmetry.

    A left symmetric ``T`` maps every such ``x`` to a left symmetric point, so
    any ``not_symmetric`` image certifies that ``T`` is not left symmetric.
    """
    att = attainment_set(T)
    if att.norm == 0:
        return ScreenReport(True, note="zero operator: nothing to screen")
    report = ScreenReport(True)
    for x in att.points:
        if not is_exposed(T.domain, x):
            continue
        tx = T(x)
        rep = classify(SymmetryQuery(T.codomain, tx, "left", "bj"), budget, seed, tol)
        report.checks.append((x, tx, rep))
        if rep.verdict == "not_symmetric":
            report.passed = False
    return report
