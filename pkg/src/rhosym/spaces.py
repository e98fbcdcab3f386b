"""Finite-dimensional normed spaces: descriptors, the descriptor mini-language,
norms, norm-attaining blocks, exposed points and random unit vectors.

Points are plain float arrays. A point of ``SupSum(n, X)`` is stored flat and
block-major, so block ``k`` occupies ``coords[k*d:(k+1)*d]`` with ``d = X.dim``.
Every array function here accepts leading batch axes; the last axis holds the
coordinates.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

TOL_ACTIVE = 1e-9
ZERO_REL = 1e-12


class _Inf(enum.Enum):
    INF = "inf"

    def __repr__(self) -> str:
        return "INF"


INF = _Inf.INF


class SpaceError(ValueError):
    """Dimension mismatch, zero point where a nonzero one is required, etc."""


class Unsupported(SpaceError):
    """The requested operation is not available for this descriptor."""


@dataclass(frozen=True)
class Lp:
    dim: int
    p: Union[float, _Inf]

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise SpaceError(f"dimension must be a positive integer, got {self.dim}")
        if self.p is not INF:
            if not np.isfinite(self.p) or self.p < 1:
                raise SpaceError(f"p must be >= 1 or INF, got {self.p}")
            object.__setattr__(self, "p", float(self.p))

    @property
    def is_inf(self) -> bool:
        return self.p is INF

    def __str__(self) -> str:
        if self.p is INF:
            tag = "inf"
        elif float(self.p).is_integer():
            tag = str(int(self.p))
        else:
            tag = repr(float(self.p))
        return f"l{tag}({self.dim})"


@dataclass(frozen=True)
class SupSum:
    """``n`` copies of ``inner`` under the max-of-block-norms norm."""

    count: int
    inner: "Space"

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise SpaceError(f"block count must be a positive integer, got {self.count}")

    def __str__(self) -> str:
        return f"sup({self.count}, {self.inner})"


@dataclass(frozen=True)
class Dual:
    of: "Space"

    def __str__(self) -> str:
        return f"dual({self.of})"


Space = Union[Lp, SupSum, Dual]


def dim(space: Space) -> int:
    """Total scalar dimension."""
    if isinstance(space, Lp):
        return space.dim
    if isinstance(space, SupSum):
        return space.count * dim(space.inner)
    return dim(space.of)


def conjugate_exponent(p):
    if p is INF:
        return 1.0
    if p == 1:
        return INF
    return p / (p - 1.0)


def resolve(space: Space) -> Space:
    """Collapse ``Dual`` wrappers wherever the dual is again an ``Lp``.

    ``dual(sup(n, X))`` stays wrapped: its norm is the sum of the block dual
    norms, but it is never turned into a descriptor of its own.
    """
    if isinstance(space, Dual):
        inner = resolve(space.of)
        if isinstance(inner, Lp):
            return Lp(inner.dim, conjugate_exponent(inner.p))
        if isinstance(inner, Dual):
            return resolve(inner.of)
        return Dual(inner)
    if isinstance(space, SupSum):
        return SupSum(space.count, resolve(space.inner))
    return space


def dual(space: Space) -> Space:
    return resolve(Dual(space))


def is_scalar(space: Space) -> bool:
    space = resolve(space)
    return isinstance(space, Lp) and space.dim == 1


def is_euclidean(space: Space) -> bool:
    space = resolve(space)
    return isinstance(space, Lp) and (space.dim == 1 or space.p == 2.0)


def is_smooth(space: Space) -> bool:
    space = resolve(space)
    return isinstance(space, Lp) and (space.dim == 1 or (space.p is not INF and space.p > 1))


def as_supsum(space: Space):
    """View ``linf(n)`` as ``sup(n, scalar)``; return other SupSums as is, else None."""
    space = resolve(space)
    if isinstance(space, SupSum):
        return space
    if isinstance(space, Lp) and space.is_inf and space.dim > 1:
        return SupSum(space.dim, Lp(1, INF))
    return None


# ---------------------------------------------------------------------------
# descriptor mini-language

class ParseError(SpaceError):
    def __init__(self, message: str, text: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?|\.\d+)|(?P<word>[A-Za-z]+)|(?P<sym>[(),]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ParseError("unexpected character", text, pos + len(text[pos:]) - len(text[pos:].lstrip()))
            break
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def parse_space(text: str) -> Space:
    """Parse ``l<p>(n)``, ``sup(n, <inner>)`` or ``dual(<desc>)``.

    >>> parse_space("sup(3, l2(2))")
    SupSum(count=3, inner=Lp(dim=2, p=2.0))
    """
    tokens = _tokenize(text)
    i = 0

    def peek():
        return tokens[i]

    def expect(kind, value=None):
        nonlocal i
        tk = tokens[i]
        if tk[0] != kind or (value is not None and tk[1] != value):
            want = value if value is not None else kind
            raise ParseError(f"expected {want!r}, found {tk[1] or 'end of input'!r}", text, tk[2])
        i += 1
        return tk

    def integer():
        tk = expect("num")
        if not tk[1].isdigit():
            raise ParseError("expected an integer", text, tk[2])
        return int(tk[1])

    def desc():
        nonlocal i
        kind, word, pos = peek()
        if kind != "word":
            raise ParseError("expected a space descriptor", text, pos)
        i += 1
        low = word.lower()
        if low == "sup":
            expect("sym", "(")
            n = integer()
            expect("sym", ",")
            inner = desc()
            expect("sym", ")")
            return SupSum(n, inner)
        if low == "dual":
            expect("sym", "(")
            of = desc()
            expect("sym", ")")
            return Dual(of)
        if low == "linf":
            p = INF
        elif low == "l" and peek()[0] == "word" and peek()[1].lower() == "inf":
            i += 1
            p = INF
        elif low == "l":
            p = float(expect("num")[1])
        else:
            raise ParseError(f"unknown descriptor {word!r}", text, pos)
        expect("sym", "(")
        n = integer()
        expect("sym", ")")
        try:
            return Lp(n, p)
        except SpaceError as exc:
            raise ParseError(str(exc), text, pos) from None

    space = desc()
    expect("end")
    return space


def parse_vector(text: str) -> np.ndarray:
    """Comma-separated decimals, optionally wrapped in brackets."""
    body = text.strip().strip("[]()")
    if not body:
        raise SpaceError("empty vector")
    try:
        return np.array([float(tok) for tok in body.split(",")], dtype=float)
    except ValueError as exc:
        raise SpaceError(f"cannot parse vector {text!r}: {exc}") from None


# ---------------------------------------------------------------------------
# norms

def check_point(space: Space, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != dim(space):
        raise SpaceError(f"point of length {arr.shape[-1] if arr.ndim else 0} does not fit {space} (dimension {dim(space)})")
    return arr


_SHORT = 8


def _row_reduce(ufunc, a: np.ndarray) -> np.ndarray:
    # numpy reduces short trailing axes slowly; fold the columns instead
    if a.shape[-1] > _SHORT:
        return ufunc.reduce(a, axis=-1)
    out = a[..., 0]
    for i in range(1, a.shape[-1]):
        out = ufunc(out, a[..., i])
    return out


def row_max(a):
    return _row_reduce(np.maximum, a)


def row_min(a):
    return _row_reduce(np.minimum, a)


def row_sum(a):
    return _row_reduce(np.add, a)


def _lp_norm(p, x: np.ndarray) -> np.ndarray:
    a = np.abs(x)
    if p is INF:
        return row_max(a)
    if p == 1:
        return row_sum(a)
    if p == 2 and x.shape[-1] > _SHORT:
        return np.linalg.norm(x, axis=-1)
    if p == 2:
        with np.errstate(over="ignore", under="ignore"):
            s = row_sum(x * x)
        # unscaled squares under- or overflow far from 1; rescale those rows only
        bad = ~((s > 1e-280) & (s < 1e280)) & (row_max(a) > 0)
        if not np.any(bad):
            return np.sqrt(s)
    m = row_max(a)
    safe = np.where(m > 0, m, 1.0)
    return m * row_sum((a / safe[..., None]) ** p) ** (1.0 / p)


def block_norms(space: SupSum, x: np.ndarray) -> np.ndarray:
    inner_dim = dim(space.inner)
    blocks = x.reshape(x.shape[:-1] + (space.count, inner_dim))
    return norm_array(space.inner, blocks)


def norm_array(space: Space, x: np.ndarray) -> np.ndarray:
    space = resolve(space)
    if isinstance(space, Lp):
        return _lp_norm(space.p, x)
    if isinstance(space, SupSum):
        return row_max(block_norms(space, x))
    inner = space.of
    if isinstance(inner, SupSum):
        d = dim(inner.inner)
        blocks = x.reshape(x.shape[:-1] + (inner.count, d))
        return row_sum(norm_array(dual(inner.inner), blocks))
    raise Unsupported(f"no norm for {space}")


def norm(space: Space, x) -> float:
    """Norm of a single point."""
    arr = check_point(space, x)
    if arr.ndim != 1:
        raise SpaceError("norm expects a single point; use norm_array for batches")
    return float(norm_array(space, arr))


def active_set(space: Space, x) -> frozenset:
    """0-based indices of the blocks where the sup norm is attained (``M_f``)."""
    sup = as_supsum(space)
    if sup is None:
        raise Unsupported(f"active_set needs a sup-direct-sum, got {space}")
    arr = check_point(sup, x)
    bn = block_norms(sup, arr)
    top = bn.max()
    if top == 0:
        raise SpaceError("active set of the zero point is undefined")
    return frozenset(int(k) for k in np.flatnonzero(bn >= (1 - TOL_ACTIVE) * top))


def is_exposed(space: Space, x, tol: float = 1e-9) -> bool:
    """Whether the unit vector ``x`` is an exposed point of the unit ball."""
    space = resolve(space)
    arr = check_point(space, x)
    nx = norm(space, arr)
    if abs(nx - 1) > tol:
        raise SpaceError(f"is_exposed expects a unit vector, got norm {nx}")
    if isinstance(space, SupSum):
        if not is_scalar(space.inner):
            raise Unsupported("exposed points of general sup-direct-sums are not characterized")
        space = Lp(dim(space), INF)
    if not isinstance(space, Lp):
        raise Unsupported(f"is_exposed is not available for {space}")
    a = np.abs(arr)
    if space.dim == 1 or (not space.is_inf and space.p > 1):
        return True
    if space.is_inf:
        return bool(np.all(np.abs(a - 1) <= tol))
    return int(np.sum(a > tol)) == 1


def random_unit(space: Space, seed) -> np.ndarray:
    """Gaussian sample normalized in the space's norm; deterministic in ``seed``."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    while True:
        g = rng.standard_normal(dim(space))
        n = norm(space, g)
        if n > 0:
            return g / n


def random_units(space: Space, rng: np.random.Generator, count: int) -> np.ndarray:
    g = rng.standard_normal((count, dim(space)))
    return g / norm_array(space, g)[:, None]
