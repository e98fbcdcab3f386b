import numpy as np
import pytest
from hypothesis import given, strategies as st

from rhosym.derivatives import (
    DerivativeTriple, orthogonalize, rho, rho_array, rho_fd, rho_minus, rho_plus,
)
from rhosym.spaces import INF, Dual, Lp, SpaceError, SupSum, dim, norm


def one_sided(normfn, x, y, sign, t=1e-7):
    """Plain forward/backward quotient on a reference norm, as a second oracle."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    n = normfn(x)
    return n * (normfn(x + sign * t * y) - n) / (sign * t)


L1 = lambda v: np.abs(v).sum()
LINF = lambda v: np.abs(v).max()


@pytest.mark.parametrize("space, x, y, plus, minus", [
    (Lp(2, 1.0), [1, 0], [0, 1], 1.0, -1.0),
    (Lp(2, INF), [1, 0.2], [0, 1], 0.0, 0.0),
    (Lp(2, 2.0), [3, 4], [4, -3], 0.0, 0.0),
    (Lp(2, 2.0), [1, 0], [1, 1], 1.0, 1.0),
    (Lp(2, INF), [1, 1], [0.3, -0.5], 0.3, -0.5),
    (Lp(2, INF), [1, 1], [0.3, 0.3], 0.3, 0.3),
    (Lp(2, 1.0), [1, 0], [1, 1], 2.0, 0.0),
])
def test_examples(space, x, y, plus, minus):
    t = rho(space, x, y)
    assert t.rho_plus == pytest.approx(plus, abs=1e-12)
    assert t.rho_minus == pytest.approx(minus, abs=1e-12)
    assert t.rho == pytest.approx((plus + minus) / 2, abs=1e-12)
    assert t.method == "analytic"
    assert rho_plus(space, x, y) == t.rho_plus and rho_minus(space, x, y) == t.rho_minus


@pytest.mark.parametrize("normfn, space, x, y", [
    (L1, Lp(2, 1.0), [1, 0], [0, 1]),
    (L1, Lp(2, 1.0), [1, 0], [1, 1]),
    (LINF, Lp(2, INF), [1, 1], [0.3, -0.5]),
    (LINF, Lp(3, INF), [2, -2, 1], [1, 1, 5]),
])
def test_examples_against_reference_quotient(normfn, space, x, y):
    t = rho(space, x, y)
    assert t.rho_plus == pytest.approx(one_sided(normfn, x, y, 1), abs=1e-6)
    assert t.rho_minus == pytest.approx(one_sided(normfn, x, y, -1), abs=1e-6)


def test_fd_piecewise_linear():
    t = rho_fd(Lp(2, 1.0), [1, 0], [0, 1])
    assert t.method == "finite_difference"
    assert abs(t.rho_plus - 1) <= 1e-6 and abs(t.rho_minus + 1) <= 1e-6


def test_fd_matches_analytic_lp(rng):
    space = Lp(3, 4.0)
    for _ in range(20):
        x = rng.standard_normal(3)
        x /= norm(space, x)
        y = rng.standard_normal(3)
        assert rho_fd(space, x, y).rho_plus == pytest.approx(rho(space, x, y).rho_plus, abs=1e-5)


@pytest.mark.parametrize("space", [Lp(3, 1.0), Lp(4, 1.5), Lp(3, INF), SupSum(2, Lp(2, 1.0))])
def test_fd_direction_x(space, rng):
    x = rng.standard_normal(dim(space))
    t = rho_fd(space, x, x)
    nx2 = norm(space, x) ** 2
    assert abs(t.rho_plus - nx2) <= 1e-6 * nx2 and abs(t.rho_minus - nx2) <= 1e-6 * nx2


def test_fallback_is_tagged():
    space = Dual(SupSum(2, Lp(2, 2.0)))
    t = rho(space, [3, 4, 0, 0], [0, 0, 1, 0])
    assert t.method == "finite_difference"
    # ||x + t y|| = 5 + |t| here
    assert t.rho_plus == pytest.approx(5.0, abs=1e-5)
    assert t.rho_minus == pytest.approx(-5.0, abs=1e-5)


def test_zero_point():
    with pytest.raises(SpaceError):
        rho(Lp(2, 2.0), [0, 0], [1, 0])
    with pytest.raises(SpaceError):
        orthogonalize(Lp(2, 2.0), [0, 0], [1, 0])


@pytest.mark.parametrize("space, x, z, mode, expected", [
    (Lp(2, 2.0), [1, 0], [1, 1], "plus", [0, 1]),
    (Lp(2, 1.0), [1, 0], [1, 1], "plus", [-1, 1]),
    (Lp(2, 1.0), [1, 0], [1, 1], "minus", [1, 1]),
    (Lp(2, 1.0), [1, 0], [1, 1], "rho", [0, 1]),
])
def test_orthogonalize_examples(space, x, z, mode, expected):
    y = orthogonalize(space, x, z, mode)
    assert np.allclose(y, expected, atol=1e-12)
    assert abs(rho(space, x, y).get(mode)) <= 1e-9 * norm(space, x) * norm(space, z)


def test_orthogonalize_l1_checked_by_reference_quotient():
    y = orthogonalize(Lp(2, 1.0), [1, 0], [1, 1], "plus")
    assert abs(one_sided(L1, [1, 0], y, 1)) <= 1e-6


@pytest.mark.parametrize("mode", ["plus", "minus", "rho"])
def test_orthogonalize_self(mode):
    assert np.allclose(orthogonalize(Lp(3, 1.0), [1, -2, 0], [1, -2, 0], mode), 0)


def test_orthogonalize_bad_mode():
    with pytest.raises(ValueError):
        orthogonalize(Lp(2, 2.0), [1, 0], [0, 1], "bj")


def test_rho_array_matches_scalar(rng):
    space = SupSum(3, Lp(2, INF))
    X = rng.choice([-1.0, 0.0, 1.0], size=(30, 6))
    X[~X.any(axis=1), 0] = 1.0
    Y = rng.standard_normal((30, 6))
    plus, minus = rho_array(space, X, Y)
    for x, y, a, b in zip(X, Y, plus, minus):
        t = rho(space, x, y)
        assert a == pytest.approx(t.rho_plus, abs=1e-12) and b == pytest.approx(t.rho_minus, abs=1e-12)


def test_triple_accessors():
    t = DerivativeTriple(1.0, -1.0, 0.0)
    assert t.get("plus") == 1.0 and t.get("rho") == 0.0
    assert t.as_dict()["method"] == "analytic"


SPACES = [Lp(3, 1.0), Lp(3, 1.5), Lp(3, 2.0), Lp(3, INF), SupSum(3, Lp(1, INF))]
coords = st.lists(st.sampled_from([-1.0, -0.5, 0.0, 0.5, 1.0, 0.3, -2.0]), min_size=3, max_size=3)


@given(st.sampled_from(SPACES), coords, coords, st.floats(0.1, 10), st.floats(-3, 3))
def test_identities(space, x, y, a, s):
    x, y = np.array(x), np.array(y)
    if not x.any():
        x[0] = 1.0
    t = rho(space, x, y)
    scale = norm(space, x) * (norm(space, y) + 1)
    # ordering and the Cauchy-Schwarz type bound
    assert t.rho_minus <= t.rho <= t.rho_plus
    assert abs(t.rho_plus) <= norm(space, x) * norm(space, y) + 1e-12
    # homogeneity in x, sign flip, translation
    assert rho(space, a * x, y).rho_plus == pytest.approx(a * t.rho_plus, abs=1e-10 * a * scale)
    assert rho(space, -x, y).rho_plus == pytest.approx(-t.rho_minus, abs=1e-10 * scale)
    shifted = rho(space, x, y + s * x).rho_plus
    assert shifted == pytest.approx(t.rho_plus + s * norm(space, x) ** 2, abs=1e-9 * scale * (1 + abs(s)))
