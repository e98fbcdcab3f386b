import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rhosym import symmetry
from rhosym.orthogonality import decide
from rhosym.spaces import INF, Lp, SpaceError, SupSum, norm, random_units
from rhosym.symmetry import (
    SymmetryQuery, classify, exhaustive_grid_classify, fastpath_left_supsum,
    fastpath_right_supsum, fastpath_rho_ck, find_counterexample, grid_candidates,
)

LINF2, LINF3 = Lp(2, INF), Lp(3, INF)
SCALAR2, SCALAR3 = SupSum(2, Lp(1, INF)), SupSum(3, Lp(1, INF))
BUDGET = 2000


def witness_ok(space, x, y, side, relation):
    fwd = decide(space, x, y) if side == "left" else decide(space, y, x)
    back = decide(space, y, x) if side == "left" else decide(space, x, y)
    return fwd.holds(relation) and not back.holds(relation)


def test_query_validation():
    with pytest.raises(SpaceError):
        SymmetryQuery(LINF2, [0, 0], "left", "bj")
    with pytest.raises(ValueError):
        SymmetryQuery(LINF2, [1, 0], "up", "bj")
    with pytest.raises(ValueError):
        SymmetryQuery(LINF2, [1, 0], "left", "james")


def test_counterexample_linf_left_rho_plus():
    q = SymmetryQuery(LINF2, [1, 1], "left", "rho_plus")
    y = find_counterexample(q, BUDGET, seed=0)
    assert y is not None and witness_ok(LINF2, q.point, y, "left", "rho_plus")
    # the hand-checked witness
    assert witness_ok(LINF2, q.point, np.array([0.0, -1.0]), "left", "rho_plus")


@pytest.mark.parametrize("side", ["left", "right"])
@pytest.mark.parametrize("relation", ["bj", "rho_plus", "rho_minus", "rho"])
def test_no_counterexample_euclidean(side, relation):
    assert find_counterexample(SymmetryQuery(Lp(2, 2.0), [1, 0], side, relation), 500, 0) is None


def test_no_counterexample_linf_right_rho():
    assert find_counterexample(SymmetryQuery(LINF2, [1, 0.5], "right", "rho"), BUDGET, 0) is None


def test_counterexample_is_deterministic():
    q = SymmetryQuery(Lp(3, 1.0), [1, 0, 0], "left", "bj")
    a, b = find_counterexample(q, BUDGET, 3), find_counterexample(q, BUDGET, 3)
    assert a is not None and np.array_equal(a, b)


@pytest.mark.parametrize("x, side, relation, verdict, rule", [
    ([1, 0, 0], "left", "rho_plus", "symmetric", "directsum(i)"),
    ([1, 1, 0], "left", "rho_plus", "not_symmetric", "directsum(i)"),
    ([0, -1, 0], "left", "rho_minus", "symmetric", "directsum(iii)"),
    ([1, 0.5, 0.25], "right", "rho_plus", "symmetric", "C(K) right corollary"),
    ([1, 0, 0.5], "right", "rho_minus", "not_symmetric", "C(K) right corollary"),
    ([1, -1, 0], "left", "rho", "symmetric", "left:rho:C(K)"),
    ([1, 0.5, 0], "left", "rho", "not_symmetric", "left:rho:C(K)"),
    ([1, 0.5, 0.5], "right", "rho", "not_symmetric", "right:rho:C(K)"),
])
def test_classify_linf3(x, side, relation, verdict, rule):
    rep = classify(SymmetryQuery(LINF3, x, side, relation), BUDGET, 0)
    assert (rep.verdict, rep.rule) == (verdict, rule)
    if verdict == "not_symmetric":
        assert witness_ok(LINF3, np.array(x, float), rep.witness, side, relation)


def test_classify_linf2_right():
    assert classify(SymmetryQuery(LINF2, [1, 0.5], "right", "rho_plus"), BUDGET).rule == "C(K) right corollary"
    rep = classify(SymmetryQuery(LINF2, [1, 0], "right", "rho_plus"), BUDGET)
    assert rep.verdict == "not_symmetric" and rep.witness is not None


def test_classify_l1_bj_left():
    rep = classify(SymmetryQuery(Lp(3, 1.0), [0, 1, 0], "left", "bj"), BUDGET)
    assert rep.verdict == "not_symmetric"
    assert rep.rule == "no left symmetric points in l1(n), n >= 3"


def test_search_alone_never_certifies():
    rep = classify(SymmetryQuery(Lp(2, 4.0), [1, 0], "left", "bj"), 300)
    assert rep.verdict in ("unknown", "not_symmetric")
    assert rep.rule is None


def test_report_serialization():
    rep = classify(SymmetryQuery(LINF2, [1, 1], "left", "rho_plus"), BUDGET, seed=5)
    d = rep.as_dict()
    assert d["verdict"] == "not_symmetric" and len(d["witness"]) == 2
    assert (d["side"], d["relation"], d["space"], d["seed"]) == ("left", "rho_plus", "linf(2)", 5)
    assert 1 <= d["budget_used"] <= BUDGET


@pytest.mark.parametrize("x, expected", [
    ([0, -1, 0], True), ([1, 0, 0.2], False), ([1, 1, 0], False),
])
def test_fastpath_left_scalar(x, expected):
    assert fastpath_left_supsum(SCALAR3, x, "rho_plus") is expected


def test_fastpath_left_euclidean_inner():
    assert fastpath_left_supsum(SupSum(2, Lp(2, 2.0)), [0.6, 0.8, 0, 0], "rho_plus") is True


def test_fastpath_left_l1_inner():
    # e_1 in l1(2) is not rho_plus-left symmetric, so the direct sum point is not either
    assert fastpath_left_supsum(SupSum(2, Lp(2, 1.0)), [1, 0, 0, 0], "rho_plus", 500) is False


def test_fastpath_requires_unit():
    with pytest.raises(SpaceError):
        fastpath_left_supsum(SCALAR3, [2, 0, 0], "rho_plus")
    with pytest.raises(SpaceError):
        fastpath_rho_ck(SCALAR2, [0.5, 0.5], "left")


@pytest.mark.parametrize("space, x, expected", [
    (SCALAR2, [1, 0.5], True), (SCALAR2, [1, 0], False), (SCALAR3, [1, 1, 0.5], True),
    (SCALAR3, [1, -1, 0], False),
])
def test_fastpath_right_scalar(space, x, expected):
    assert fastpath_right_supsum(space, x, "rho_plus") is expected


def test_fastpath_right_l2_inner():
    # any nonzero block has a nonzero orthogonal vector in l2(2)
    assert fastpath_right_supsum(SupSum(2, Lp(2, 2.0)), [1, 0, 0, 0.5], "rho_plus", 500) is False


@pytest.mark.parametrize("x, side, expected", [
    ([1, 1, -1], "left", True),
    ([1, 0.5, 0], "left", False),
    ([1, 0.5], "right", True),
    (np.array([0.5, 0.5, 1]), "right", False),
    ([1, 1, 0.5], "right", True),
])
def test_fastpath_rho_ck(x, side, expected):
    x = np.asarray(x, float)
    space = SupSum(len(x), Lp(1, INF))
    assert fastpath_rho_ck(space, x / np.abs(x).max(), side) is expected


def test_fastpath_rho_ck_needs_scalar_inner():
    with pytest.raises(SpaceError):
        fastpath_rho_ck(SupSum(2, Lp(2, 2.0)), [1, 0, 0, 0], "left")


def test_grid_candidates():
    pts = grid_candidates(LINF2, 0.5)
    assert np.allclose(np.abs(pts).max(axis=1), 1)
    assert len(pts) == 24  # 25 grid points minus the origin
    with pytest.raises(SpaceError):
        grid_candidates(Lp(5, 2.0))


def _symmetric_set(space, side, relation, step=0.5):
    rows = exhaustive_grid_classify(space, side, relation, step, BUDGET, 0)
    assert all(rep.verdict in ("symmetric", "not_symmetric") for _, rep in rows)
    return {tuple(np.round(x, 9)) for x, rep in rows if rep.verdict == "symmetric"}


def test_grid_left_rho_plus():
    assert _symmetric_set(LINF2, "left", "rho_plus") == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_grid_right_rho_plus():
    got = _symmetric_set(LINF2, "right", "rho_plus")
    pts = {tuple(np.round(x, 9)) for x in grid_candidates(LINF2, 0.5)}
    assert got == {p for p in pts if 0 not in p}


def test_grid_euclidean_all_symmetric():
    rows = exhaustive_grid_classify(Lp(2, 2.0), "left", "rho", 0.5, 300, 0)
    assert all(rep.verdict == "symmetric" for _, rep in rows)


@pytest.mark.parametrize("alpha", [0.1, 3.0, 250.0])
def test_scale_invariance(alpha):
    for x in ([1, 0.5, 0], [1, 1, 0], [1, 0.5, 0.25]):
        for side, relation in [("left", "rho_plus"), ("right", "rho"), ("right", "rho_minus")]:
            a = classify(SymmetryQuery(LINF3, x, side, relation), 500)
            b = classify(SymmetryQuery(LINF3, alpha * np.array(x), side, relation), 500)
            assert a.verdict == b.verdict and a.rule == b.rule
            if b.witness is not None:
                assert witness_ok(LINF3, alpha * np.array(x), b.witness, side, relation)


@pytest.mark.parametrize("space", [LINF3, Lp(3, 1.0), SupSum(2, Lp(2, 2.0)), SupSum(2, Lp(2, 1.0)), Lp(3, 1.5)])
@pytest.mark.parametrize("relation", ["bj", "rho_plus", "rho_minus", "rho"])
def test_kernel_matches_numpy(space, relation, monkeypatch):
    rng = np.random.default_rng(9)
    x = random_units(space, rng, 1)[0]
    Z = random_units(space, rng, 300)
    fast = symmetry._line_roots(space, x, Z, relation, 1e-7)
    monkeypatch.setattr(symmetry, "flat_layout", lambda s: None)
    slow = symmetry._line_roots(space, x, Z, relation, 1e-7)
    assert np.array_equal(np.isnan(fast), np.isnan(slow))
    assert np.allclose(fast[~np.isnan(fast)], slow[~np.isnan(slow)], atol=1e-9)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.sampled_from(["left", "right"]),
       st.sampled_from(["bj", "rho_plus", "rho_minus", "rho"]))
def test_witnesses_reverify(seed, side, relation):
    space = Lp(3, 1.0)
    x = np.random.default_rng(seed).choice([-1.0, 0.0, 0.5, 1.0], size=3)
    if not x.any():
        x[0] = 1.0
    rep = classify(SymmetryQuery(space, x, side, relation), 300, seed)
    if rep.verdict == "not_symmetric":
        assert witness_ok(space, x, rep.witness, side, relation)
    assert norm(space, x) > 0
