import pytest

from rhosym.spaces import INF, Lp
from rhosym.verify import SUITES, expected_symmetric, run_suite, suite_symmetry_grid

SMALL = {"oracle": 40, "james": 30, "smooth": 30, "omega": 40, "supsum-lemmas": 30,
         "identities": 40, "operators": 20}


@pytest.mark.parametrize("name", sorted(SMALL))
def test_small_runs_pass(name):
    res = run_suite(name, seed=1, trials=SMALL[name])
    assert res.ok, [c.as_dict() for c in res.checks if not c.ok]
    assert all(c.trials > 0 for c in res.checks)


def test_suite_registry():
    assert set(SUITES) == set(SMALL) | {"symmetry-grid"}
    with pytest.raises(KeyError):
        run_suite("nope")


def test_results_are_deterministic():
    a = run_suite("james", seed=7, trials=20).as_dict()
    b = run_suite("james", seed=7, trials=20).as_dict()
    assert a == b


def test_grid_suite_small():
    res = suite_symmetry_grid(seed=0, budget=1000, grid_step=0.5, dims=(2,), screens=False)
    assert res.ok and len(res.checks) == 6


def test_screen_check_small():
    res = suite_symmetry_grid(seed=0, budget=2000, grid_step=0.5, dims=(), screens=True)
    (check,) = res.checks
    assert check.ok and check.trials > 0


@pytest.mark.parametrize("x, side, relation, expected", [
    ([1, 0, 0], "left", "rho_plus", True),
    ([1, -1, 0], "left", "rho_plus", False),
    ([1, -1, 0], "left", "rho", True),
    ([1, 0.5, 0.25], "right", "rho_minus", True),
    ([1, 0.5, 0.5], "right", "rho", False),
    ([1, -1, 0.5], "right", "rho", True),
])
def test_expected_sets(x, side, relation, expected):
    import numpy as np
    assert expected_symmetric(np.array(x, float), side, relation) is expected
