"""Acceptance gate: one PASS/FAIL line per criterion at the stated trial
counts and tolerances. Run directly or through pytest."""
import time

import pytest

from rhosym.verify import (
    suite_james, suite_identities, suite_omega, suite_operators, suite_oracle,
    suite_smooth, suite_supsum_lemmas, suite_symmetry_grid,
)

SEED = 0


def _line(number, title, ok, summary):
    return f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {summary}"


def _counts(checks):
    return ", ".join(f"{c.name} {c.failures}/{c.trials}" for c in checks)


def _timed(fn, **kw):
    start = time.perf_counter()
    res = fn(seed=SEED, **kw)
    return res, time.perf_counter() - start


def criterion_1():
    res, secs = _timed(suite_oracle, trials=1000)
    ok = res.ok and secs < 10
    return ok, f"{_counts(res.checks)}; {secs:.1f}s (limit 10s)"


def criterion_2():
    res, _ = _timed(suite_james, trials=500)
    return res.ok, _counts(res.checks)


def criterion_3():
    res, _ = _timed(suite_smooth, trials=500)
    return res.ok, _counts(res.checks)


def criterion_4():
    res, _ = _timed(suite_omega, trials=1000)
    return res.ok, _counts(res.checks)


def criterion_5():
    res, _ = _timed(suite_supsum_lemmas, trials=500)
    return res.ok, _counts(res.checks)


def criterion_6():
    res, secs = _timed(suite_symmetry_grid, budget=10_000, grid_step=0.25, screens=False)
    ok = res.ok and secs < 60
    sym = ", ".join(str(c.detail.get("symmetric")) for c in res.checks)
    fails = sum(c.failures for c in res.checks)
    return ok, f"{fails} mismatches over {len(res.checks)} grids; symmetric counts {sym}; {secs:.1f}s (limit 60s)"


_operators = {}


def _operator_suite():
    if "res" not in _operators:
        _operators["res"] = suite_operators(seed=SEED, trials=200, budget=10_000)
    return _operators["res"]


def criterion_7():
    checks = [c for c in _operator_suite().checks if not c.name.startswith("bj_screen")]
    return all(c.ok for c in checks), _counts(checks)


def criterion_8():
    (check,) = [c for c in _operator_suite().checks if c.name.startswith("bj_screen")]
    return check.ok, f"{check.trials - check.failures}/{check.trials} points of M_T with verified witnesses"


def criterion_9():
    res, _ = _timed(suite_identities, trials=1000)
    return res.ok, _counts(res.checks)


CRITERIA = [
    (1, "oracle agreement", criterion_1),
    (2, "James consistency", criterion_2),
    (3, "smoothness equivalence", criterion_3),
    (4, "Omega characterization", criterion_4),
    (5, "sup-sum lemmas", criterion_5),
    (6, "symmetry grids", criterion_6),
    (7, "operator bridge", criterion_7),
    (8, "BJ operator screen", criterion_8),
    (9, "derivative identities", criterion_9),
]


@pytest.mark.parametrize("number, title, fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, summary = fn()
    with capsys.disabled():
        print("\n" + _line(number, title, ok, summary))
    assert ok, summary


if __name__ == "__main__":
    for number, title, fn in CRITERIA:
        print(_line(number, title, *fn()))
