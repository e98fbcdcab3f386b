"""Property suites over random and structured instances.

Every suite returns a :class:`SuiteResult` made of named checks with trial
and failure counts; the CLI prints them and the acceptance tests assert on
them. All randomness comes from ``numpy.random.SeedSequence(seed)`` spawned
per check, so a check's outcome does not depend on which other checks ran.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from .derivatives import rho, rho_fd, orthogonalize
from .operators import (
    MatrixOperator, adjoint, bj_left_necessary_screen, from_l1_columns, operator_norm,
    operator_omega_decide, supsum_space, to_supsum,
)
from .orthogonality import (
    DEFAULT_TOL, bj_interval, bj_minimization_check, decide, decide_via_omega,
)
from .spaces import INF, Lp, SupSum, active_set, dim, norm
from .symmetry import (
    FastPathContradiction, SymmetryQuery, _is_witness, _rho_screen,
    exhaustive_grid_classify, find_counterexample,
)

LP_EXPONENTS = (1.0, 1.5, 2.0, 4.0, INF)
FAMILIES = ("l1", "l1.5", "l2", "l4", "linf", "supsum")
RELATIONS_RHO = ("rho_plus", "rho_minus", "rho")


@dataclass
class CheckResult:
    name: str
    trials: int
    failures: int
    detail: Dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def as_dict(self):
        return {"check": self.name, "trials": self.trials, "failures": self.failures,
                "ok": self.ok, **({"detail": self.detail} if self.detail else {})}


@dataclass
class SuiteResult:
    name: str
    checks: List[CheckResult]
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def as_dict(self):
        # timing stays out so that identical runs serialize identically
        return {"suite": self.name, "ok": self.ok, "checks": [c.as_dict() for c in self.checks]}


def _rngs(seed, count):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


# ---------------------------------------------------------------------------
# random instances

def family_space(rng, family: str):
    if family == "supsum":
        p = LP_EXPONENTS[rng.integers(len(LP_EXPONENTS))]
        return SupSum(int(rng.integers(1, 5)), Lp(int(rng.integers(1, 4)), p))
    p = {"l1": 1.0, "l1.5": 1.5, "l2": 2.0, "l4": 4.0, "linf": INF}[family]
    return Lp(int(rng.integers(1, 7)), p)


def _polyhedral(space):
    return isinstance(space, Lp) and (space.p is INF or space.p == 1.0)


def structured_point(rng, space):
    """A nonzero point with exact ties and zeros where they create kinks:
    coordinates in ``{0, +-1/2, +-1}`` for ``l1``/``linf``, equal block norms
    (and zero coordinates inside polyhedral blocks) for sup-sums."""
    while True:
        if isinstance(space, SupSum):
            d = dim(space.inner)
            blocks = np.array([structured_point(rng, space.inner) if _polyhedral(space.inner)
                               else rng.standard_normal(d) for _ in range(space.count)])
            bn = np.array([norm(space.inner, b) for b in blocks])
            blocks = blocks / bn[:, None]
            scale = rng.choice([0.0, 0.5, 1.0, 1.0], size=space.count)
            x = (blocks * scale[:, None]).reshape(-1)
        elif _polyhedral(space):
            x = rng.choice([-1.0, -0.5, 0.0, 0.5, 1.0], size=space.dim)
        else:
            x = rng.standard_normal(space.dim)
        if np.any(x):
            return x * rng.uniform(0.5, 2.0)


def random_point(rng, space, structured=None):
    if structured is None:
        structured = rng.random() < 0.5
    if structured:
        return structured_point(rng, space)
    while True:
        x = rng.standard_normal(dim(space))
        if np.any(x):
            return x


def _bj_pair(rng, space, x):
    """``y`` with ``x perp_B y``: shift a random ``z`` into the BJ interval.

    When the shift cancels ``z`` (always in dimension 1, where only 0 is
    orthogonal to ``x``) the result is rounding noise; a random ``y`` is
    returned instead.
    """
    z = random_point(rng, space, structured=False)
    lo, hi = bj_interval(space, x, z)
    y = z - rng.uniform(lo, hi) * x
    if norm(space, y) <= 1e-8 * norm(space, z):
        return random_point(rng, space, structured=False)
    return y


# ---------------------------------------------------------------------------
# suites

def suite_oracle(seed=0, trials=1000, tol=DEFAULT_TOL) -> SuiteResult:
    checks = []
    for family, rng in zip(FAMILIES, _rngs(seed, len(FAMILIES))):
        bad, worst = 0, 0.0
        for _ in range(trials):
            space = family_space(rng, family)
            x, y = random_point(rng, space), random_point(rng, space)
            an, fd = rho(space, x, y), rho_fd(space, x, y)
            for a, b in ((an.rho_plus, fd.rho_plus), (an.rho_minus, fd.rho_minus)):
                err = abs(a - b) / (1 + abs(a))
                worst = max(worst, err)
                bad += err > 1e-5
        checks.append(CheckResult(f"analytic_vs_fd[{family}]", trials, int(bad),
                                  {"max_rel_err": worst}))
    return SuiteResult("oracle", checks)


def suite_james(seed=0, trials=500, tol=DEFAULT_TOL) -> SuiteResult:
    checks = []
    incl_bad = incl_n = 0
    for family, rng in zip(FAMILIES, _rngs(seed, len(FAMILIES))):
        bad = 0
        for i in range(trials):
            space = family_space(rng, family)
            x = random_point(rng, space)
            y = _bj_pair(rng, space, x) if i % 2 else random_point(rng, space)
            if not np.any(y):
                y = random_point(rng, space, structured=False)
            v = decide(space, x, y, tol)
            bad += v.bj != bj_minimization_check(space, x, y, tol)
            incl_n += 1
            incl_bad += v.rho_orth and not v.bj
        checks.append(CheckResult(f"bj_vs_minimization[{family}]", trials, int(bad)))
    checks.append(CheckResult("rho_implies_bj", incl_n, int(incl_bad)))
    return SuiteResult("james", checks)


def suite_smooth(seed=0, trials=500, tol=DEFAULT_TOL) -> SuiteResult:
    checks = []
    for p, rng in zip((2.0, 3.0), _rngs(seed, 2)):
        space = Lp(3, p)
        bad = kept = 0
        worst = 0.0
        while kept < trials:
            x = random_point(rng, space, structured=False)
            y = orthogonalize(space, x, random_point(rng, space, structured=False), "rho")
            v = decide(space, x, y, tol)
            if not v.bj:
                continue
            kept += 1
            worst = max(worst, abs(v.triple.rho))
            bad += abs(v.triple.rho) > 1e-6 or not v.rho_orth
        checks.append(CheckResult(f"bj_implies_rho[{space}]", trials, int(bad),
                                  {"max_abs_rho": worst}))
    space, x, y = Lp(3, 1.0), np.array([1.0, 0, 0]), np.array([1.0, 1, 0])
    v = decide(space, x, y, tol)
    fd = rho_fd(space, x, y)
    ok = v.bj and not v.rho_orth and abs(v.triple.rho - 1) <= 1e-12 and abs(fd.rho - 1) <= 1e-6
    checks.append(CheckResult("l1_witness", 1, int(not ok), {
        "space": str(space), "x": x.tolist(), "y": y.tolist(), **v.triple.as_dict(),
        "fd_rho": fd.rho, "bj": v.bj}))
    return SuiteResult("smooth", checks)


_OMEGA_INNERS = (Lp(1, INF), Lp(2, 2.0), Lp(2, 1.0))


def _supsum_pair(rng, space):
    f = structured_point(rng, space)
    if not np.any(f):
        f = random_point(rng, space, structured=False)
    mode = rng.integers(4)
    if mode == 0:
        g = random_point(rng, space)
    else:
        z = random_point(rng, space, structured=False)
        if mode == 3:
            lo, hi = bj_interval(space, f, z)
            g = z - rng.uniform(lo, hi) * f
        else:
            g = orthogonalize(space, f, z, ("plus", "minus", "rho")[mode - 1])
    return f, g


def suite_omega(seed=0, trials=1000, tol=DEFAULT_TOL) -> SuiteResult:
    checks = []
    for inner, rng in zip(_OMEGA_INNERS, _rngs(seed, len(_OMEGA_INNERS))):
        bad, holds = 0, np.zeros(4, dtype=int)
        for _ in range(trials):
            space = SupSum(int(rng.integers(2, 5)), inner)
            f, g = _supsum_pair(rng, space)
            if not np.any(g):
                continue
            a, b = decide(space, f, g, tol).flags(), decide_via_omega(space, f, g, tol).flags()
            bad += a != b
            holds += np.array(a, dtype=int)
        checks.append(CheckResult(f"omega_vs_decide[{inner}]", trials, int(bad),
                                  {"true_counts": dict(zip(("bj", "rho_plus", "rho_minus", "rho"),
                                                           holds.tolist()))}))
    return SuiteResult("omega", checks)


def suite_supsum_lemmas(seed=0, trials=500, tol=DEFAULT_TOL) -> SuiteResult:
    rng_a, rng_b = _rngs(seed, 2)
    # singleton active set {k0}: each rho relation reduces to block k0
    bad = 0
    for _ in range(trials):
        inner = _OMEGA_INNERS[rng_a.integers(len(_OMEGA_INNERS))]
        space = SupSum(int(rng_a.integers(2, 5)), inner)
        d = dim(inner)
        blocks = np.array([random_point(rng_a, inner) for _ in range(space.count)])
        bn = np.array([norm(inner, b) for b in blocks])
        k0 = int(rng_a.integers(space.count))
        blocks = blocks / bn[:, None] * rng_a.uniform(0, 0.9, size=(space.count, 1))
        blocks[k0] /= norm(inner, blocks[k0])
        f = blocks.reshape(-1)
        g = random_point(rng_a, space, structured=False)
        if rng_a.random() < 0.5:
            mode = ("plus", "minus", "rho")[rng_a.integers(3)]
            g[k0 * d:(k0 + 1) * d] = orthogonalize(inner, blocks[k0], g[k0 * d:(k0 + 1) * d], mode)
        if not np.any(g[k0 * d:(k0 + 1) * d]):
            continue
        outer = decide(space, f, g, tol)
        local = decide(inner, blocks[k0], g[k0 * d:(k0 + 1) * d], tol)
        bad += any(outer.holds(r) != local.holds(r) for r in RELATIONS_RHO)
    singleton = CheckResult("singleton_active_set", trials, int(bad))

    # f perp_{rho+} g forces some active block to be rho+-orthogonal
    bad = 0
    for _ in range(trials):
        inner = _OMEGA_INNERS[rng_b.integers(len(_OMEGA_INNERS))]
        space = SupSum(int(rng_b.integers(2, 5)), inner)
        f = structured_point(rng_b, space)
        g = orthogonalize(space, f, random_point(rng_b, space, structured=False), "plus")
        if not np.any(g) or not decide(space, f, g, tol).rho_plus_orth:
            bad += 1
            continue
        d = dim(inner)
        found = False
        for k in active_set(space, f):
            gk = g[k * d:(k + 1) * d]
            fk = f[k * d:(k + 1) * d]
            if not np.any(gk) or decide(inner, fk, gk, tol).rho_plus_orth:
                found = True
                break
        bad += not found
    lemma1 = CheckResult("rho_plus_active_block", trials, int(bad))
    return SuiteResult("supsum-lemmas", [singleton, lemma1])


def expected_symmetric(x, side, relation, eps=1e-9) -> bool:
    """Closed-form symmetric sets for a unit vector of ``linf(n)``."""
    a = np.abs(x)
    one, zero = a >= 1 - eps, a <= eps
    if relation in ("rho_plus", "rho_minus"):
        return bool(one.sum() == 1 and (one | zero).all()) if side == "left" else bool(not zero.any())
    if side == "left":
        return bool((one | zero).all())
    low = np.sort(a[~one])
    return bool(not zero.any() and np.all(np.diff(low) > eps))


GRID_COMBOS = (("left", "rho_plus"), ("left", "rho_minus"), ("right", "rho_plus"),
               ("right", "rho_minus"), ("left", "rho"), ("right", "rho"))


def suite_symmetry_grid(seed=0, budget=10_000, grid_step=0.25, tol=DEFAULT_TOL,
                        dims=(2, 3), screens=True) -> SuiteResult:
    checks = []
    for n in dims:
        space = Lp(n, INF)
        for side, relation in GRID_COMBOS:
            bad, sym, details = 0, 0, []
            try:
                rows = exhaustive_grid_classify(space, side, relation, grid_step, budget, seed, tol)
            except FastPathContradiction as exc:
                checks.append(CheckResult(f"grid[{space},{side},{relation}]", 1, 1,
                                          {"contradiction": str(exc)}))
                continue
            for x, rep in rows:
                want = expected_symmetric(x, side, relation)
                got = rep.verdict
                sym += got == "symmetric"
                ok = (got == "symmetric") == want and rep.rule is not None
                if got == "not_symmetric":
                    ok &= _is_witness(space, x, rep.witness, side, relation, tol)
                elif got != "symmetric":
                    ok = False
                if not ok:
                    bad += 1
                    if len(details) < 5:
                        details.append({"x": x.tolist(), "verdict": got, "expected_symmetric": want})
            detail = {"symmetric": sym}
            if details:
                detail["mismatches"] = details
            checks.append(CheckResult(f"grid[{space},{side},{relation}]", len(rows), bad, detail))
    if screens:
        checks.append(_screen_check(seed, budget, tol))
    return SuiteResult("symmetry-grid", checks)


def _screen_check(seed, budget, tol, grid_step=0.5):
    """Points of sup(2, l2(2)) failing a rho necessary condition have witnesses."""
    space = SupSum(2, Lp(2, 2.0))
    from .symmetry import grid_candidates
    seen, trials, bad = set(), 0, 0
    for x in grid_candidates(space, grid_step):
        key = tuple(np.round(x, 12))
        if key in seen:
            continue
        seen.add(key)
        for side in ("left", "right"):
            if _rho_screen(space, x, side, budget, seed, tol) is not False:
                continue
            trials += 1
            y = find_counterexample(SymmetryQuery(space, x, side, "rho"), budget, seed, tol)
            bad += y is None
    return CheckResult(f"rho_screens[{space}]", trials, bad)


def _random_operator_pair(rng, codomain):
    T = from_l1_columns([random_point(rng, codomain, structured=False) for _ in range(3)], codomain)
    cols = T.entries.T.copy()
    if rng.random() < 0.5:  # tie the column norms to get larger attainment sets
        tie = rng.random(3) < 0.5
        tie[rng.integers(3)] = True
        top = max(norm(codomain, c) for c in cols)
        for i in np.flatnonzero(tie):
            cols[i] *= top / norm(codomain, cols[i])
        T = from_l1_columns(cols, codomain)
    space = supsum_space(T)
    f = to_supsum(T)
    z = random_point(rng, space, structured=False)
    mode = rng.integers(4)
    g = z if mode == 0 else orthogonalize(space, f, z, ("plus", "minus", "rho")[mode - 1])
    S = from_l1_columns(g.reshape(3, dim(codomain)), codomain)
    return T, S


def suite_operators(seed=0, trials=200, tol=DEFAULT_TOL, budget=10_000) -> SuiteResult:
    checks = []
    for codomain, rng in zip((Lp(2, INF), Lp(2, 2.0)), _rngs(seed, 2)):
        iso = omega = adj = 0
        worst = 0.0
        for _ in range(trials):
            T, S = _random_operator_pair(rng, codomain)
            if not np.any(S.entries):
                continue
            nt = operator_norm(T)
            err = abs(nt - norm(supsum_space(T), to_supsum(T)))
            worst = max(worst, err)
            iso += err > 1e-12
            a = operator_omega_decide(T, S, tol).flags()
            b = decide_via_omega(supsum_space(T), to_supsum(T), to_supsum(S), tol).flags()
            omega += a != b
            adj += abs(operator_norm(adjoint(T)) - nt) > 1e-9
        checks.append(CheckResult(f"norm_isometry[l1(3)->{codomain}]", trials, int(iso),
                                  {"max_err": worst}))
        checks.append(CheckResult(f"omega_agreement[l1(3)->{codomain}]", trials, int(omega)))
        checks.append(CheckResult(f"adjoint_norm[l1(3)->{codomain}]", trials, int(adj)))

    E = MatrixOperator(Lp(3, 2.0), Lp(3, 1.0), np.eye(3))
    rep = bj_left_necessary_screen(E, budget, seed, tol)
    bad = 0
    for x, tx, r in rep.checks:
        w = r.witness
        ok = (r.verdict == "not_symmetric" and w is not None
              and decide(E.codomain, tx, w, tol).bj and not decide(E.codomain, w, tx, tol).bj)
        bad += not ok
    if not rep.checks:
        bad += 1
    checks.append(CheckResult("bj_screen[l2(3)->l1(3) identity]", len(rep.checks), int(bad),
                              {"attainment_points": [x.tolist() for x, _, _ in rep.checks]}))
    return SuiteResult("operators", checks)


def suite_identities(seed=0, trials=1000, tol=DEFAULT_TOL) -> SuiteResult:
    rngs = _rngs(seed, 5)
    fams = FAMILIES

    def cases(rng):
        for i in range(trials):
            space = family_space(rng, fams[i % len(fams)])
            yield space, random_point(rng, space), random_point(rng, space)

    bad = 0
    for space, x, y in cases(rngs[0]):
        a, b = rngs[0].uniform(0.1, 10, size=2)
        t, s = rho(space, x, y), rho(space, a * x, b * y)
        scale = a * b * norm(space, x) * norm(space, y)
        bad += any(abs(u - a * b * v) > 1e-10 * scale for u, v in
                   ((s.rho_plus, t.rho_plus), (s.rho_minus, t.rho_minus), (s.rho, t.rho)))
    homog = CheckResult("homogeneity", trials, int(bad))

    bad = 0
    for space, x, y in cases(rngs[1]):
        scale = norm(space, x) * norm(space, y)
        bad += abs(rho(space, -x, y).rho_plus + rho(space, x, y).rho_minus) > 1e-10 * scale
    flip = CheckResult("sign_flip", trials, int(bad))

    bad = 0
    for space, x, y in cases(rngs[2]):
        s = rngs[2].uniform(-2, 2)
        nx = norm(space, x)
        scale = nx * (norm(space, y) + abs(s) * nx)
        bad += abs(rho(space, x, y + s * x).rho_plus - rho(space, x, y).rho_plus - s * nx ** 2) > 1e-8 * scale
    transl = CheckResult("translation", trials, int(bad))

    bad = 0
    for space, x, y in cases(rngs[3]):
        t = rho(space, x, y)
        lim = norm(space, x) * norm(space, y) + 1e-10
        bad += abs(t.rho_plus) > lim or abs(t.rho_minus) > lim
    bound = CheckResult("bound", trials, int(bad))

    bad = 0
    for space, x, y in cases(rngs[4]):
        t = rho(space, x, y)
        bad += not (t.rho_minus <= t.rho <= t.rho_plus)
    order = CheckResult("ordering", trials, int(bad))
    return SuiteResult("identities", [homog, flip, transl, bound, order])


SUITES: Dict[str, Callable[..., SuiteResult]] = {
    "oracle": suite_oracle,
    "james": suite_james,
    "smooth": suite_smooth,
    "omega": suite_omega,
    "supsum-lemmas": suite_supsum_lemmas,
    "symmetry-grid": suite_symmetry_grid,
    "operators": suite_operators,
    "identities": suite_identities,
}


def run_suite(name: str, seed: int = 0, tol: float = DEFAULT_TOL, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    start = time.perf_counter()
    result = SUITES[name](seed=seed, tol=tol, **kwargs)
    result.seconds = time.perf_counter() - start
    return result
