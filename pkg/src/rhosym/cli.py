"""Command-line front end.

Vectors are comma-separated decimals (``"1,-0.5,0"``); sup-sum points are
flattened block by block. ``--output json`` prints one JSON object, or one
object per line for ``scan`` and ``verify``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from dataclasses import dataclass

import numpy as np

from .derivatives import rho, rho_fd
from .operators import (
    MatrixOperator, adjoint, attainment_set, bj_left_necessary_screen, operator_norm,
    operator_omega, operator_omega_decide,
)
from .orthogonality import DEFAULT_TOL, RELATIONS, decide, decide_via_omega, omega_set
from .spaces import SpaceError, parse_space, parse_vector
from .symmetry import SIDES, SymmetryQuery, classify, exhaustive_grid_classify
from .verify import SUITES, run_suite

OUTPUTS = ("json", "csv", "text")
_NEGATIVE = re.compile(r"^-(\d|\.\d)")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    budget: int = 10_000
    tol_zero: float = DEFAULT_TOL
    output: str = "text"
    grid_step: float = 0.25

    def __post_init__(self):
        if self.budget < 1:
            raise SpaceError("--budget must be at least 1")
        if not 0 < self.tol_zero < 1e-2:
            raise SpaceError("--tol must lie in (0, 1e-2)")
        if not 0 < self.grid_step <= 1:
            raise SpaceError("--grid-step must lie in (0, 1]")
        if self.output not in OUTPUTS:
            raise SpaceError(f"--output must be one of {OUTPUTS}")


# ---------------------------------------------------------------------------
# rendering

def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    if isinstance(v, (list, tuple)):
        return "(" + ", ".join(_fmt(u) for u in v) + ")"
    return str(v)


def _flat(record):
    """One level of nesting folded into dotted keys, lists kept as text."""
    out = {}
    for k, v in record.items():
        if isinstance(v, dict):
            for k2, v2 in v.items():
                out[f"{k}.{k2}"] = v2
        else:
            out[k] = v
    return out


def emit(records, cfg: RunConfig, out, stream=False):
    """Print ``records`` (dicts) in the configured format."""
    records = [_jsonable(r) for r in records]
    if cfg.output == "json":
        if stream:
            for r in records:
                out.write(json.dumps(r) + "\n")
        else:
            out.write(json.dumps(records[0] if len(records) == 1 else records, indent=2) + "\n")
    elif cfg.output == "csv":
        rows = [_flat(r) for r in records]
        fields = []
        for r in rows:
            fields.extend(k for k in r if k not in fields)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in r.items()})
        out.write(buf.getvalue())
    else:
        for r in records:
            for k, v in _flat(r).items():
                out.write(f"{k:>16}: {_fmt(v)}\n")
            if len(records) > 1:
                out.write("\n")


# ---------------------------------------------------------------------------
# commands

def cmd_deriv(args, cfg, out):
    space = parse_space(args.space)
    x, y = parse_vector(args.x), parse_vector(args.y)
    an, fd = rho(space, x, y), rho_fd(space, x, y)
    rec = {"space": str(space), "analytic": an.as_dict(), "fd": fd.as_dict(),
           "diff": {k: abs(an.get(k) - fd.get(k)) for k in ("plus", "minus", "rho")}}
    emit([rec], cfg, out)
    return 0


def cmd_ortho(args, cfg, out):
    space = parse_space(args.space)
    v = decide(space, parse_vector(args.x), parse_vector(args.y), cfg.tol_zero)
    emit([{"space": str(space), **v.as_dict()}], cfg, out)
    return 0


def cmd_omega(args, cfg, out):
    space = parse_space(args.space)
    f, g = parse_vector(args.f), parse_vector(args.g)
    om = omega_set(space, f, g)
    v = decide_via_omega(space, f, g, cfg.tol_zero)
    emit([{"space": str(space), "omega": om.as_dict(), "verdict": v.as_dict()}], cfg, out)
    return 0


def cmd_classify(args, cfg, out):
    space = parse_space(args.space)
    q = SymmetryQuery(space, parse_vector(args.x), args.side, args.relation)
    rep = classify(q, cfg.budget, cfg.seed, cfg.tol_zero)
    emit([{"point": q.point, **rep.as_dict()}], cfg, out)
    return 0


def cmd_scan(args, cfg, out):
    space = parse_space(args.space)
    rows = exhaustive_grid_classify(space, args.side, args.relation, cfg.grid_step,
                                    cfg.budget, cfg.seed, cfg.tol_zero)
    records = [{"point": np.round(x, 12), **rep.as_dict()} for x, rep in rows]
    if cfg.output == "text":
        for r in records:
            out.write(f"{_fmt(r['point'].tolist()):<40} {r['verdict']:<14} {r.get('rule', '')}\n")
    else:
        emit(records, cfg, out, stream=True)
    return 0


def cmd_verify(args, cfg, out):
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    ok = True
    records = []
    for name in names:
        kwargs = {}
        if name in ("symmetry-grid", "operators"):
            kwargs["budget"] = cfg.budget
        if name == "symmetry-grid":
            kwargs["grid_step"] = cfg.grid_step
        res = run_suite(name, seed=cfg.seed, tol=cfg.tol_zero, **kwargs)
        ok &= res.ok
        records.extend({"suite": name, **c.as_dict()} for c in res.checks)
        records.append({"suite": name, "summary": True, "ok": res.ok,
                        "checks": len(res.checks),
                        "failed_checks": sum(not c.ok for c in res.checks)})
    if cfg.output == "text":
        for r in records:
            if r.get("summary"):
                out.write(f"== {r['suite']}: {'PASS' if r['ok'] else 'FAIL'} "
                          f"({r['checks'] - r['failed_checks']}/{r['checks']} checks)\n")
            else:
                mark = "ok  " if r["ok"] else "FAIL"
                extra = f"  {json.dumps(_jsonable(r['detail']))}" if "detail" in r else ""
                out.write(f"{mark} {r['check']}: {r['failures']} failures / {r['trials']} trials{extra}\n")
    else:
        emit(records, cfg, out, stream=True)
    return 0 if ok else 1


def load_matrix(text: str) -> MatrixOperator:
    """``{"domain": ..., "codomain": ..., "rows": [[...], ...]}`` from a file,
    ``-`` (stdin) or an inline JSON string."""
    if text == "-":
        raw = sys.stdin.read()
    elif text.lstrip().startswith("{"):
        raw = text
    else:
        with open(text) as fh:
            raw = fh.read()
    try:
        doc = json.loads(raw)
        return MatrixOperator(parse_space(doc["domain"]), parse_space(doc["codomain"]),
                              np.array(doc["rows"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SpaceError):
            raise
        raise SpaceError(f"bad matrix input: {exc}") from None


def _matrix_record(T):
    return {"domain": str(T.domain), "codomain": str(T.codomain), "rows": T.entries}


def cmd_op(args, cfg, out):
    T = load_matrix(args.matrix)
    if args.action == "norm":
        rec = {"norm": operator_norm(T)}
    elif args.action == "attain":
        rec = attainment_set(T).as_dict()
    elif args.action == "adjoint":
        A = adjoint(T)
        rec = {**_matrix_record(A), "norm": operator_norm(A), "original_norm": operator_norm(T)}
    elif args.action == "omega":
        if args.other is None:
            raise SpaceError("op omega needs a second matrix")
        S = load_matrix(args.other)
        om = operator_omega(T, S)
        rec = {"omega": om.values, "sup": om.sup, "inf": om.inf,
               "verdict": operator_omega_decide(T, S, cfg.tol_zero).as_dict()}
    else:
        rep = bj_left_necessary_screen(T, cfg.budget, cfg.seed, cfg.tol_zero)
        rec = rep.as_dict()
        emit([rec], cfg, out)
        return 0 if rep.passed else 1
    emit([rec], cfg, out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _global_flags(parser, suppress):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0))
    parser.add_argument("--budget", type=int, default=d(10_000))
    parser.add_argument("--tol", type=float, default=d(DEFAULT_TOL), help="tol_zero factor")
    parser.add_argument("--output", choices=OUTPUTS, default=d("text"))
    parser.add_argument("--grid-step", type=float, default=d(0.25))


def build_parser():
    p = argparse.ArgumentParser(prog="rhosym", description="Norm derivatives, orthogonality "
                                "relations and their symmetric points in finite dimensions.")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        _global_flags(sp, suppress=True)
        sp.set_defaults(func=func)
        return sp

    sp = add("deriv", cmd_deriv, "analytic and finite-difference rho'_+, rho'_-, rho'")
    sp.add_argument("space"); sp.add_argument("x"); sp.add_argument("y")
    sp = add("ortho", cmd_ortho, "orthogonality verdicts for x and y")
    sp.add_argument("space"); sp.add_argument("x"); sp.add_argument("y")
    sp = add("omega", cmd_omega, "Omega set of a sup-sum pair and its verdicts")
    sp.add_argument("space"); sp.add_argument("f"); sp.add_argument("g")
    sp = add("classify", cmd_classify, "left/right symmetry of a point")
    sp.add_argument("space"); sp.add_argument("x")
    sp.add_argument("side", choices=SIDES); sp.add_argument("relation", choices=RELATIONS)
    sp = add("scan", cmd_scan, "classify every grid point (dimension <= 4)")
    sp.add_argument("space")
    sp.add_argument("side", choices=SIDES); sp.add_argument("relation", choices=RELATIONS)
    sp = add("verify", cmd_verify, "run a property suite")
    sp.add_argument("suite", choices=sorted(SUITES) + ["all"])
    sp = add("op", cmd_op, "operator tools on a JSON matrix")
    sp.add_argument("action", choices=("norm", "attain", "adjoint", "omega", "screen"))
    sp.add_argument("matrix", help="JSON file, '-' for stdin, or an inline JSON object")
    sp.add_argument("other", nargs="?", help="second matrix for 'omega'")
    return p


def _protect_negatives(argv):
    # argparse would read "-1,0" as an option; a leading space keeps it positional
    return [" " + a if _NEGATIVE.match(a) and "," in a else a for a in argv]


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = _protect_negatives(list(sys.argv[1:] if argv is None else argv))
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(args.seed, args.budget, args.tol, args.output, args.grid_step)
        return args.func(args, cfg, out)
    except (SpaceError, OSError) as exc:
        sys.stderr.write(f"rhosym: error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
