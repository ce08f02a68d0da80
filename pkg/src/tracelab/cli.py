"""Command-line front end.

Every run is described by a :class:`RunConfig`. Flags override values from
``--config``; the resolved config is embedded in the JSON report so a run can
be replayed exactly. Exit codes:

==  =====================================================
0   claim holds / witness found / evaluation succeeded
2   usage or schema error in the input
3   domain error (e.g. a matrix that must be positive is not)
4   claim violated
5   inconclusive (search budget exhausted)
==  =====================================================
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field

import numpy as np

from . import certify as C
from . import metrics as M
from .errors import SearchExhausted, TracelabError
from .functionals import LambdaParams, TripleParams, lambda_abp, phi_cfl, psi_pqs, psi_ps, two_var
from .io import SchemaError, dumps, matrix_from_json, measure_from_json
from .sampling import random_psd

EXIT_OK, EXIT_SCHEMA, EXIT_DOMAIN, EXIT_VIOLATED, EXIT_INCONCLUSIVE = 0, 2, 3, 4, 5

DEFAULTS = {"seed": 0, "trials": 100, "budget": 100_000, "dim": 3, "tol": C.TOL_CERT}


class UsageError(SchemaError):
    pass


@dataclass
class RunConfig:
    """Everything needed to replay a run."""

    command: str
    suite: str | None = None
    params: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)
    seed: int = DEFAULTS["seed"]
    trials: int = DEFAULTS["trials"]
    budget: int = DEFAULTS["budget"]
    dim: int = DEFAULTS["dim"]
    tol: float = DEFAULTS["tol"]

    def to_dict(self):
        return asdict(self)


# -- eval ----------------------------------------------------------------------


def _inputs(cfg, *names):
    try:
        return [matrix_from_json(cfg.inputs[k]) for k in names]
    except KeyError as exc:
        raise UsageError(f"missing input matrix {exc.args[0]!r}") from None


def _num(params, key, default=None):
    if key not in params:
        if default is None:
            raise UsageError(f"missing parameter {key!r}")
        return default
    try:
        return float(params[key])
    except (TypeError, ValueError):
        raise UsageError(f"parameter {key!r} must be a number") from None


def cmd_eval(cfg):
    P = cfg.params
    which = cfg.suite
    if which == "psi_pqs":
        A, B, Cm = _inputs(cfg, "A", "B", "C")
        K = {k: matrix_from_json(cfg.inputs[k]) for k in ("K1", "K2") if k in cfg.inputs}
        value = psi_pqs(A, B, Cm, TripleParams(_num(P, "p"), _num(P, "q"), _num(P, "s"), **K))
    elif which == "lambda":
        Pm, X = _inputs(cfg, "P", "X")
        value = lambda_abp(Pm, X, LambdaParams(_num(P, "alpha"), _num(P, "beta"), _num(P, "p")))
    elif which == "psi_ps":
        A, K1, K2 = _inputs(cfg, "A", "K1", "K2")
        value = psi_ps(A, K1, K2, _num(P, "p"), _num(P, "s"))
    elif which == "phi_cfl":
        A, B, Cm = _inputs(cfg, "A", "B", "C")
        value = phi_cfl(A, B, Cm, _num(P, "p"), 2 * _num(P, "q"), 2 * _num(P, "r"))
    elif which == "two_var":
        A, B = _inputs(cfg, "A", "B")
        value = two_var(A, B, _num(P, "p"), _num(P, "q"), _num(P, "s"))
    else:
        raise UsageError(f"unknown functional {which!r}")
    return {"functional": which, "value": float(value), "text": f"{value:.17g}"}, EXIT_OK


# -- certify --------------------------------------------------------------------


def _verdict_exit(report):
    return EXIT_OK if report.holds else EXIT_VIOLATED


def cmd_certify(cfg):
    P, n, t, seed, tol = cfg.params, cfg.dim, cfg.trials, cfg.seed, cfg.tol
    suite = cfg.suite
    if suite == "joint_convexity":
        report = C.certify_joint_convexity(TripleParams(_num(P, "p"), _num(P, "q"), _num(P, "s")), n, t, seed,
                                           random_factors=bool(P.get("random_factors", True)), tol=tol)
    elif suite == "lambda_convexity":
        report = C.certify_lambda_convexity(LambdaParams(_num(P, "alpha"), _num(P, "beta"), _num(P, "p")), n, t,
                                            seed, tol=tol)
    elif suite == "cfl_convexity":
        report = C.certify_cfl_convexity(_num(P, "p"), _num(P, "q"), _num(P, "r"), n, t, seed, tol=tol)
    elif suite == "monotonicity":
        functional = P.get("functional", "psi_pqs")
        if functional == "psi_pqs":
            params = TripleParams(_num(P, "p"), _num(P, "q"), _num(P, "s"))
        else:
            params = LambdaParams(_num(P, "alpha"), _num(P, "beta"), _num(P, "p"))
        report = C.monotonicity_test(functional, params, P.get("channel", "mixed_unitary"), n, t, seed, tol=tol)
    elif suite == "lemma":
        report = C.certify_lemma(_num(P, "alpha"), _num(P, "beta"), P.get("channel", "mixed_unitary"), n, t, seed,
                                 tol=tol)
    elif suite == "remark":
        return _remark(cfg)
    else:
        raise UsageError(f"unknown certify suite {suite!r}")
    return report.to_dict(), _verdict_exit(report), report


def _remark(cfg):
    """Random sampling of the specialization first, then a search if sampling saw nothing."""
    P = cfg.params
    a, b, g = _num(P, "alpha"), _num(P, "beta"), _num(P, "gamma")
    params = TripleParams(-a, -b, g)

    def f(A, Cm):
        return psi_pqs(A, A, Cm, params)

    def sampler(rng):
        draw = lambda: (random_psd(cfg.dim, rng), random_psd(cfg.dim, rng))
        return draw(), draw()

    report = C.certify_convexity("remark.joint_convexity", f, sampler, cfg.trials, cfg.seed,
                                 {"alpha": a, "beta": b, "gamma": g, "n": cfg.dim}, cfg.tol, names=("A", "C"))
    out = report.to_dict()
    if report.holds:
        try:
            w = C.search_remark_violation(a, b, g, n=(2, 3), budget=cfg.budget, seed=cfg.seed)
        except SearchExhausted as exc:
            out["search"] = {"exhausted": str(exc)}
            return out, EXIT_INCONCLUSIVE, report
        out["search"] = w.to_dict()
        out["verdict"] = C.VIOLATED
        out["min_gap"] = -w.margin
        return out, EXIT_VIOLATED, report
    return out, EXIT_VIOLATED, report


# -- search ---------------------------------------------------------------------


def cmd_search(cfg):
    P, budget, seed = cfg.params, cfg.budget, cfg.seed
    dims = P.get("dims", [2, 3, 4])
    kind = cfg.suite
    try:
        if kind == "nonconcavity":
            w = C.search_nonconcavity(_num(P, "p"), _num(P, "s"), dims, budget, seed, bool(P.get("adjoint", False)))
        elif kind == "nonconvexity":
            w = C.search_nonconvexity(_num(P, "p"), _num(P, "s"), dims, budget, seed, bool(P.get("adjoint", False)))
        elif kind == "cfl":
            w = C.cfl_nonconcavity_check(_num(P, "p"), _num(P, "q"), _num(P, "r"), dims, budget, seed)
        elif kind == "cfl_nonconvexity":
            w = C.cfl_nonconvexity_check(_num(P, "p"), _num(P, "q"), _num(P, "r"), dims, budget, seed)
        elif kind == "remark":
            w = C.search_remark_violation(_num(P, "alpha"), _num(P, "beta"), _num(P, "gamma"),
                                          P.get("dims", [2, 3]), budget, seed)
        elif kind == "conjecture2":
            p, a = _num(P, "p"), _num(P, "alpha", -0.5)
            w = C.refute_conjecture2(p, a, -1 - a, int(P.get("n", 1)), seed)
        else:
            raise UsageError(f"unknown search {kind!r}")
    except SearchExhausted as exc:
        best = exc.best.to_dict() if exc.best is not None else None
        return {"search": kind, "found": False, "message": str(exc), "best": best}, EXIT_INCONCLUSIVE
    out = w.to_dict()
    out.update(search=kind, found=True)
    return out, EXIT_OK


# -- metrics --------------------------------------------------------------------


def _stats(gaps):
    g = np.asarray(gaps, dtype=float)
    return {"min": float(g.min()), "max": float(g.max()), "mean": float(g.mean()), "median": float(np.median(g))}


def cmd_metrics(cfg):
    P, n, t, seed = cfg.params, cfg.dim, cfg.trials, cfg.seed
    suite = cfg.suite
    if suite == "petz":
        report = M.certify_petz_monotonicity(P.get("h", "h"), P.get("channel", "mixed_unitary"), n, t, seed,
                                             tol=float(P.get("metric_tol", M.suites.METRIC_TOL)))
    elif suite == "thm51":
        mu = measure_from_json(P.get("measure", {"c": 0.0, "atoms": [[0.0, 1.0]]}))
        report = M.certify_thm51(mu, P.get("channel", "mixed_unitary"), n, t, seed,
                                 operator=bool(P.get("operator", False)),
                                 tol=float(P.get("metric_tol", M.suites.METRIC_TOL)))
    elif suite == "conjecture4":
        ps = P.get("p_values", [1.0, 1.0 + 1e-6, 1.5, 2.0, 3.0])
        table = [M.refute_conjecture4(float(p)).as_dict() for p in ps]
        return {"suite": suite, "table": table}, EXIT_OK
    elif suite == "qf_jf":
        out = M.qf_jf_agreement(n, t, seed)
        ok = out["max_error"] <= 1e-10
        return dict(out, suite=suite, passed=ok), EXIT_OK if ok else EXIT_VIOLATED
    elif suite == "hessian":
        out = M.hessian_fd_agreement(n, t, seed)
        ok = out["max_error"] < 1e-5
        return dict(out, suite=suite, passed=ok), EXIT_OK if ok else EXIT_VIOLATED
    else:
        raise UsageError(f"unknown metrics suite {suite!r}")
    out = report.to_dict()
    out["suite"] = suite
    out["gap_stats"] = _stats([g / s for g, s in report.gaps])
    return out, _verdict_exit(report), report


# -- demo -----------------------------------------------------------------------


def cmd_demo(cfg):
    P, seed = cfg.params, cfg.seed
    suite = cfg.suite
    a = _num(P, "alpha", -0.5)
    b = _num(P, "beta", -1 - a)
    if suite == "partial_trace":
        rows = [C.partial_trace_scaling(float(p), a, b, cfg.dim, seed) for p in P.get("p_values", [2.0, 3.0])]
        ok = all(r["error"] < 1e-10 for r in rows)
        return {"demo": suite, "rows": rows, "passed": ok}, EXIT_OK if ok else EXIT_VIOLATED
    if suite == "block_swap":
        r = C.block_swap_midpoint(_num(P, "p", 1.5), a, b, cfg.dim, seed)
        ok = r["error"] < 1e-12
        return {"demo": suite, "row": r, "passed": ok}, EXIT_OK if ok else EXIT_VIOLATED
    if suite == "conjecture2":
        try:
            w = C.refute_conjecture2(_num(P, "p", 1.5), a, b, int(P.get("n", 1)), seed)
        except SearchExhausted as exc:
            return {"demo": suite, "found": False, "message": str(exc)}, EXIT_INCONCLUSIVE
        return {"demo": suite, "found": True, "witness": w.to_dict()}, EXIT_OK
    raise UsageError(f"unknown demo {suite!r}")


COMMANDS = {"eval": cmd_eval, "certify": cmd_certify, "search": cmd_search, "metrics": cmd_metrics, "demo": cmd_demo}
SUITES = {
    "eval": ["psi_pqs", "lambda", "psi_ps", "phi_cfl", "two_var"],
    "certify": ["joint_convexity", "lambda_convexity", "cfl_convexity", "monotonicity", "lemma", "remark"],
    "search": ["nonconcavity", "nonconvexity", "cfl", "cfl_nonconvexity", "remark", "conjecture2"],
    "metrics": ["petz", "thm51", "conjecture4", "qf_jf", "hessian"],
    "demo": ["partial_trace", "block_swap", "conjecture2"],
}


# -- plumbing -------------------------------------------------------------------


def _parse_param(text):
    if "=" not in text:
        raise UsageError(f"--param expects key=value, got {text!r}")
    key, raw = text.split("=", 1)
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


EPILOG = """exit codes: 0 holds / witness found, 2 usage or schema error, 3 domain error,
4 claim violated, 5 search exhausted.
environment: TRACELAB_THREADS sets the worker threads for randomized trials
(default 1); reports do not depend on it."""


def build_parser():
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(prog="tracelab", description="Evaluate, certify and search trace functionals.",
                                     epilog=EPILOG, formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, formatter_class=fmt, epilog=EPILOG,
                           help=f"{name} suites: {', '.join(SUITES[name])}")
        p.add_argument("suite", nargs="?", choices=SUITES[name], help="what to run (or set 'suite' in --config)")
        p.add_argument("--config", help="JSON run config; flags override its values")
        p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                       help="set a parameter (VALUE parsed as JSON when possible)")
        p.add_argument("--seed", type=int, help=f"root seed (default {DEFAULTS['seed']})")
        p.add_argument("--trials", type=int, help=f"random trials (default {DEFAULTS['trials']})")
        p.add_argument("--budget", type=int, help=f"search evaluations (default {DEFAULTS['budget']})")
        p.add_argument("--dim", type=int, help=f"matrix dimension (default {DEFAULTS['dim']})")
        p.add_argument("--tol", type=float, help=f"certification tolerance (default {DEFAULTS['tol']})")
        p.add_argument("--out", help="write the JSON report here (atomically) instead of stdout")
        p.add_argument("--csv", help="write per-trial gaps (trial, gap, scale) here")
    return parser


def resolve_config(args):
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
        if data.get("command", args.command) != args.command:
            raise UsageError(f"config is for {data['command']!r}, not {args.command!r}")
    unknown = set(data) - set(RunConfig.__dataclass_fields__)
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    data["command"] = args.command
    if args.suite:
        data["suite"] = args.suite
    if not data.get("suite"):
        raise UsageError(f"no suite given; choose from {SUITES[args.command]}")
    if data["suite"] not in SUITES[args.command]:
        raise UsageError(f"unknown suite {data['suite']!r}")
    params = dict(data.get("params", {}))
    params.update(_parse_param(t) for t in args.param)
    data["params"] = params
    for key in ("seed", "trials", "budget", "dim", "tol"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    cfg = RunConfig(**data)
    if cfg.trials < 1 or cfg.budget < 1 or cfg.dim < 1:
        raise UsageError("trials, budget and dim must be positive")
    return cfg


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tracelab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(report):
    buf = _io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(report.csv_rows())
    return buf.getvalue()


def run(cfg):
    """Execute a config; returns ``(payload, exit_code, report_or_None)``."""
    result = COMMANDS[cfg.command](cfg)
    payload, code = result[0], result[1]
    report = result[2] if len(result) > 2 else None
    payload = dict(payload)
    payload["config"] = cfg.to_dict()
    return payload, code, report


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        payload, code, report = run(cfg)
    except SchemaError as exc:
        print(f"tracelab: input error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (TracelabError, ValueError, KeyError) as exc:
        print(f"tracelab: domain error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    text = dumps(payload)
    if args.csv:
        if report is None:
            print("tracelab: this command has no per-trial gaps for --csv", file=sys.stderr)
            return EXIT_SCHEMA
    # outputs are only written once everything has been computed
    if args.csv:
        _atomic_write(args.csv, _csv_text(report))
    if args.out:
        _atomic_write(args.out, text)
    if cfg.command == "eval":
        print(payload["text"])
    elif not args.out:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
