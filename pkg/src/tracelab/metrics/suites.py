"""Seeded randomized suites over the superoperator constructions."""
from __future__ import annotations

import numpy as np

from ..certify.monotonicity import channel_sampler
from ..certify.report import CertReport, TrialResult, run_trials
from ..errors import SingularPower
from ..sampling import DEFAULT_COND_MAX, ginibre, random_hermitian, random_psd
from .functions import AtomicMeasure, catalog_ids, get_function, kernel_from_function
from .petz import hessian_trace, hessian_trace_fd, petz_monotonicity_check, thm51_check, thm51_operator_check
from .superop import hs_inner, j_f, q_apply, q_f

METRIC_TOL = 1e-9
# f'' must exist for the Hessian oracle
HESSIAN_CATALOG = ("square", "quartic", "sqrt", "inv", "log", "exp", "xlogx")


def _kraus(ch):
    return [np.asarray(K) for K in ch.kraus]


def certify_petz_monotonicity(h, sampler, n, trials, seed, cond_max=DEFAULT_COND_MAX, tol=METRIC_TOL, workers=None):
    """``lambda_min`` of the metric contraction per trial; absolute tolerance ``tol``."""
    make_channel = channel_sampler(sampler)

    def trial(rng):
        ch = make_channel(n, rng)
        A, B = random_psd(n, rng, cond_max), random_psd(n, rng, cond_max)
        return TrialResult(petz_monotonicity_check(h, ch, A, B), 1.0, {"A": A, "B": B, "kraus": _kraus(ch)})

    meta = {"h": getattr(h, "id", h), "n": n, "sampler": sampler if isinstance(sampler, str) else "custom"}
    return CertReport.from_trials("petz.monotonicity", run_trials(trial, seed, trials, workers), seed, meta, tol)


def certify_thm51(mu: AtomicMeasure, sampler, n, trials, seed, operator=False, cond_max=DEFAULT_COND_MAX,
                  tol=METRIC_TOL, workers=None):
    """Contraction of ``<X, Q_{f'[1]} X>`` under unital channels; relative tolerance ``tol``.

    With ``operator=True`` each trial also checks the superoperator order
    and records the worse of the two gaps.
    """
    make_channel = channel_sampler(sampler)
    K = mu.kernel()

    def trial(rng):
        ch = make_channel(n, rng)
        A, B, X = random_psd(n, rng, cond_max), random_psd(n, rng, cond_max), ginibre(n, rng)
        gap = thm51_check(mu, ch, A, B, X)
        scale = max(1.0, abs(hs_inner(X, q_apply(A, B, K, X)).real))
        if operator:
            gap = min(gap, thm51_operator_check(mu, ch, A, B) * scale)
        return TrialResult(gap, scale, {"A": A, "B": B, "X": X, "kraus": _kraus(ch)})

    meta = {"c": mu.c, "atoms": [list(a) for a in mu.atoms], "n": n, "operator": operator,
            "sampler": sampler if isinstance(sampler, str) else "custom"}
    return CertReport.from_trials("thm51.monotonicity", run_trials(trial, seed, trials, workers), seed, meta, tol)


def qf_jf_agreement(n, trials, seed, functions=None, cond_max=DEFAULT_COND_MAX):
    """Largest entrywise ``|J_f - Q_F| / max(1, |Q_F|)`` over random PSD pairs and catalog functions.

    Pairs on which a kernel is not representable in double precision (``exp``
    of a large eigenvalue ratio) are counted per function under
    ``"undefined"`` instead of compared.
    """
    functions = tuple(functions or catalog_ids())

    def trial(rng):
        A, B = random_psd(n, rng, cond_max), random_psd(n, rng, cond_max)
        errs = {}
        for fid in functions:
            try:
                Q = q_f(A, B, kernel_from_function(fid)).matrix
                J = j_f(A, B, fid).matrix
            except SingularPower:
                errs[fid] = None
                continue
            errs[fid] = float(np.abs(J - Q).max() / max(1.0, np.abs(Q).max()))
        return errs

    results = run_trials(trial, seed, trials)
    errors = [max([e for e in r.values() if e is not None], default=0.0) for r in results]
    per_function = {fid: max([r[fid] for r in results if r[fid] is not None], default=None) for fid in functions}
    undefined = {fid: sum(r[fid] is None for r in results) for fid in functions}
    return {"n": n, "trials": trials, "seed": seed, "functions": list(functions), "max_error": max(errors),
            "per_function": per_function, "errors": errors,
            "undefined": {k: v for k, v in undefined.items() if v}}


def hessian_fd_agreement(n, trials, seed, functions=HESSIAN_CATALOG, cond_max=DEFAULT_COND_MAX):
    """Largest relative error of :func:`hessian_trace` against its finite-difference oracle."""

    def trial(rng):
        D, A = random_psd(n, rng, cond_max), random_hermitian(n, rng)
        worst = 0.0
        for fid in functions:
            exact = hessian_trace(fid, D, A)
            worst = max(worst, abs(exact - hessian_trace_fd(fid, D, A)) / max(abs(exact), 1e-300))
        return worst

    errors = run_trials(trial, seed, trials)
    return {"n": n, "trials": trials, "seed": seed, "functions": [get_function(f).id for f in functions],
            "max_error": max(errors), "errors": errors}
