"""Monotonicity of trace functionals under unital channels."""
from __future__ import annotations

import numpy as np

from .._validation import check_matrix, check_psd
from ..channels import (
    KrausChannel,
    identity_channel,
    pinching_channel,
    random_mixed_unitary,
    unitary_channel,
)
from ..errors import NonUnitalChannel
from ..functionals import LambdaParams, TripleParams, lambda_abp, psi_pqs
from ..linalg import psd_power
from ..sampling import DEFAULT_COND_MAX, as_rng, ginibre, random_psd, random_unitary
from .report import TOL_CERT, CertReport, TrialResult, run_trials


def _random_pinching(n, rng):
    cut = int(rng.integers(1, n)) if n > 1 else 1
    perm = rng.permutation(n)
    return pinching_channel([perm[:cut], perm[cut:]] if cut < n else [perm])


CHANNEL_SAMPLERS = {
    "identity": lambda n, rng: identity_channel(n),
    "unitary": lambda n, rng: unitary_channel(random_unitary(n, rng)),
    "mixed_unitary": lambda n, rng: random_mixed_unitary(n, rng),
    "pinching": _random_pinching,
}


def channel_sampler(name):
    """Resolve a sampler name (or pass a callable ``(n, rng) -> KrausChannel`` through)."""
    if callable(name):
        return name
    try:
        return CHANNEL_SAMPLERS[name]
    except KeyError:
        raise KeyError(f"unknown channel sampler {name!r}; known: {sorted(CHANNEL_SAMPLERS)}") from None


def _require_unital(ch: KrausChannel):
    if not ch.is_unital:
        raise NonUnitalChannel("sampled channel is not unital")
    return ch


def _monotonicity_functional(functional, params):
    if functional == "psi_pqs":
        params = params if isinstance(params, TripleParams) else TripleParams(**params)

        def draw(n, rng, cond_max):
            return ginibre(n, rng), random_psd(n, rng, cond_max), random_psd(n, rng, cond_max)

        return params, ("A", "B", "C"), draw, lambda A, B, C: psi_pqs(A, B, C, params)
    if functional == "lambda":
        params = params if isinstance(params, LambdaParams) else LambdaParams(**params)

        def draw(n, rng, cond_max):
            return random_psd(n, rng, cond_max), ginibre(n, rng)

        return params, ("P", "X"), draw, lambda P, X: lambda_abp(P, X, params)
    raise KeyError(f"unknown functional {functional!r}; expected 'psi_pqs' or 'lambda'")


def monotonicity_test(functional, params, sampler, n, trials, seed, cond_max=DEFAULT_COND_MAX, tol=TOL_CERT,
                      workers=None):
    """``f(x) - f(phi(x))`` over random inputs and random unital channels ``phi``.

    ``functional`` is ``"psi_pqs"`` (with ``TripleParams``) or ``"lambda"``
    (with ``LambdaParams``, i.e. ``B = C = P``). The channel is applied to
    every matrix slot.
    """
    params, names, draw, f = _monotonicity_functional(functional, params)
    make_channel = channel_sampler(sampler)

    def trial(rng):
        ch = _require_unital(make_channel(n, rng))
        x = draw(n, rng, cond_max)
        before = f(*x)
        after = f(*(ch(m) for m in x))
        inputs = dict(zip(names, x))
        inputs["kraus"] = [np.asarray(K) for K in ch.kraus]
        return TrialResult(before - after, max(1.0, abs(before)), inputs)

    meta = dict(params.as_dict(), functional=functional, sampler=sampler if isinstance(sampler, str) else "custom", n=n)
    if functional == "psi_pqs":
        meta["admissible"] = params.monotonicity_admissible
    else:
        meta["admissible"] = params.conjecture_admissible
    results = run_trials(trial, seed, trials, workers)
    return CertReport.from_trials(f"{functional}.monotonicity", results, seed, meta, tol)


def _lemma_side(X, A, B, alpha, beta):
    return float(np.trace(X.conj().T @ psd_power(A, -alpha) @ X @ psd_power(B, -beta)).real)


def _lemma_inputs(alpha, beta, ch, A, B, X):
    if not (0 < alpha < 1 and 0 < beta < 1 and alpha + beta <= 1 + 1e-12):
        raise ValueError("need 0 < alpha, beta < 1 and alpha + beta <= 1")
    _require_unital(ch)
    A, B = check_psd(A, "A", strict=True), check_psd(B, "B", strict=True)
    return A, B, check_matrix(X, "X")


def lemma_case_p2_test(alpha, beta, ch, A, B, X):
    """``Tr(X^* A^{-a} X B^{-b}) - Tr(phi(X)^* phi(A)^{-a} phi(X) phi(B)^{-b})``."""
    A, B, X = _lemma_inputs(alpha, beta, ch, A, B, X)
    return _lemma_side(X, A, B, alpha, beta) - _lemma_side(ch(X), ch(A), ch(B), alpha, beta)


def lemma_chain_test(alpha, beta, ch, A, B, X):
    """Both links of the reduction from ``alpha + beta < 1`` to ``alpha + beta = 1``.

    With ``B' = B^{beta / (1 - alpha)}`` (so ``B'^{-(1-alpha)} = B^{-beta}``),
    returns ``(mid - lhs, rhs - mid)`` where ``mid`` uses
    ``phi(B')^{-(1-alpha)}`` in place of ``phi(B)^{-beta}``. The first link is
    operator Jensen plus operator monotonicity, the second is the
    ``alpha + beta = 1`` case applied to ``(A, B')``.
    """
    A, B, X = _lemma_inputs(alpha, beta, ch, A, B, X)
    a = 1 - alpha
    Bp = psd_power(B, beta / a)
    lhs = _lemma_side(ch(X), ch(A), ch(B), alpha, beta)
    mid = _lemma_side(ch(X), ch(A), ch(Bp), alpha, a)
    rhs = _lemma_side(X, A, Bp, alpha, a)
    return mid - lhs, rhs - mid


def certify_lemma(alpha, beta, sampler, n, trials, seed, chain=None, cond_max=DEFAULT_COND_MAX, tol=TOL_CERT,
                  workers=None):
    """Randomized check of :func:`lemma_case_p2_test`.

    When ``alpha + beta < 1`` (or ``chain=True``) the two links of
    :func:`lemma_chain_test` are checked too and the worst of the three
    gaps is recorded.
    """
    make_channel = channel_sampler(sampler)
    chain = (alpha + beta < 1 - 1e-12) if chain is None else chain

    def trial(rng):
        ch = _require_unital(make_channel(n, rng))
        A, B, X = random_psd(n, rng, cond_max), random_psd(n, rng, cond_max), ginibre(n, rng)
        rhs = _lemma_side(X, A, B, alpha, beta)
        gaps = [lemma_case_p2_test(alpha, beta, ch, A, B, X)]
        if chain:
            gaps.extend(lemma_chain_test(alpha, beta, ch, A, B, X))
        return TrialResult(min(gaps), max(1.0, abs(rhs)), {"A": A, "B": B, "X": X,
                                                           "kraus": [np.asarray(K) for K in ch.kraus]})

    meta = {"alpha": alpha, "beta": beta, "n": n, "chain": chain,
            "sampler": sampler if isinstance(sampler, str) else "custom"}
    results = run_trials(trial, seed, trials, workers)
    return CertReport.from_trials("lemma_p2.monotonicity", results, seed, meta, tol)


def unitary_invariance_gap(functional, params, n, seed=0, cond_max=DEFAULT_COND_MAX):
    """Relative ``|f(x) - f(U x U^*)|`` for one random unitary conjugation."""
    params, _, draw, f = _monotonicity_functional(functional, params)
    rng = as_rng(seed)
    ch = unitary_channel(random_unitary(n, rng))
    x = draw(n, rng, cond_max)
    before = f(*x)
    return abs(before - f(*(ch(m) for m in x))) / max(1.0, abs(before))
