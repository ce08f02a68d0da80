"""Scripted constructions around Lambda and unital / non-unital channels."""
from __future__ import annotations

import numpy as np

from ..channels import partial_trace_channel
from ..functionals import LambdaParams, lambda_abp
from ..sampling import as_rng, ginibre, random_psd
from .search import block_swap_gap


def partial_trace_scaling(p, alpha=-0.5, beta=-0.5, n=2, seed=0):
    """Measured ``Lambda(Tr_2 P', Tr_2 X') / Lambda(P, X)`` for ``P' = P (+) P``, ``X' = X (+) X``.

    The partial trace doubles both arguments, so the ratio is
    ``2^(alpha + beta + p)``; when that exceeds 1 the (non-unital) partial
    trace increases ``Lambda``.
    """
    rng = as_rng(seed)
    params = LambdaParams(alpha, beta, p)
    P, X = random_psd(n, rng), ginibre(n, rng)
    # C^n (x) C^2 with the C^2 index slow: block-diagonal copies
    Pp = np.kron(np.eye(2), P)
    Xp = np.kron(np.eye(2), X)
    ch = partial_trace_channel(n)
    measured = lambda_abp(ch(Pp), ch(Xp), params) / lambda_abp(P, X, params)
    predicted = 2.0 ** (alpha + beta + p)
    return {
        "p": p, "alpha": alpha, "beta": beta, "n": n, "seed": seed,
        "measured": measured, "predicted": predicted, "error": abs(measured - predicted),
        "increases": measured > 1,
    }


def block_swap_midpoint(p, alpha=-0.5, beta=-0.5, n=2, seed=0):
    """Check that the block-swap monotonicity gap is twice the midpoint-convexity gap."""
    rng = as_rng(seed)
    params = LambdaParams(alpha, beta, p)
    P1, P2 = random_psd(n, rng), random_psd(n, rng)
    X1, X2 = ginibre(n, rng), ginibre(n, rng)
    gap, before, after, _, _ = block_swap_gap(P1, X1, P2, X2, params)
    f = lambda P, X: lambda_abp(P, X, params)
    midpoint = (f(P1, X1) + f(P2, X2)) / 2 - f((P1 + P2) / 2, (X1 + X2) / 2)
    return {
        "p": p, "alpha": alpha, "beta": beta, "n": n, "seed": seed,
        "block_swap_gap": gap, "twice_midpoint_gap": 2 * midpoint,
        "error": abs(gap - 2 * midpoint) / max(1.0, abs(before)),
    }
