"""Randomized joint-convexity certification."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainViolation, NotPositive, SingularPower
from ..functionals import LambdaParams, TripleParams, lambda_abp, phi_cfl, psi_pqs
from ..sampling import DEFAULT_COND_MAX, ginibre, random_psd
from .report import TOL_CERT, CertReport, TrialResult, run_trials

FIXED_LAMBDAS = (0.25, 1 / 3, 0.5, 2 / 3, 0.75)
N_UNIFORM_LAMBDAS = 11


def _as_tuple(x):
    return tuple(x) if isinstance(x, (tuple, list)) else (x,)


def _combine(x1, x2, lam):
    return tuple(lam * a + (1 - lam) * b for a, b in zip(x1, x2))


def _eval_in_domain(f, x):
    try:
        return f(*x)
    except (NotPositive, SingularPower) as exc:
        raise DomainViolation(f"combination left the domain: {exc}") from exc


def lambda_gap(f, x1, x2, lam):
    """``lam f(x1) + (1 - lam) f(x2) - f(lam x1 + (1 - lam) x2)``; positive means convex-consistent."""
    x1, x2 = _as_tuple(x1), _as_tuple(x2)
    if len(x1) != len(x2):
        raise ValueError("inputs must have the same number of slots")
    return lam * f(*x1) + (1 - lam) * f(*x2) - _eval_in_domain(f, _combine(x1, x2, lam))


def midpoint_gap(f, x1, x2):
    """``(f(x1) + f(x2)) / 2 - f((x1 + x2) / 2)``.

    ``x1`` and ``x2`` are tuples of arguments (a bare value is treated as a
    1-tuple). Raises :class:`DomainViolation` when the midpoint leaves the
    domain of ``f``.
    """
    return lambda_gap(f, x1, x2, 0.5)


def _lambdas(rng):
    return np.concatenate([FIXED_LAMBDAS, rng.uniform(size=N_UNIFORM_LAMBDAS)])


def convexity_trial(f, x1, x2, lams):
    """Worst gap of ``f`` over the segment points ``lams`` between ``x1`` and ``x2``."""
    f1, f2 = f(*x1), f(*x2)
    scale = max(1.0, abs(f1), abs(f2))
    worst, worst_lam = np.inf, None
    for lam in lams:
        g = lam * f1 + (1 - lam) * f2 - _eval_in_domain(f, _combine(x1, x2, lam))
        if g < worst:
            worst, worst_lam = g, float(lam)
    return worst, scale, worst_lam


def certify_convexity(claim, f, sampler, trials, seed, params=None, tol=TOL_CERT, workers=None, names=None):
    """Generic certifier: ``sampler(rng)`` returns ``(f, x)`` pairs or plain inputs.

    If ``sampler`` returns a pair ``(g, x1, x2)`` the trial uses ``g``
    (useful for per-trial random fixed factors); otherwise ``f``.
    """

    def trial(rng):
        drawn = sampler(rng)
        g, x1, x2 = drawn if len(drawn) == 3 else (f, *drawn)
        gap, scale, lam = convexity_trial(g, x1, x2, _lambdas(rng))
        labels = names or [f"x{i}" for i in range(len(x1))]
        inputs = {f"{k}_1": v for k, v in zip(labels, x1)}
        inputs.update({f"{k}_2": v for k, v in zip(labels, x2)})
        inputs["lambda"] = lam
        if g is not f and hasattr(g, "factors"):
            inputs.update(g.factors)
        return TrialResult(gap, scale, inputs)

    results = run_trials(trial, seed, trials, workers)
    return CertReport.from_trials(claim, results, seed, params, tol)


class _Bound:
    """``f`` with fixed factors attached, so the witness can record them."""

    def __init__(self, func, factors):
        self.func, self.factors = func, factors

    def __call__(self, *x):
        return self.func(*x)


def certify_joint_convexity(params, n, trials, seed, random_factors=True, cond_max=DEFAULT_COND_MAX,
                            tol=TOL_CERT, workers=None):
    """Joint convexity of ``(A, B, C) -> Tr |B^{-p} K1 A K2 C^{-q}|^s`` on random triples.

    ``A`` is Ginibre, ``B`` and ``C`` are condition-capped Wishart samples.
    When the parameters carry no ``K1, K2`` and ``random_factors`` is set,
    every trial draws its own Ginibre pair.
    """
    if n > 8 or n < 1 or trials < 1:
        raise ValueError("need 1 <= n <= 8 and trials >= 1")

    def sampler(rng):
        if params.K1 is None and params.K2 is None and random_factors:
            K1, K2 = ginibre(n, rng), ginibre(n, rng)
        else:
            K1, K2 = params.factors(n)
        bound = TripleParams(params.p, params.q, params.s, K1, K2)
        g = _Bound(lambda A, B, C: psi_pqs(A, B, C, bound), {"K1": K1, "K2": K2})
        draw = lambda: (ginibre(n, rng), random_psd(n, rng, cond_max), random_psd(n, rng, cond_max))
        return g, draw(), draw()

    meta = dict(params.as_dict(), n=n, random_factors=random_factors,
                admissible=params.convexity_admissible)
    return certify_convexity("psi_pqs.joint_convexity", None, sampler, trials, seed, meta, tol, workers,
                             names=("A", "B", "C"))


def certify_lambda_convexity(params: LambdaParams, n, trials, seed, cond_max=DEFAULT_COND_MAX, tol=TOL_CERT,
                             workers=None):
    """Joint convexity of ``(P, X) -> Tr |P^{alpha/p} X P^{beta/p}|^p``."""

    def f(P, X):
        return lambda_abp(P, X, params)

    def sampler(rng):
        draw = lambda: (random_psd(n, rng, cond_max), ginibre(n, rng))
        return draw(), draw()

    meta = dict(params.as_dict(), n=n)
    return certify_convexity("lambda.joint_convexity", f, sampler, trials, seed, meta, tol, workers,
                             names=("P", "X"))


def certify_cfl_convexity(p, q, r, n, trials, seed, cond_max=DEFAULT_COND_MAX, tol=TOL_CERT, workers=None):
    """Joint convexity of ``(A, B, C) -> Tr(A^p B^{2q} A^p C^{2r})`` on random PSD triples."""

    def f(A, B, C):
        return phi_cfl(A, B, C, p, 2 * q, 2 * r)

    def sampler(rng):
        draw = lambda: tuple(random_psd(n, rng, cond_max) for _ in range(3))
        return draw(), draw()

    return certify_convexity("phi_cfl.joint_convexity", f, sampler, trials, seed, {"p": p, "q": q, "r": r, "n": n},
                             tol, workers, names=("A", "B", "C"))


@dataclass
class ScalarConvexity:
    """Verdict on the joint convexity of ``(x, y) -> x^p y^b`` on the open quadrant."""

    p: float
    b: float
    analytic: bool
    grid: bool
    witness: tuple | None
    direction: tuple | None
    min_eigenvalue: float

    @property
    def convex(self):
        return self.analytic

    def __bool__(self):
        return self.convex

    def as_dict(self):
        return {
            "p": self.p, "b": self.b, "convex": self.convex, "grid_convex": self.grid,
            "witness": self.witness, "direction": self.direction, "min_eigenvalue": self.min_eigenvalue,
        }


SCALAR_GRID = (0.5, 1.0, 2.0)


def scalar_hessian(p, x, y, b=-1.0):
    """Hessian of ``x^p y^b``."""
    f = x**p * y**b
    return np.array([
        [p * (p - 1) * f / x**2, p * b * f / (x * y)],
        [p * b * f / (x * y), b * (b - 1) * f / y**2],
    ])


def scalar_convexity_boundary(p, b=-1.0):
    """Is ``(x, y) -> x^p y^b`` jointly convex on ``(0, inf)^2``?

    The analytic answer (``p(p-1) >= 0``, ``b(b-1) >= 0`` and
    ``p b (1 - p - b) >= 0``, which for ``b = -1`` is ``p(p-2) >= 0``) is
    confirmed by Hessian eigenvalues on the grid ``{0.5, 1, 2}^2``. A
    disagreement raises ``ArithmeticError``. When not convex, the grid point
    with the most negative Hessian eigenvalue and its eigenvector are
    returned as a witness.
    """
    if not p > 0:
        raise ValueError("p must be positive")
    analytic = bool(p * (p - 1) >= 0 and b * (b - 1) >= 0 and p * b * (1 - p - b) >= 0)
    worst, witness, direction = np.inf, None, None
    for x in SCALAR_GRID:
        for y in SCALAR_GRID:
            H = scalar_hessian(p, x, y, b)
            w, V = np.linalg.eigh(H)
            rel = w[0] / max(np.abs(w).max(), 1e-300)
            if rel < worst:
                worst, witness, direction = float(rel), (x, y), tuple(float(c) for c in V[:, 0])
    grid = bool(worst >= -1e-12)
    if grid != analytic:
        raise ArithmeticError(f"Hessian grid ({grid}) disagrees with the analytic verdict ({analytic}) at p={p}")
    if analytic:
        witness = direction = None
    return ScalarConvexity(float(p), float(b), analytic, grid, witness, direction, float(worst))
