"""Variational formulas for Schatten quantities and their exact optimisers.

For exponents with ``1/r0 = 1/r1 + 1/r2 + 1/r3`` and invertible matrices,

    Tr|X^{-1} B Y^{-1}|^{r2} >= (r2/r0) Tr|ABC|^{r0}
                                - (r2/r1) Tr|AX|^{r1} - (r2/r3) Tr|YC|^{r3},

with equality at an explicit pair ``(A, C)`` built from the polar
decomposition of ``W = X^{-1} B Y^{-1}``. Read the other way round, the same
bound expresses ``Tr|ABC|^{r0}`` as a minimum over ``(X, Y)``. The checks in
this module evaluate both sides at the closed-form optimum and probe random
multiplicative perturbations of it.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_invertible, check_same_dim, scale_of
from .linalg import abs_power_trace, polar, psd_power
from .sampling import as_rng, ginibre

PROBE_DELTA = 1e-2
N_PROBES = 100


@dataclass(frozen=True)
class ExponentQuad:
    r0: float
    r1: float
    r2: float
    r3: float

    def __post_init__(self):
        r = (self.r0, self.r1, self.r2, self.r3)
        if not all(v > 0 for v in r):
            raise ValueError(f"exponents must be positive, got {r}")
        if abs(1 / self.r0 - (1 / self.r1 + 1 / self.r2 + 1 / self.r3)) > 1e-12 * max(1.0, 1 / self.r0):
            raise ValueError(f"1/r0 must equal 1/r1 + 1/r2 + 1/r3, got {r}")

    @classmethod
    def from_triple(cls, p, q, s):
        """``(r, 1/p, s, 1/q)`` with ``1/r = p + q + 1/s``."""
        return cls(1 / (p + q + 1 / s), 1 / p, s, 1 / q)

    @classmethod
    def completing(cls, r0, r2, split=0.5):
        """Pick ``r1, r3`` so that ``1/r1 + 1/r3 = 1/r0 - 1/r2`` (``split`` goes to ``r1``)."""
        rest = 1 / r0 - 1 / r2
        if rest <= 0:
            raise ValueError("need r2 > r0")
        return cls(r0, 1 / (split * rest), r2, 1 / ((1 - split) * rest))

    def as_tuple(self):
        return (self.r0, self.r1, self.r2, self.r3)


@dataclass
class SaturationReport:
    lhs: float
    rhs: float
    gap: float
    A: np.ndarray = field(repr=False)
    C: np.ndarray = field(repr=False)
    probe_excess: float = -np.inf
    probes: int = 0

    @property
    def saturated(self):
        return abs(self.gap) < 1e-8

    @property
    def probes_ok(self):
        return self.probe_excess <= 1e-9


def holder_young_lower_bound(A, B, C, X, Y, quad):
    """Both sides of the Hölder + Young bound.

    Returns ``(lhs, rhs)`` with ``lhs = Tr|X^{-1} B Y^{-1}|^{r2}`` and
    ``rhs = (r2/r0) Tr|ABC|^{r0} - (r2/r1) Tr|AX|^{r1} - (r2/r3) Tr|YC|^{r3}``.
    """
    X, Y = check_invertible(X, "X"), check_invertible(Y, "Y")
    A, B, C = (np.asarray(M, dtype=np.complex128) for M in (A, B, C))
    check_same_dim(A, B, C, X, Y)
    r0, r1, r2, r3 = quad.as_tuple()
    lhs = abs_power_trace(np.linalg.solve(X, B) @ np.linalg.inv(Y), r2)
    rhs = (
        (r2 / r0) * abs_power_trace(A @ B @ C, r0)
        - (r2 / r1) * abs_power_trace(A @ X, r1)
        - (r2 / r3) * abs_power_trace(Y @ C, r3)
    )
    return float(lhs), float(rhs)


def saturating_pair(X, B, Y, quad):
    """Closed-form maximiser ``(A, C)`` of the lower bound.

    With ``W = X^{-1} B Y^{-1} = U|W|``: ``A = |W|^{r2/r1} U^* X^{-1}`` and
    ``C = Y^{-1} |W|^{r2/r3}``.
    """
    X, B, Y = (check_invertible(M, name) for M, name in ((X, "X"), (B, "B_mid"), (Y, "Y")))
    _, r1, r2, r3 = quad.as_tuple()
    W = np.linalg.solve(X, B) @ np.linalg.inv(Y)
    U, absW = polar(W)
    A = psd_power(absW, r2 / r1) @ U.conj().T @ np.linalg.inv(X)
    C = np.linalg.solve(Y, psd_power(absW, r2 / r3))
    return A, C


def minimizing_pair(A, B, C, quad):
    """Closed-form minimiser ``(X, Y)`` of the min-form.

    With ``M = ABC = V|M|``: ``X = A^{-1} V |M|^{r0/r1}`` and
    ``Y = |M|^{r0/r3} C^{-1}``, so that ``AX``, ``X^{-1}BY^{-1}`` and ``YC`` are
    ``V|M|^{r0/r1}``, ``|M|^{r0/r2}`` and ``|M|^{r0/r3}``.
    """
    A, B, C = (check_invertible(M, name) for M, name in ((A, "A"), (B, "B_mid"), (C, "C")))
    r0, r1, _, r3 = quad.as_tuple()
    V, absM = polar(A @ B @ C)
    X = np.linalg.solve(A, V @ psd_power(absM, r0 / r1))
    Y = psd_power(absM, r0 / r3) @ np.linalg.inv(C)
    return X, Y


def _perturb(M, rng, count, delta):
    n = M.shape[0]
    G = np.stack([ginibre(n, rng) for _ in range(count)])
    return M @ (np.eye(n) + delta * G)


def min_form_value(A, B, C, X, Y, quad):
    """``(r0/r1) Tr|AX|^{r1} + (r0/r2) Tr|X^{-1}BY^{-1}|^{r2} + (r0/r3) Tr|YC|^{r3}``.

    ``X`` and ``Y`` may be stacked along a leading axis.
    """
    r0, r1, r2, r3 = quad.as_tuple()
    W = np.linalg.solve(X, B) @ np.linalg.inv(Y)
    return (
        (r0 / r1) * abs_power_trace(A @ X, r1)
        + (r0 / r2) * abs_power_trace(W, r2)
        + (r0 / r3) * abs_power_trace(Y @ C, r3)
    )


def variational_max_check(B, X, Y, quad, n_probes=N_PROBES, delta=PROBE_DELTA, rng=0):
    """Evaluate the max-form at its closed-form optimum and probe around it.

    ``probe_excess`` is the largest ``(rhs(A', C') - lhs) / scale`` over
    random perturbations ``A' = A(1 + delta G)``, ``C' = C(1 + delta G')``.
    """
    A, C = saturating_pair(X, B, Y, quad)
    lhs, rhs = holder_young_lower_bound(A, B, C, X, Y, quad)
    scale = scale_of(lhs)
    report = SaturationReport(lhs, rhs, (lhs - rhs) / scale, A, C)
    if n_probes:
        rng = as_rng(rng)
        r0, r1, r2, r3 = quad.as_tuple()
        Ap, Cp = _perturb(A, rng, n_probes, delta), _perturb(C, rng, n_probes, delta)
        vals = (
            (r2 / r0) * abs_power_trace(Ap @ B @ Cp, r0)
            - (r2 / r1) * abs_power_trace(Ap @ X, r1)
            - (r2 / r3) * abs_power_trace(Y @ Cp, r3)
        )
        report.probe_excess = float(np.max(vals - lhs)) / scale
        report.probes = n_probes
    return report


def variational_min_check(A, B, C, quad, n_probes=N_PROBES, delta=PROBE_DELTA, rng=0):
    """Evaluate the min-form of ``Tr|ABC|^{r0}`` at its closed-form optimum.

    ``lhs = Tr|ABC|^{r0}``, ``rhs`` is the min-form objective at the optimal
    ``(X, Y)``. ``probe_excess`` is the largest ``(lhs - objective(X', Y')) / scale``
    over perturbed ``(X', Y')``; it must stay non-positive up to rounding.
    The report's ``A`` and ``C`` slots hold the optimal ``X`` and ``Y``.
    """
    X, Y = minimizing_pair(A, B, C, quad)
    A, B, C = (np.asarray(M, dtype=np.complex128) for M in (A, B, C))
    lhs = float(abs_power_trace(A @ B @ C, quad.r0))
    rhs = float(min_form_value(A, B, C, X, Y, quad))
    scale = scale_of(lhs)
    report = SaturationReport(lhs, rhs, (lhs - rhs) / scale, X, Y)
    if n_probes:
        rng = as_rng(rng)
        Xp, Yp = _perturb(X, rng, n_probes, delta), _perturb(Y, rng, n_probes, delta)
        vals = min_form_value(A, B, C, Xp, Yp, quad)
        report.probe_excess = float(np.max(lhs - vals)) / scale
        report.probes = n_probes
    return report
