"""Trace functionals of products of matrix powers.

All functionals are pure functions of their matrix arguments. Parameters
outside the ranges where convexity or monotonicity is known are evaluated
without complaint: admissibility is exposed as a flag on the parameter
objects, because out-of-range evaluation is exactly what the optimality and
non-concavity experiments need.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_matrix, check_psd, check_same_dim
from .linalg import abs_power_trace, psd_power


@dataclass(frozen=True)
class TripleParams:
    """Exponents and fixed factors of ``Tr |B^{-p} K1 A K2 C^{-q}|^s``."""

    p: float
    q: float
    s: float
    K1: np.ndarray | None = field(default=None, compare=False)
    K2: np.ndarray | None = field(default=None, compare=False)

    @property
    def convexity_admissible(self):
        """``0 < p, q <= 1/2``, ``p + q < 1`` and ``s >= 1/(1 - p - q)``."""
        p, q, s = self.p, self.q, self.s
        return 0 < p <= 0.5 and 0 < q <= 0.5 and p + q < 1 and s >= 1 / (1 - p - q)

    @property
    def monotonicity_admissible(self):
        """``0 < p, q``, ``p + q <= 1/2`` and ``2 <= s <= 1/(p + q)``."""
        p, q, s = self.p, self.q, self.s
        return 0 < p and 0 < q and p + q <= 0.5 and 2 <= s <= 1 / (p + q)

    def factors(self, n):
        K1 = np.eye(n, dtype=np.complex128) if self.K1 is None else check_matrix(self.K1, "K1")
        K2 = np.eye(n, dtype=np.complex128) if self.K2 is None else check_matrix(self.K2, "K2")
        return K1, K2

    def as_dict(self):
        return {"p": self.p, "q": self.q, "s": self.s}


@dataclass(frozen=True)
class LambdaParams:
    """Exponents of ``Lambda(P, X) = Tr |P^{alpha/p} X P^{beta/p}|^p``."""

    alpha: float
    beta: float
    p: float

    def __post_init__(self):
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")

    @property
    def conjecture_admissible(self):
        """``alpha + beta = -1``, ``alpha in [-1, 0]`` and ``p >= 2``."""
        return abs(self.alpha + self.beta + 1) < 1e-12 and -1 <= self.alpha <= 0 and self.p >= 2

    def as_triple(self):
        """The matching ``TripleParams`` with ``B = C = P`` and ``K1 = K2 = I``."""
        return TripleParams(-self.alpha / self.p, -self.beta / self.p, self.p)

    def as_dict(self):
        return {"alpha": self.alpha, "beta": self.beta, "p": self.p}


def _pos(P, name):
    return check_psd(P, name)


def psi_pqs(A, B, C, params):
    """``Tr |B^{-p} K1 A K2 C^{-q}|^s`` for strictly positive ``B`` and ``C``."""
    A = check_matrix(A, "A")
    B, C = _pos(B, "B"), _pos(C, "C")
    check_same_dim(A, B, C, names=("A", "B", "C"))
    K1, K2 = params.factors(A.shape[0])
    M = psd_power(B, -params.p) @ K1 @ A @ K2 @ psd_power(C, -params.q)
    return float(abs_power_trace(M, params.s))


def lambda_abp(P, X, params):
    """``Tr |P^{alpha/p} X P^{beta/p}|^p`` for strictly positive ``P``."""
    P, X = _pos(P, "P"), check_matrix(X, "X")
    check_same_dim(P, X, names=("P", "X"))
    a, b, p = params.alpha, params.beta, params.p
    M = psd_power(P, a / p) @ X @ psd_power(P, b / p)
    return float(abs_power_trace(M, p))


def psi_ps(A, K1, K2, p, s):
    """``Tr |K1 A^p K2|^s``; ``A`` may be singular when ``p > 0``."""
    if p == 0:
        raise ValueError("p must be non-zero")
    A = _pos(A, "A")
    K1, K2 = check_matrix(K1, "K1"), check_matrix(K2, "K2")
    check_same_dim(A, K1, K2, names=("A", "K1", "K2"))
    return float(abs_power_trace(K1 @ psd_power(A, p, allow_singular=p > 0) @ K2, s))


def rademacher_embedding(u, r):
    """Rank-one factors turning ``psi_ps`` into ``|sum_j u_j^p r_j|^s``.

    Returns ``(A, K1, K2)`` with ``K1 = sum_j |1><j|``, ``A = diag(u)`` and
    ``K2 = sum_j r_j |j><1|``.
    """
    u = np.asarray(u, dtype=float)
    n = len(u)
    K1 = np.zeros((n, n), dtype=np.complex128)
    K1[0, :] = 1.0
    K2 = np.zeros((n, n), dtype=np.complex128)
    K2[:, 0] = np.asarray(r, dtype=float)
    return np.diag(u).astype(np.complex128), K1, K2


def phi_cfl(A, B, C, p, q2, r2):
    """``Tr(A^p B^{q2} A^p C^{r2})`` -- the trace form of ``Tr |B^{q2/2} A^p C^{r2/2}|^2``."""
    A, B, C = _pos(A, "A"), _pos(B, "B"), _pos(C, "C")
    check_same_dim(A, B, C, names=("A", "B", "C"))
    Ap = psd_power(A, p)
    return float(np.trace(Ap @ psd_power(B, q2) @ Ap @ psd_power(C, r2)).real)


def phi_cfl_schatten(A, B, C, p, q2, r2):
    """Schatten form ``Tr |B^{q2/2} A^p C^{r2/2}|^2`` of :func:`phi_cfl` (cross-check)."""
    A, B, C = _pos(A, "A"), _pos(B, "B"), _pos(C, "C")
    M = psd_power(B, q2 / 2) @ psd_power(A, p) @ psd_power(C, r2 / 2)
    return float(abs_power_trace(M, 2))


def two_var(A, B, p, q, s):
    """``Tr (B^{q/2} A^p B^{q/2})^s``."""
    A, B = _pos(A, "A"), _pos(B, "B")
    check_same_dim(A, B, names=("A", "B"))
    Bh = psd_power(B, q / 2)
    M = Bh @ psd_power(A, p) @ Bh
    w = np.clip(np.linalg.eigvalsh((M + M.conj().T) / 2), 0.0, None)
    return float(np.sum(w**s))


def remark_specialization(A, C, alpha, beta, gamma):
    """``f(A, A, C)`` for ``f(A, B, C) = Tr |B^alpha A C^beta|^gamma``."""
    return psi_pqs(A, A, C, TripleParams(-alpha, -beta, gamma))
