"""The quadratic form ``d_s d_t ||D + sA + tB||_p^2`` and why it is not a Petz metric."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._validation import check_hermitian, check_psd
from ..errors import SingularPower
from ..fd import mixed_partial


def _diag(M):
    M = np.asarray(M)
    return np.diag(M).real.astype(float) if M.ndim == 2 else M.astype(float)


def kprime_commutative(D, A, B, p):
    """Closed form for diagonal inputs:

    ``2(2-p) ||D||_p^{2-2p} Tr(D^{p-1}A) Tr(D^{p-1}B) + 2(p-1) ||D||_p^{2-p} Tr(D^{p-2}AB)``.

    Accepts diagonal matrices or their diagonals.
    """
    if not p >= 1:
        raise ValueError("p must be >= 1")
    d, a, b = _diag(D), _diag(A), _diag(B)
    if np.any(d <= 0):
        raise SingularPower("D must be strictly positive")
    norm = math.fsum(d**p) ** (1 / p)
    first = 2 * (2 - p) * norm ** (2 - 2 * p) * math.fsum(d ** (p - 1) * a) * math.fsum(d ** (p - 1) * b)
    second = 2 * (p - 1) * norm ** (2 - p) * math.fsum(d ** (p - 2) * a * b)
    return first + second


def kprime_numeric(D, A, B, p, h=1e-4):
    """``d_s d_t ||D + sA + tB||_p^2`` at the origin by a Richardson central stencil."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    D = check_psd(D, "D", strict=True)
    A, B = check_hermitian(A, "A"), check_hermitian(B, "B")

    def sq_norm(s, t):
        w = np.linalg.eigvalsh(D + s * A + t * B)
        return math.fsum(np.abs(w) ** p) ** (2 / p)

    return mixed_partial(sq_norm, h)


@dataclass
class Conjecture4Report:
    p: float
    D1: np.ndarray
    D2: np.ndarray
    K_D1: float
    K_D2: float
    difference: float
    degenerate_A: np.ndarray | None = None
    K_degenerate: float | None = None
    K_degenerate_numeric: float | None = None

    @property
    def refuted(self):
        if self.degenerate_A is not None:
            return abs(self.K_degenerate) < 1e-12
        return abs(self.difference) > 1e-3

    def as_dict(self):
        out = {
            "p": self.p,
            "D1": np.diag(self.D1).real.tolist(),
            "D2": np.diag(self.D2).real.tolist(),
            "K_D1_D1": self.K_D1,
            "K_D2_D2": self.K_D2,
            "difference": self.difference,
            "refuted": self.refuted,
        }
        if self.degenerate_A is not None:
            out["degenerate_A"] = np.diag(self.degenerate_A).real.tolist()
            out["K_A_A"] = self.K_degenerate
            out["K_A_A_numeric"] = self.K_degenerate_numeric
        return out


def refute_conjecture4(p, D1=(0.5, 0.5), D2=(0.75, 0.25)):
    """Evaluate ``K'_D(D, D) = 2 ||D||_p^2`` on two unit-trace diagonal states.

    A Petz metric would give ``f(1) Tr D = f(1)`` for both, so any difference
    rules it out. At ``p = 1`` the two values agree and the report carries
    the degenerate direction ``A = diag(1, -1, 0, ...)`` with ``K'(A, A) = 0``.
    """
    D1, D2 = np.diag(np.asarray(D1, dtype=float)), np.diag(np.asarray(D2, dtype=float))
    for D in (D1, D2):
        if abs(np.trace(D) - 1) > 1e-12:
            raise ValueError("states must have unit trace")
    k1 = kprime_commutative(D1, D1, D1, p)
    k2 = kprime_commutative(D2, D2, D2, p)
    report = Conjecture4Report(float(p), D1, D2, k1, k2, k2 - k1)
    if p == 1:
        a = np.zeros(len(D1))
        a[:2] = (1.0, -1.0)
        A = np.diag(a)
        report.degenerate_A = A
        report.K_degenerate = kprime_commutative(D1, A, A, 1.0)
        report.K_degenerate_numeric = kprime_numeric(D1, A, A, 1.0)
    return report
