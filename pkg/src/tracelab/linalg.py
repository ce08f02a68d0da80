"""Dense complex linear algebra used by every trace functional.

Two eigen/singular-value routes are available:

* ``method="lapack"`` (default) delegates to ``numpy.linalg``; it is fast and
  supports stacked inputs.
* ``method="jacobi"`` runs a self-contained cyclic complex Jacobi solver.
  It is used as an independent second route when search witnesses are
  re-verified, and to cross-check LAPACK in the test-suite.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from ._validation import (
    INVERTIBLE_RTOL,
    PSD_RTOL,
    check_hermitian,
    check_matrix,
)
from .errors import BadExponent, NoConvergence, NotPositive, SingularPower

JACOBI_OFF_RTOL = 1e-14
SVD_RANK_RTOL = 1e-13


class EigenDecomposition(NamedTuple):
    """Ascending eigenvalues and unitary eigenvector matrix (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        U = self.eigenvectors
        return (U * self.eigenvalues) @ U.conj().T


class SvdResult(NamedTuple):
    """``X = U diag(sigma) V^*`` with ``sigma`` descending."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self):
        return (self.U * self.sigma) @ self.V.conj().T


def jacobi_eigh(M, max_rotations=None):
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Parameters
    ----------
    M : (n, n) array_like
        Hermitian input (not re-validated here).
    max_rotations : int, optional
        Rotation budget, default ``30 * n**2``.

    Returns
    -------
    EigenDecomposition
        Eigenvalues in ascending order.
    """
    A = np.array(M, dtype=np.complex128)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    budget = 30 * n * n if max_rotations is None else max_rotations
    norm = np.linalg.norm(A)
    target = JACOBI_OFF_RTOL * norm
    rotations = 0

    def off(A):
        return np.linalg.norm(A - np.diag(np.diag(A)))

    while n > 1 and off(A) > target:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag < 1e-18 * norm:
                    continue
                if rotations >= budget:
                    raise NoConvergence(f"Jacobi exceeded {budget} rotations")
                rotations += 1
                e = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # A <- J^* A J with J_pp = J_qq = c, J_pq = s e, J_qp = -s conj(e)
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * np.conj(e) * cq
                A[:, q] = s * e * cp + c * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * e * rq
                A[q, :] = s * np.conj(e) * rp + c * rq
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * np.conj(e) * vq
                V[:, q] = s * e * vp + c * vq
    w = np.diag(A).real
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], V[:, order])


def hermitian_eig(M, method="lapack"):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises
    ------
    NotHermitian
        If ``M`` deviates from Hermitian by more than ``1e-12 ||M||_F``.
    NoConvergence
        If the solver fails.
    """
    M = check_hermitian(M)
    if method == "jacobi":
        return jacobi_eigh(M)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    try:
        w, U = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(str(exc)) from exc
    return EigenDecomposition(w, U)


def _complete_unitary(U, k):
    """Extend the first ``k`` orthonormal columns of ``U`` to a full unitary."""
    n = U.shape[0]
    if k >= n:
        return U
    basis = U[:, :k]
    # project the standard basis out of span(basis), keep the best-conditioned directions
    rest = np.eye(n, dtype=np.complex128) - basis @ basis.conj().T
    Q, _, _ = np.linalg.svd(rest)
    return np.concatenate([basis, Q[:, : n - k]], axis=1)


def svd(X, method="lapack"):
    """Singular value decomposition with descending ``sigma``.

    ``method="eig"`` builds the SVD from :func:`hermitian_eig` of ``X^* X``
    (Jacobi route) and completes ``U`` for singular values below
    ``1e-13 sigma_max``.
    """
    X = check_matrix(X)
    if method == "lapack":
        try:
            U, s, Vh = np.linalg.svd(X)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise NoConvergence(str(exc)) from exc
        return SvdResult(U, s, Vh.conj().T)
    if method != "eig":
        raise ValueError(f"unknown method {method!r}")
    w, V = jacobi_eigh(X.conj().T @ X)
    w, V = w[::-1], V[:, ::-1]
    sigma = np.sqrt(np.clip(w, 0.0, None))
    keep = sigma > SVD_RANK_RTOL * max(sigma[0], np.finfo(float).tiny)
    k = int(np.count_nonzero(keep))
    U = np.zeros_like(X)
    U[:, :k] = (X @ V[:, :k]) / sigma[:k]
    # re-orthonormalise the kept columns against rounding
    if k:
        Qk, Rk = np.linalg.qr(U[:, :k])
        U[:, :k] = Qk * np.sign(np.diag(Rk).real + (np.diag(Rk).real == 0))
    U = _complete_unitary(U, k)
    return SvdResult(U, sigma, V)


def singular_values(X):
    """Singular values of ``X`` (stacked input allowed), descending."""
    X = np.asarray(X, dtype=np.complex128)
    try:
        return np.linalg.svd(X, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NoConvergence(str(exc)) from exc


def polar(X, method="lapack"):
    """Polar decomposition ``X = U |X|`` with ``U`` unitary.

    For rank-deficient ``X`` the partial isometry is completed to a unitary
    through the SVD's full left singular basis.
    """
    res = svd(X, method=method)
    U = res.U @ res.V.conj().T
    absX = (res.V * res.sigma) @ res.V.conj().T
    return U, (absX + absX.conj().T) / 2


def matrix_power(P, t, method="lapack", allow_singular=False):
    """``P**t`` for a positive semi-definite ``P`` via its eigendecomposition.

    Negative or non-integer ``t`` require ``lambda_min > 1e-12 lambda_max``
    unless ``allow_singular`` is set and ``t > 0`` (eigenvalues are then
    clipped at zero).
    """
    w, U = hermitian_eig(P, method=method)
    return _power_from_eig(w, U, float(t), allow_singular)


def _power_from_eig(w, U, t, allow_singular=False):
    top = max(abs(w[-1]), abs(w[0]), np.finfo(float).tiny)
    if w[0] < -PSD_RTOL * max(top, 1.0):
        raise NotPositive(f"matrix is not positive semi-definite (lambda_min={w[0]:.3e})")
    if t == 0.0:
        return np.eye(len(w), dtype=np.complex128)
    if not (t.is_integer() and t > 0):
        singular = not (w[0] > INVERTIBLE_RTOL * top and w[0] > 0)
        if singular and not (allow_singular and t > 0):
            raise SingularPower(f"power {t:g} needs a strictly positive matrix (lambda_min={w[0]:.3e})")
        w = np.clip(w, 0.0, None)
    out = (U * w**t) @ U.conj().T
    return (out + out.conj().T) / 2


def psd_power(P, t, allow_singular=False):
    """Unvalidated fast path of :func:`matrix_power` for inner loops.

    ``P`` must already be a Hermitian complex128 array.
    """
    w, U = np.linalg.eigh(P)
    return _power_from_eig(w, U, float(t), allow_singular)


def regularize(X, eps=None):
    """``X + eps*I`` with default ``eps = 1e-8 ||X||`` (operator norm)."""
    X = check_matrix(X)
    if eps is None:
        eps = 1e-8 * max(float(singular_values(X)[0]), 1.0)
    return X + eps * np.eye(X.shape[0])


def abs_power_trace(X, s):
    """``Tr |X|^s = sum_i sigma_i(X)^s``; stacked input returns an array."""
    if not s > 0:
        raise BadExponent(f"s must be positive, got {s}")
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim == 2:
        X = check_matrix(X)
    sigma = singular_values(X)
    return np.sum(sigma**s, axis=-1)


def abs_power_trace_compensated(X, s):
    """Independent re-evaluation of ``Tr |X|^s``.

    Singular values come from the Jacobi solver applied to ``X^* X`` and are
    accumulated with ``math.fsum``; nothing is shared with the LAPACK path.
    """
    if not s > 0:
        raise BadExponent(f"s must be positive, got {s}")
    X = check_matrix(X)
    w = jacobi_eigh(X.conj().T @ X).eigenvalues
    return math.fsum(float(v) ** (s / 2) for v in np.clip(w, 0.0, None))


def schatten_norm(X, p):
    """Schatten ``p``-norm for ``p >= 1``; ``p = inf`` is the operator norm."""
    if p == np.inf:
        return float(singular_values(check_matrix(X))[0])
    if not p >= 1:
        raise BadExponent(f"Schatten norm needs p >= 1, got {p}; use abs_power_trace")
    return float(abs_power_trace(X, p)) ** (1.0 / p)
