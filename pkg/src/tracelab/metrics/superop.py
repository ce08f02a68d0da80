"""Superoperators on ``n x n`` matrices, stored as ``n^2 x n^2`` matrices.

Vectorisation is column stacking: ``vec(A X B) = (B^T (x) A) vec(X)``.
"""
from __future__ import annotations

import numpy as np

from .._validation import check_matrix, check_psd, scale_of
from ..errors import DimMismatch, NotHermitian, SingularPower
from ..linalg import hermitian_eig
from .functions import Kernel, get_function

SYMMETRIZATION_RTOL = 1e-10


def vec(X):
    return np.asarray(X).reshape(-1, order="F")


def unvec(v, n=None):
    v = np.asarray(v)
    n = int(round(np.sqrt(v.size))) if n is None else n
    return v.reshape(n, n, order="F")


def hs_inner(X, Y):
    """Hilbert-Schmidt inner product ``<X, Y> = Tr(X Y^*)``."""
    return complex(np.vdot(vec(Y), vec(X)))


class SuperOperator:
    """A linear map on ``n x n`` complex matrices."""

    def __init__(self, matrix):
        M = np.asarray(matrix, dtype=np.complex128)
        n = int(round(np.sqrt(M.shape[0])))
        if M.ndim != 2 or M.shape != (n * n, n * n):
            raise DimMismatch(f"superoperator matrix must be n^2 x n^2, got {M.shape}")
        self.dim = n
        self.matrix = M

    def __repr__(self):
        return f"SuperOperator(dim={self.dim})"

    def __call__(self, X):
        X = check_matrix(X)
        if X.shape[0] != self.dim:
            raise DimMismatch(f"expected {self.dim}x{self.dim}, got {X.shape}")
        return unvec(self.matrix @ vec(X), self.dim)

    def __matmul__(self, other):
        return SuperOperator(self.matrix @ other.matrix)

    def __sub__(self, other):
        return SuperOperator(self.matrix - other.matrix)

    def __add__(self, other):
        return SuperOperator(self.matrix + other.matrix)

    def adjoint(self):
        """Adjoint with respect to the Hilbert-Schmidt inner product."""
        return SuperOperator(self.matrix.conj().T)

    def inverse(self):
        return SuperOperator(np.linalg.inv(self.matrix))

    def is_self_adjoint(self, rtol=SYMMETRIZATION_RTOL):
        M = self.matrix
        return bool(np.linalg.norm(M - M.conj().T) <= rtol * scale_of(np.linalg.norm(M)))

    def min_eigenvalue(self, rtol=SYMMETRIZATION_RTOL):
        """Smallest eigenvalue of the Hermitian part.

        The symmetrisation residual must be below ``rtol * scale`` first,
        otherwise the eigenvalue would not describe the operator.
        """
        M = self.matrix
        if not self.is_self_adjoint(rtol):
            raise NotHermitian("superoperator is not self-adjoint within tolerance")
        return float(np.linalg.eigvalsh((M + M.conj().T) / 2)[0])

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n * n))

    @classmethod
    def from_channel(cls, ch):
        if ch.in_dim != ch.out_dim:
            raise DimMismatch("only square channels have a superoperator on one space")
        return cls(ch.superoperator())


def left_multiplication(A):
    A = check_matrix(A, "A")
    return SuperOperator(np.kron(np.eye(A.shape[0]), A))


def right_multiplication(B):
    B = check_matrix(B, "B")
    return SuperOperator(np.kron(B.T, np.eye(B.shape[0])))


def _kernel_matrix(F, lam, mu):
    with np.errstate(all="ignore"):
        K = np.asarray(F(lam[:, None], mu[None, :]), dtype=float)
    if not np.all(np.isfinite(K)):
        raise SingularPower("kernel is undefined on the spectrum")
    return K


def q_f(A, B, F):
    """``Q_F^{A,B}(X) = sum_{j,k} F(lambda_j, mu_k) E_j^A X E_k^B``.

    Assembled from the eigendecompositions ``A = U diag(lambda) U^*`` and
    ``B = V diag(mu) V^*`` as ``W diag(vec F) W^*`` with ``W = conj(V) (x) U``.
    """
    A, B = check_psd(A, "A"), check_psd(B, "B")
    if A.shape != B.shape:
        raise DimMismatch("A and B must have the same shape")
    if not isinstance(F, Kernel):
        F = Kernel(getattr(F, "__name__", "F"), F)
    lam, U = hermitian_eig(A)
    mu, V = hermitian_eig(B)
    K = _kernel_matrix(F, lam, mu)
    W = np.kron(V.conj(), U)
    return SuperOperator((W * vec(K)) @ W.conj().T)


def q_apply(A, B, F, X):
    """Apply ``Q_F^{A,B}`` to ``X`` without assembling the superoperator."""
    A, B, X = check_psd(A, "A"), check_psd(B, "B"), check_matrix(X, "X")
    lam, U = hermitian_eig(A)
    mu, V = hermitian_eig(B)
    K = _kernel_matrix(F, lam, mu)
    return U @ (K * (U.conj().T @ X @ V)) @ V.conj().T


def j_f(A, B, f):
    """``J_f^{A,B} = f(L_A R_B^{-1}) R_B`` through the functional calculus of ``L_A R_B^{-1}``.

    ``L_A`` and ``R_B^{-1}`` are commuting positive operators, so their
    product is a positive operator on the ``n^2``-dimensional space and
    ``f`` is applied to its eigenvalues. This route shares nothing with
    :func:`q_f`, which makes the identity ``Q_F = J_f`` a real check.
    """
    f = get_function(f)
    A, B = check_psd(A, "A"), check_psd(B, "B", strict=True)
    L = left_multiplication(A).matrix
    Rinv = right_multiplication(np.linalg.inv(B)).matrix
    T = L @ Rinv
    w, Q = hermitian_eig((T + T.conj().T) / 2)
    w = np.clip(w, 0.0, None)
    with np.errstate(all="ignore"):
        fw = f(w)
    if not np.all(np.isfinite(fw)):
        raise SingularPower(f"{f.id} is undefined on the spectrum of L_A R_B^-1")
    fT = (Q * fw) @ Q.conj().T
    return SuperOperator(fT @ right_multiplication(B).matrix)


def q_inverse_identity(A, B, F):
    """``max |Q_{1/F} Q_F - Id|`` over superoperator matrix entries."""
    if not isinstance(F, Kernel):
        F = Kernel("F", F)
    inv = Kernel(f"1/{F.id}", lambda x, y: 1.0 / F(x, y))
    P = q_f(A, B, inv) @ q_f(A, B, F)
    return float(np.abs(P.matrix - np.eye(P.matrix.shape[0])).max())
