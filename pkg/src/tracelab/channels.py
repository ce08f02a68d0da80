"""Quantum channels in Kraus form.

Tensor products fuse indices system-first with column-major ordering, i.e.
index ``i + n_sys * a`` for system index ``i`` and ancilla index ``a``. With
that convention ``H (x) C^2`` is laid out as 2 x 2 blocks of ``n x n``
matrices, and the partial trace over the ancilla sums the diagonal blocks.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ._validation import check_matrix
from .errors import BadPartition, BadWeights, DimMismatch, NotUnitary
from .sampling import as_rng, dirichlet_weights, random_unitary

CHANNEL_ATOL = 1e-10

__all__ = [
    "KrausChannel",
    "apply",
    "identity_channel",
    "unitary_channel",
    "mixed_unitary",
    "block_swap_channel",
    "partial_trace_channel",
    "pinching_channel",
    "random_unitary",
    "random_mixed_unitary",
]


class KrausChannel:
    """Completely positive map ``X -> sum_i K_i X K_i^*``.

    Trace preservation and unitality are checked once at construction and
    stored as flags; the Kraus list is copied and made read-only.
    """

    def __init__(self, kraus: Sequence[np.ndarray]):
        ops = [np.array(K, dtype=np.complex128) for K in kraus]
        if not ops:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(K.shape != shape or K.ndim != 2 for K in ops):
            raise DimMismatch("Kraus operators must share one 2-D shape")
        if not all(np.all(np.isfinite(K)) for K in ops):
            raise ValueError("Kraus operators must be finite")
        for K in ops:
            K.setflags(write=False)
        self.kraus = tuple(ops)
        self.out_dim, self.in_dim = shape
        tp = sum(K.conj().T @ K for K in ops)
        self.is_trace_preserving = bool(np.abs(tp - np.eye(self.in_dim)).max() < CHANNEL_ATOL)
        if self.in_dim == self.out_dim:
            un = sum(K @ K.conj().T for K in ops)
            self.is_unital = bool(np.abs(un - np.eye(self.out_dim)).max() < CHANNEL_ATOL)
        else:
            self.is_unital = False

    def __repr__(self):
        return (
            f"KrausChannel(in_dim={self.in_dim}, out_dim={self.out_dim}, terms={len(self.kraus)}, "
            f"tp={self.is_trace_preserving}, unital={self.is_unital})"
        )

    def __call__(self, X):
        return apply(self, X)

    def adjoint(self, Y):
        """Hilbert-Schmidt adjoint ``Y -> sum_i K_i^* Y K_i``."""
        Y = check_matrix(Y, "Y")
        if Y.shape[0] != self.out_dim:
            raise DimMismatch(f"expected {self.out_dim}x{self.out_dim} input, got {Y.shape}")
        return sum(K.conj().T @ Y @ K for K in self.kraus)

    @property
    def is_ucptp(self):
        return self.is_trace_preserving and self.is_unital

    def superoperator(self):
        """Matrix of the channel on column-stacked vectorisations."""
        return sum(np.kron(K.conj(), K) for K in self.kraus)

    def compose(self, other):
        """``self o other`` (apply ``other`` first)."""
        if other.out_dim != self.in_dim:
            raise DimMismatch("cannot compose channels with mismatched dimensions")
        return KrausChannel([K @ L for K in self.kraus for L in other.kraus])

    def tensor(self, ancilla):
        """``self (x) ancilla`` with system-first, column-major index fusion."""
        return KrausChannel([np.kron(L, K) for K in self.kraus for L in ancilla.kraus])

    def to_dict(self):
        from .io import matrix_to_json

        return {
            "in_dim": self.in_dim,
            "out_dim": self.out_dim,
            "kraus": [matrix_to_json(K) for K in self.kraus],
        }

    @classmethod
    def from_dict(cls, data):
        from .io import matrix_from_json

        ch = cls([matrix_from_json(K) for K in data["kraus"]])
        if (ch.in_dim, ch.out_dim) != (data["in_dim"], data["out_dim"]):
            raise DimMismatch("declared dimensions disagree with the Kraus operators")
        return ch


def apply(ch, X):
    """``sum_i K_i X K_i^*``."""
    X = check_matrix(X, "X")
    if X.shape[0] != ch.in_dim:
        raise DimMismatch(f"channel expects {ch.in_dim}x{ch.in_dim} input, got {X.shape}")
    return sum(K @ X @ K.conj().T for K in ch.kraus)


def identity_channel(n):
    return KrausChannel([np.eye(n)])


def _check_unitary(U):
    U = check_matrix(U, "U")
    if np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() > CHANNEL_ATOL:
        raise NotUnitary("matrix is not unitary within 1e-10")
    return U


def unitary_channel(U):
    return KrausChannel([_check_unitary(U)])


def mixed_unitary(weights, unitaries):
    """``X -> sum_i w_i U_i X U_i^*``; always unital and trace preserving."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or len(w) != len(unitaries) or len(w) == 0:
        raise BadWeights("need one weight per unitary")
    if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise BadWeights("weights must be a probability vector")
    Us = [_check_unitary(U) for U in unitaries]
    return KrausChannel([np.sqrt(wi) * U for wi, U in zip(w, Us) if wi > 0])


def block_swap(n):
    """The ``2n x 2n`` permutation exchanging the two ``n x n`` blocks."""
    S = np.zeros((2 * n, 2 * n))
    S[:n, n:] = np.eye(n)
    S[n:, :n] = np.eye(n)
    return S


def block_swap_channel(n):
    """``X -> (X + S X S) / 2`` on ``2n x 2n`` matrices, ``S`` the block swap."""
    if n < 1:
        raise ValueError("n must be positive")
    return mixed_unitary([0.5, 0.5], [np.eye(2 * n), block_swap(n)])


def partial_trace_channel(n):
    """Trace over the ``C^2`` factor of ``C^n (x) C^2``: ``[[A, C], [D, B]] -> A + B``.

    Trace preserving but not unital.
    """
    if n < 1:
        raise ValueError("n must be positive")
    K0 = np.zeros((n, 2 * n))
    K0[:, :n] = np.eye(n)
    K1 = np.zeros((n, 2 * n))
    K1[:, n:] = np.eye(n)
    return KrausChannel([K0, K1])


def pinching_channel(blocks, n=None):
    """Conditional expectation onto block-diagonal matrices.

    ``blocks`` is a partition of ``range(n)`` (0-based indices).
    """
    blocks = [sorted(int(i) for i in b) for b in blocks]
    flat = sorted(i for b in blocks for i in b)
    n = len(flat) if n is None else n
    if flat != list(range(n)) or any(not b for b in blocks):
        raise BadPartition(f"{blocks} is not a partition of range({n})")
    ops = []
    for b in blocks:
        P = np.zeros((n, n))
        P[b, b] = 1.0
        ops.append(P)
    return KrausChannel(ops)


def random_mixed_unitary(n, rng=None, terms=(2, 6)):
    """Mixed-unitary channel with a random number of Haar terms and Dirichlet weights."""
    rng = as_rng(rng)
    k = int(rng.integers(terms[0], terms[1] + 1))
    w = dirichlet_weights(k, rng)
    return mixed_unitary(w / w.sum(), [random_unitary(n, rng) for _ in range(k)])
