"""Seeded random matrix ensembles.

All samplers take ``rng`` as anything accepted by
:func:`numpy.random.default_rng` (an int seed, a ``SeedSequence`` or a
``Generator``), so a fixed seed always reproduces the same draw.
"""
import numpy as np

DEFAULT_COND_MAX = 1e3


def as_rng(rng):
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def ginibre(n, rng=None, m=None):
    """``n x m`` matrix of i.i.d. standard complex Gaussians (``E|g|^2 = 1``)."""
    rng = as_rng(rng)
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def random_unitary(n, rng=None):
    """Haar unitary from the QR decomposition of a Ginibre matrix with phase fixing."""
    Q, R = np.linalg.qr(ginibre(n, rng))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_hermitian(n, rng=None):
    G = ginibre(n, rng)
    return (G + G.conj().T) / 2


def cap_condition(P, cond_max=DEFAULT_COND_MAX):
    """Shift a PSD matrix by a multiple of the identity so ``kappa(P) <= cond_max``."""
    w = np.linalg.eigvalsh(P)
    lo, hi = w[0], w[-1]
    if hi <= 0:
        return np.eye(len(w), dtype=np.complex128)
    if lo * cond_max < hi:
        P = P + (hi - cond_max * lo) / (cond_max - 1) * np.eye(len(w))
    return (P + P.conj().T) / 2


def random_psd(n, rng=None, cond_max=DEFAULT_COND_MAX):
    """Wishart sample ``G G^* / n`` with condition number capped at ``cond_max``."""
    G = ginibre(n, as_rng(rng))
    return cap_condition(G @ G.conj().T / n, cond_max)


def random_density(n, rng=None, cond_max=DEFAULT_COND_MAX):
    P = random_psd(n, rng, cond_max)
    return P / np.trace(P).real


def random_invertible(n, rng=None, cond_max=DEFAULT_COND_MAX):
    """Ginibre matrix redrawn until its condition number is at most ``cond_max``."""
    rng = as_rng(rng)
    while True:
        X = ginibre(n, rng)
        if np.linalg.cond(X) <= cond_max:
            return X


def dirichlet_weights(k, rng=None):
    return as_rng(rng).dirichlet(np.ones(k))
