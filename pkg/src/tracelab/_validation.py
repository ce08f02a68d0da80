"""Input validation helpers.

Every public entry point funnels its matrix arguments through these checks so
that downstream code can assume finite, square, complex128 arrays.
"""
import numpy as np

from .errors import DimMismatch, NotHermitian, NotPositive, SingularPower

HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-10
INVERTIBLE_RTOL = 1e-12


def scale_of(*values):
    """``max(1, |v_1|, |v_2|, ...)`` -- the reference scale for relative tolerances."""
    out = 1.0
    for v in values:
        v = np.abs(np.asarray(v))
        if v.size:
            out = max(out, float(v.max()))
    return out


def check_matrix(X, name="X"):
    """Return ``X`` as a finite square complex128 array."""
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] < 1:
        raise DimMismatch(f"{name} must be a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} has non-finite entries")
    return X


def check_same_dim(*mats, names=None):
    dims = {m.shape for m in mats}
    if len(dims) > 1:
        label = ", ".join(names) if names else "inputs"
        raise DimMismatch(f"{label} have mismatched shapes {sorted(dims)}")


def check_hermitian(M, name="M"):
    """Validate Hermiticity within ``1e-12 * ||M||_F`` and return the symmetrized matrix."""
    M = check_matrix(M, name)
    fro = np.linalg.norm(M)
    if np.linalg.norm(M - M.conj().T) > HERMITIAN_RTOL * max(fro, np.finfo(float).tiny):
        raise NotHermitian(f"{name} is not Hermitian")
    return (M + M.conj().T) / 2


def check_psd(P, name="P", strict=False):
    """Validate that ``P`` is positive semi-definite (or definite when ``strict``).

    Returns the symmetrized matrix. Strictness means
    ``lambda_min > 1e-12 * lambda_max``; this is the same floor used by
    fractional and negative powers.
    """
    P = check_hermitian(P, name)
    w = np.linalg.eigvalsh(P)
    top = max(abs(w[-1]), abs(w[0]))
    if w[0] < -PSD_RTOL * max(top, 1.0):
        raise NotPositive(f"{name} is not positive semi-definite (lambda_min={w[0]:.3e})")
    if strict and not (w[0] > INVERTIBLE_RTOL * top and w[0] > 0):
        raise SingularPower(f"{name} is not strictly positive (lambda_min={w[0]:.3e})")
    return P


def check_invertible(X, name="X"):
    X = check_matrix(X, name)
    s = np.linalg.svd(X, compute_uv=False)
    if not s[-1] > INVERTIBLE_RTOL * s[0]:
        raise SingularPower(f"{name} is numerically singular")
    return X
