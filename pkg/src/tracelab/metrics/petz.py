"""Monotone metrics, Hessians of trace functions and their monotonicity under channels."""
from __future__ import annotations

import math

import numdifftools as nd
import numpy as np

from .._validation import check_hermitian, check_matrix, check_psd, scale_of
from ..errors import NonUnitalChannel, SingularPower
from .functions import Kernel, diff_quotient, get_function, log_diff_quotient
from .superop import SuperOperator, hs_inner, q_apply, q_f

UNIT_TRACE_ATOL = 1e-10


def hessian_trace(f, D, A):
    """``d^2/ds^2 Tr f(D + sA)`` at ``s = 0``, as ``<A, Q^{D,D}_{f'[1]}(A)>``."""
    f = get_function(f)
    D = check_psd(D, "D", strict=True)
    A = check_hermitian(A, "A")
    kernel = diff_quotient(f.derivative())
    value = hs_inner(A, q_apply(D, D, kernel, A))
    if abs(value.imag) > 1e-10 * scale_of(value.real):
        raise ArithmeticError("Hessian came out complex; kernel is not real-symmetric")
    return value.real


def hessian_trace_fd(f, D, A, base_step=None):
    """Finite-difference oracle for :func:`hessian_trace`.

    ``Tr f(D + sA)`` is summed with ``math.fsum`` over ``eigvalsh`` and
    differentiated twice by adaptive Richardson extrapolation
    (``numdifftools``). Steps start at half the distance to the boundary of
    the positive cone along ``A`` and shrink geometrically.
    """
    f = get_function(f)
    D, A = check_psd(D, "D", strict=True), check_hermitian(A, "A")
    if base_step is None:
        lo = np.linalg.eigvalsh(D)[0]
        base_step = 0.5 * lo / max(np.linalg.norm(A, 2), 1e-300)

    def trace_f(s):
        return math.fsum(f(np.linalg.eigvalsh(D + s * A)))

    steps = nd.MaxStepGenerator(base_step=base_step, num_steps=12, step_ratio=1.6)
    return float(nd.Derivative(trace_f, n=2, step=steps)(0.0))


def _metric_kernel(f):
    f = get_function(f)
    return Kernel(f"1/J[{f.id}]", lambda x, y: 1.0 / (f(x / y) * y))


def petz_metric(f, D, A, B):
    """``K^f_D(A, B) = <A, (f(L_D R_D^{-1}) R_D)^{-1} B>`` (linear in ``A``)."""
    D = check_psd(D, "D", strict=True)
    if abs(np.trace(D).real - 1) > UNIT_TRACE_ATOL:
        raise ValueError("D must have unit trace")
    A, B = check_matrix(A, "A"), check_matrix(B, "B")
    return hs_inner(A, q_apply(D, D, _metric_kernel(f), B))


def _require_unital(ch):
    if not ch.is_unital:
        raise NonUnitalChannel("this check needs a unital channel")


def petz_monotonicity_check(h, ch, A, B):
    """``lambda_min`` of ``(J_h^{A,B})^{-1} - phi^* (J_h^{phi(A),phi(B)})^{-1} phi``.

    Non-negative (up to rounding) when ``h`` is operator monotone and ``phi``
    is unital and trace preserving.
    """
    _require_unital(ch)
    A, B = check_psd(A, "A", strict=True), check_psd(B, "B", strict=True)
    kernel = _metric_kernel(h)
    rhs = q_f(A, B, kernel)
    phi = SuperOperator.from_channel(ch)
    lhs = phi.adjoint() @ q_f(ch(A), ch(B), kernel) @ phi
    return (rhs - lhs).min_eigenvalue()


def thm51_check(mu, ch, A, B, X):
    """``<X, Q^{A,B}_{f'[1]} X> - <phi X, Q^{phi A, phi B}_{f'[1]} phi X>``.

    ``f''`` is the function represented by the atomic measure ``mu``.
    """
    _require_unital(ch)
    A, B = check_psd(A, "A", strict=True), check_psd(B, "B", strict=True)
    X = check_matrix(X, "X")
    K = mu.kernel()
    before = hs_inner(X, q_apply(A, B, K, X)).real
    Y = ch(X)
    after = hs_inner(Y, q_apply(ch(A), ch(B), K, Y)).real
    return before - after


def thm51_operator_check(mu, ch, A, B):
    """Operator form of :func:`thm51_check`: ``lambda_min(Q - phi^* Q' phi)``."""
    _require_unital(ch)
    A, B = check_psd(A, "A", strict=True), check_psd(B, "B", strict=True)
    K = mu.kernel()
    phi = SuperOperator.from_channel(ch)
    return (q_f(A, B, K) - phi.adjoint() @ q_f(ch(A), ch(B), K) @ phi).min_eigenvalue()


def scalar_identity_probe(mu, t, A, ch):
    """Operator gap of :func:`thm51_operator_check` with ``B = t I``.

    Here ``Q^{A, tI}`` is left multiplication by ``g(A)`` with
    ``g(x) = (f'(x) - f'(t)) / (x - t)``, so a non-negative result is the
    channel shadow of the operator convexity of ``g``.
    """
    if not t > 0:
        raise SingularPower("t must be positive")
    n = check_matrix(A).shape[0]
    return thm51_operator_check(mu, ch, A, t * np.eye(n))


def log_kernel():
    """Divided difference of ``log`` (reciprocal of the ``J_h`` kernel for ``h(x) = (x-1)/log x``)."""
    return Kernel("log[1]", log_diff_quotient)
