"""Superoperator calculus, monotone metrics and Hessians of trace functions."""
from .conjecture4 import Conjecture4Report, kprime_commutative, kprime_numeric, refute_conjecture4
from .functions import (
    AtomicMeasure,
    Kernel,
    ScalarFunction,
    catalog_ids,
    constant_kernel,
    diff_quotient,
    get_function,
    h_operator_monotone_quadrature,
    kernel_from_function,
    log_diff_quotient,
    power_function,
    reciprocal,
)
from .petz import (
    hessian_trace,
    hessian_trace_fd,
    log_kernel,
    petz_metric,
    petz_monotonicity_check,
    scalar_identity_probe,
    thm51_check,
    thm51_operator_check,
)
from .suites import (
    certify_petz_monotonicity,
    certify_thm51,
    hessian_fd_agreement,
    qf_jf_agreement,
)
from .superop import (
    SuperOperator,
    hs_inner,
    j_f,
    left_multiplication,
    q_apply,
    q_f,
    q_inverse_identity,
    right_multiplication,
    unvec,
    vec,
)

__all__ = [name for name in dir() if not name.startswith("_")]
