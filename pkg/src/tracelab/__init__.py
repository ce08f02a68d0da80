"""Numerical laboratory for convexity and monotonicity of matrix trace functionals."""
from . import certify, channels, errors, functionals, io, linalg, metrics, sampling, variational
from .channels import KrausChannel, block_swap_channel, mixed_unitary, partial_trace_channel, pinching_channel
from .errors import TracelabError
from .functionals import LambdaParams, TripleParams, lambda_abp, phi_cfl, psi_pqs, psi_ps, two_var
from .linalg import abs_power_trace, hermitian_eig, matrix_power, polar, schatten_norm, svd
from .variational import ExponentQuad, variational_max_check, variational_min_check

__version__ = "0.1.0"
