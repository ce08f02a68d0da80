"""Randomized certification and counterexample search."""
from .convexity import (
    FIXED_LAMBDAS,
    ScalarConvexity,
    certify_cfl_convexity,
    certify_convexity,
    certify_joint_convexity,
    certify_lambda_convexity,
    lambda_gap,
    midpoint_gap,
    scalar_convexity_boundary,
    scalar_hessian,
)
from .demos import block_swap_midpoint, partial_trace_scaling
from .monotonicity import (
    CHANNEL_SAMPLERS,
    certify_lemma,
    lemma_case_p2_test,
    lemma_chain_test,
    monotonicity_test,
    unitary_invariance_gap,
)
from .report import HOLDS, INCONCLUSIVE, TOL_CERT, VIOLATED, CertReport, SearchWitness, TrialResult, run_trials
from .search import (
    Layout,
    block_swap_gap,
    cfl_nonconcavity_check,
    cfl_nonconvexity_check,
    refute_conjecture2,
    run_search,
    search_nonconcavity,
    search_nonconvexity,
    search_remark_violation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
