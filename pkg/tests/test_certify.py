import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracelab.certify import (
    HOLDS,
    VIOLATED,
    CertReport,
    TrialResult,
    block_swap_midpoint,
    certify_cfl_convexity,
    certify_convexity,
    certify_joint_convexity,
    certify_lambda_convexity,
    certify_lemma,
    lemma_case_p2_test,
    lemma_chain_test,
    midpoint_gap,
    monotonicity_test,
    partial_trace_scaling,
    run_trials,
    scalar_convexity_boundary,
    scalar_hessian,
    unitary_invariance_gap,
)
from tracelab.channels import identity_channel, random_mixed_unitary
from tracelab.errors import DomainViolation, NonUnitalChannel, SingularPower
from tracelab.functionals import LambdaParams, TripleParams, lambda_abp, psi_pqs
from tracelab.io import dumps
from tracelab.sampling import ginibre, random_psd

seeds = st.integers(0, 2**32 - 1)


def test_midpoint_gap_examples():
    f = lambda x: x**2
    assert midpoint_gap(f, 1.7, 1.7) == 0
    assert midpoint_gap(f, 0.0, 2.0) == 1.0


def test_midpoint_gap_domain():
    def f(x):
        if x == 0:
            raise SingularPower("pole")
        return 1 / abs(x)

    with pytest.raises(DomainViolation):
        midpoint_gap(f, 1.0, -1.0)


@given(seeds)
def test_psi_pqs_midpoint_admissible(seed):
    rng = np.random.default_rng(seed)
    params = TripleParams(0.25, 0.25, 2, K1=ginibre(3, rng), K2=ginibre(3, rng))
    f = lambda A, B, C: psi_pqs(A, B, C, params)
    x1 = (ginibre(3, rng), random_psd(3, rng), random_psd(3, rng))
    x2 = (ginibre(3, rng), random_psd(3, rng), random_psd(3, rng))
    assert midpoint_gap(f, x1, x2) >= -1e-9 * max(1, f(*x1), f(*x2))


def test_report_verdicts():
    rep = CertReport.from_trials("c", [TrialResult(-1e-6, 100.0), TrialResult(1.0, 1.0)], seed=0)
    assert rep.min_gap == pytest.approx(-1e-8) and rep.verdict == HOLDS
    bad = CertReport.from_trials("c", [TrialResult(-1e-6, 1.0)], seed=0)
    assert bad.verdict == VIOLATED and not bad.holds
    merged = rep.merge(bad)
    assert merged.trials == 3 and merged.verdict == VIOLATED
    rows = list(rep.csv_rows())
    assert rows[0] == ("trial", "gap", "scale") and len(rows) == 3
    with pytest.raises(ValueError):
        CertReport.from_trials("c", [], seed=0)


def test_run_trials_deterministic_across_workers():
    trial = lambda rng: float(rng.standard_normal())
    a = run_trials(trial, 5, 40, workers=1)
    b = run_trials(trial, 5, 40, workers=4)
    assert a == b and len(set(a)) == 40


def test_joint_convexity_holds():
    rep = certify_joint_convexity(TripleParams(0.25, 0.25, 2), 3, 60, seed=1)
    assert rep.holds and rep.trials == 60
    assert "K1" in rep.witness and "A_1" in rep.witness


def test_joint_convexity_violated_outside_range():
    # s below 1/(1 - p - q): the same certifier must be able to fail
    rep = certify_joint_convexity(TripleParams(0.25, 0.25, 1.0), 1, 200, seed=2)
    assert rep.verdict == VIOLATED


def test_certify_deterministic():
    a = certify_joint_convexity(TripleParams(0.25, 0.25, 2), 2, 20, seed=3)
    b = certify_joint_convexity(TripleParams(0.25, 0.25, 2), 2, 20, seed=3, workers=3)
    assert dumps(a.to_dict()) == dumps(b.to_dict())
    json.loads(dumps(a.to_dict()))


def test_lambda_and_cfl_convexity():
    assert certify_lambda_convexity(LambdaParams(-0.5, -0.5, 2), 3, 40, seed=0).holds
    assert certify_cfl_convexity(1, -0.25, -0.25, 3, 40, seed=0).holds


def test_generic_certifier_scalar():
    rep = certify_convexity("square", lambda x: x**2, lambda rng: ((rng.normal(),), (rng.normal(),)), 30, 0)
    assert rep.holds and rep.min_gap >= 0
    rep = certify_convexity("neg", lambda x: -(x**2), lambda rng: ((rng.normal(),), (rng.normal(),)), 30, 0)
    assert rep.verdict == VIOLATED


@pytest.mark.parametrize("p, convex", [(2, True), (3, True), (1.5, False), (1, False), (0.5, False)])
def test_scalar_boundary(p, convex):
    res = scalar_convexity_boundary(p)
    assert bool(res) is convex and res.grid is convex
    if not convex:
        x, y = res.witness
        H = scalar_hessian(p, x, y)
        v = np.array(res.direction)
        assert v @ H @ v < 0
    assert isinstance(res.as_dict()["convex"], bool)


@given(st.floats(0.1, 4), st.floats(0.1, 5), st.floats(0.1, 5))
def test_scalar_hessian_psd_iff(p, x, y):
    w = np.linalg.eigvalsh(scalar_hessian(p, x, y))
    if p * (p - 2) >= 1e-9:
        assert w[0] >= -1e-9 * abs(w).max()
    elif p * (p - 2) < -1e-6:
        assert w[0] < 0


def test_n1_matches_scalar_verdict():
    # at n = 1 Lambda is x^p / y, so the certifier agrees with the analytic boundary
    for p, expect in ((3.0, True), (1.5, False)):
        rep = certify_lambda_convexity(LambdaParams(-0.5, -0.5, p), 1, 300, seed=4)
        assert rep.holds is expect


def test_monotonicity_identity_and_unitary():
    params = TripleParams(0.25, 0.25, 2)
    rep = monotonicity_test("psi_pqs", params, "identity", 3, 10, seed=0)
    assert rep.min_gap == 0
    assert unitary_invariance_gap("psi_pqs", params, 3, seed=1) < 1e-12
    assert unitary_invariance_gap("lambda", LambdaParams(-0.5, -0.5, 2), 3, seed=1) < 1e-12


@pytest.mark.parametrize("sampler", ["mixed_unitary", "pinching", "unitary"])
def test_monotonicity_holds(sampler):
    rep = monotonicity_test("psi_pqs", TripleParams(0.2, 0.2, 2.5), sampler, 3, 30, seed=5)
    assert rep.holds
    assert monotonicity_test("lambda", LambdaParams(-0.5, -0.5, 2), sampler, 3, 30, seed=5).holds


def test_monotonicity_rejects_non_unital():
    from tracelab.channels import partial_trace_channel

    with pytest.raises(NonUnitalChannel):
        monotonicity_test("psi_pqs", TripleParams(0.25, 0.25, 2), lambda n, rng: partial_trace_channel(1), 2, 1, 0)


def test_lemma_identity_and_random():
    rng = np.random.default_rng(6)
    A, B, X = random_psd(3, rng), random_psd(3, rng), ginibre(3, rng)
    assert lemma_case_p2_test(0.5, 0.5, identity_channel(3), A, B, X) == pytest.approx(0, abs=1e-12)
    for _ in range(20):
        ch = random_mixed_unitary(3, rng)
        assert lemma_case_p2_test(0.4, 0.6, ch, A, B, X) >= -1e-9
        l1, l2 = lemma_chain_test(0.3, 0.5, ch, A, B, X)
        assert l1 >= -1e-9 and l2 >= -1e-9
    with pytest.raises(ValueError):
        lemma_case_p2_test(0.7, 0.7, identity_channel(3), A, B, X)


@pytest.mark.parametrize("alpha, beta", [(0.5, 0.5), (0.3, 0.5)])
def test_certify_lemma(alpha, beta):
    rep = certify_lemma(alpha, beta, "mixed_unitary", 3, 40, seed=7)
    assert rep.holds and rep.params["chain"] is (alpha + beta < 1)


@pytest.mark.parametrize("p", [2.0, 3.0])
def test_partial_trace_scaling(p):
    row = partial_trace_scaling(p, -0.5, -0.5, 3, seed=0)
    assert row["predicted"] == 2 ** (p - 1)
    assert row["error"] < 1e-10 and row["increases"]


def test_block_swap_midpoint():
    row = block_swap_midpoint(1.5, -0.5, -0.5, 2, seed=0)
    assert row["error"] < 1e-12


def test_lambda_scalar_domain_of_block_swap():
    P1, P2 = random_psd(2, 1), random_psd(2, 2)
    X1, X2 = ginibre(2, 3), ginibre(2, 4)
    params = LambdaParams(-0.5, -0.5, 3)
    mid = (lambda_abp(P1, X1, params) + lambda_abp(P2, X2, params)) / 2 - lambda_abp((P1 + P2) / 2, (X1 + X2) / 2, params)
    assert mid >= -1e-12
