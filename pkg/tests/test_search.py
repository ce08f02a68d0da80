import numpy as np
import pytest

from tracelab.certify import (
    block_swap_gap,
    cfl_nonconcavity_check,
    cfl_nonconvexity_check,
    refute_conjecture2,
    search_nonconcavity,
    search_nonconvexity,
    search_remark_violation,
)
from tracelab.channels import block_swap_channel
from tracelab.errors import SearchExhausted
from tracelab.functionals import LambdaParams, lambda_abp, phi_cfl, psi_ps, remark_specialization
from tracelab.sampling import ginibre, random_psd


def midpoint_excess(f, x1, x2):
    """``f(mid) - avg`` relative to ``max |f|``, recomputed from public functionals."""
    f1, f2 = f(*x1), f(*x2)
    fm = f(*[(a + b) / 2 for a, b in zip(x1, x2)])
    return (fm - (f1 + f2) / 2) / max(abs(f1), abs(f2), abs(fm))


def check_witness(w):
    assert w.margin > 1e-6 and w.verified_margin >= 0.5 * w.margin and w.conclusive
    d = w.to_dict()
    assert d["reverified"] and d["claim"] == w.claim


def test_nonconcavity_witness():
    w = search_nonconcavity(0.3, 3, budget=100_000, seed=0)
    check_witness(w)
    m = w.matrices
    f = lambda A: psi_ps(A, m["K1"], m["K2"], 0.3, 3)
    assert -midpoint_excess(f, (m["A1"],), (m["A2"],)) == pytest.approx(w.margin, rel=1e-9)


def test_nonconvexity_witness():
    w = search_nonconvexity(0.6, 1.8, n=(2, 3), seed=0)
    check_witness(w)
    m = w.matrices
    f = lambda A: psi_ps(A, m["K1"], m["K2"], 0.6, 1.8)
    assert midpoint_excess(f, (m["A1"],), (m["A2"],)) == pytest.approx(w.margin, rel=1e-9)


def test_cfl_nonconcavity_witness():
    w = cfl_nonconcavity_check(1, 0.5, 0.5, n=2, seed=0)
    check_witness(w)
    m = w.matrices
    f = lambda A, B, C: phi_cfl(A, B, C, 1, 1, 1)
    x1, x2 = (m["A1"], m["B1"], m["C1"]), (m["A2"], m["B2"], m["C2"])
    assert -midpoint_excess(f, x1, x2) == pytest.approx(w.margin, rel=1e-9)


def test_cfl_negative_exponents_not_convex():
    w = cfl_nonconvexity_check(1, -0.5, -0.5, n=2, budget=20_000, seed=0)
    check_witness(w)


@pytest.mark.parametrize("alpha", [-0.25, -0.5])
def test_remark_violation(alpha):
    w = search_remark_violation(alpha, alpha, 1.8, n=(2, 3), seed=0)
    check_witness(w)
    m = w.matrices
    f = lambda A, C: remark_specialization(A, C, alpha, alpha, 1.8)
    assert midpoint_excess(f, (m["A1"], m["C1"]), (m["A2"], m["C2"])) == pytest.approx(w.margin, rel=1e-9)


def test_convex_control_exhausts():
    # Tr |K1 A K2|^2 is a convex quadratic in A
    with pytest.raises(SearchExhausted) as info:
        search_nonconvexity(1, 2, n=(2, 3), budget=4_000, seed=0)
    best = info.value.best
    assert best is None or best.margin <= 1e-6


@pytest.mark.parametrize("p, s", [(0.4, 2.4), (0.3, 3)])
def test_adjoint_concave_control_exhausts(p, s):
    with pytest.raises(SearchExhausted):
        search_nonconcavity(p, s, n=2, budget=4_000, seed=0, adjoint=True)


def test_search_deterministic():
    a = search_nonconcavity(0.3, 3, n=2, budget=5_000, seed=7)
    b = search_nonconcavity(0.3, 3, n=2, budget=5_000, seed=7)
    assert a.to_dict() == b.to_dict()


def test_block_swap_gap_is_twice_midpoint():
    rng = np.random.default_rng(0)
    params = LambdaParams(-0.5, -0.5, 1.5)
    P1, P2, X1, X2 = random_psd(2, rng), random_psd(2, rng), ginibre(2, rng), ginibre(2, rng)
    gap, before, after, P, X = block_swap_gap(P1, X1, P2, X2, params)
    f = lambda P, X: lambda_abp(P, X, params)
    mid = (f(P1, X1) + f(P2, X2)) / 2 - f((P1 + P2) / 2, (X1 + X2) / 2)
    assert gap == pytest.approx(2 * mid, abs=1e-12 * max(1, before))
    ch = block_swap_channel(2)
    assert after == pytest.approx(f(ch(P), ch(X)))
    cgap = block_swap_gap(P1, X1, P2, X2, params, compensated=True)[0]
    assert cgap == pytest.approx(gap, abs=1e-12 * max(1, before))


def test_conjecture2_refuted_below_two():
    w = refute_conjecture2(1.5, alpha=-0.5)
    check_witness(w)
    P, X = w.matrices["P"], w.matrices["X"]
    ch = block_swap_channel(1)
    params = LambdaParams(-0.5, -0.5, 1.5)
    assert lambda_abp(ch(P), ch(X), params) > lambda_abp(P, X, params)
    assert ch.is_unital and ch.is_trace_preserving


def test_conjecture2_larger_block():
    w = refute_conjecture2(1.5, alpha=-0.3, n=2)
    assert w.conclusive and w.n == 4


def test_conjecture2_boundary_exhausts():
    with pytest.raises(SearchExhausted):
        refute_conjecture2(2.0)


def test_conjecture2_p_one_reported():
    w = refute_conjecture2(1.0, alpha=-1.0)
    assert w.margin > 0


def test_search_argument_errors():
    with pytest.raises(ValueError):
        search_nonconcavity(0, 3)
    with pytest.raises(ValueError):
        refute_conjecture2(1.5, alpha=-0.5, beta=-0.7)
    with pytest.raises(ValueError):
        cfl_nonconcavity_check(0, 1, 1)
