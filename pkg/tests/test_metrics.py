import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracelab.channels import identity_channel, partial_trace_channel, pinching_channel, random_mixed_unitary
from tracelab.errors import NonUnitalChannel
from tracelab.metrics import (
    AtomicMeasure,
    SuperOperator,
    certify_petz_monotonicity,
    certify_thm51,
    constant_kernel,
    diff_quotient,
    get_function,
    h_operator_monotone_quadrature,
    hessian_fd_agreement,
    hessian_trace,
    hessian_trace_fd,
    hs_inner,
    j_f,
    kernel_from_function,
    kprime_commutative,
    kprime_numeric,
    left_multiplication,
    log_diff_quotient,
    log_kernel,
    petz_metric,
    petz_monotonicity_check,
    q_apply,
    q_f,
    q_inverse_identity,
    qf_jf_agreement,
    reciprocal,
    refute_conjecture4,
    right_multiplication,
    scalar_identity_probe,
    thm51_check,
    thm51_operator_check,
    unvec,
    vec,
)
from tracelab.sampling import ginibre, random_density, random_hermitian, random_psd

seeds = st.integers(0, 2**32 - 1)
XLOGX = AtomicMeasure(0.0, [(0.0, 1.0)])


def test_vec_convention():
    rng = np.random.default_rng(0)
    A, X, B = ginibre(3, rng), ginibre(3, rng), ginibre(3, rng)
    assert np.allclose(vec(A @ X @ B), np.kron(B.T, A) @ vec(X))
    assert np.array_equal(unvec(vec(X)), X)
    assert hs_inner(X, A) == pytest.approx(np.trace(X @ A.conj().T))


def test_qf_examples():
    rng = np.random.default_rng(1)
    A, B, X = random_psd(3, rng), random_psd(3, rng), ginibre(3, rng)
    assert np.allclose(q_f(A, B, constant_kernel(1.0)).matrix, np.eye(9))
    A2 = np.diag([2.0, 3.0])
    B2 = random_psd(2, rng)
    assert np.allclose(q_f(A2, B2, lambda x, y: x + 0 * y).matrix, left_multiplication(A2).matrix)
    D = np.diag([1.0, math.e])
    Q = q_f(D, D, diff_quotient("log"))
    E12 = np.zeros((2, 2))
    E12[0, 1] = 1
    assert Q(E12)[0, 1] == pytest.approx(1 / (math.e - 1), rel=1e-12)
    assert np.allclose(q_apply(A, B, diff_quotient("square"), X), q_f(A, B, diff_quotient("square"))(X))


def test_jf_examples():
    rng = np.random.default_rng(2)
    A, B = random_psd(3, rng), random_psd(3, rng)
    assert np.allclose(j_f(A, B, "identity").matrix, left_multiplication(A).matrix)
    assert np.allclose(j_f(A, B, "one").matrix, right_multiplication(B).matrix)
    D = np.diag([1.0, math.e])
    J = j_f(D, D, "h")
    E = np.zeros((2, 2))
    E[0, 1] = 1
    assert J(E)[0, 1] == pytest.approx(math.e - 1, rel=1e-12)
    assert np.allclose(np.diag(J(np.eye(2))), [1, math.e])


@given(seeds, st.integers(1, 4), st.sampled_from(["sqrt", "square", "log", "xlogx", "h", "inv", "power:0.3"]))
def test_qf_equals_jf(seed, n, fid):
    rng = np.random.default_rng(seed)
    A, B = random_psd(n, rng), random_psd(n, rng)
    Q = q_f(A, B, kernel_from_function(fid)).matrix
    J = j_f(A, B, fid).matrix
    assert np.abs(J - Q).max() <= 1e-10 * max(1.0, np.abs(Q).max())


def test_qf_jf_suite():
    out = qf_jf_agreement(3, 20, seed=4)
    assert out["max_error"] <= 1e-10 and len(out["errors"]) == 20
    assert out["per_function"]["sqrt"] <= out["max_error"]


def test_diff_quotient():
    F = diff_quotient("square")
    assert F(2.0, 5.0) == pytest.approx(7)
    assert F(3.0, 3.0) == pytest.approx(6)
    assert diff_quotient("log")(1.0, math.e) == pytest.approx(1 / (math.e - 1))
    assert log_diff_quotient(np.array(2.0), np.array(2.0)) == pytest.approx(0.5)
    assert log_diff_quotient(np.array(1.0 + 1e-12), np.array(1.0)) == pytest.approx(1.0, rel=1e-11)
    with pytest.raises(ValueError):
        diff_quotient(get_function("h").derivative())


def test_catalog():
    assert get_function("power:0.5")(4.0) == pytest.approx(2)
    assert get_function("h")(1.0) == pytest.approx(1)
    assert get_function("h")(math.e) == pytest.approx(math.e - 1)
    with pytest.raises(KeyError):
        get_function("nope")


def test_h_quadrature():
    assert h_operator_monotone_quadrature([1.0, math.e, 4.0, 0.01, 100.0]) < 1e-12
    assert get_function("h")(4.0) == pytest.approx(3 / math.log(4), rel=1e-13)


def test_q_inverse():
    rng = np.random.default_rng(3)
    A, B = random_psd(3, rng), random_psd(3, rng)
    Q = q_f(A, B, constant_kernel(2.0))
    assert np.allclose(Q.inverse().matrix, np.eye(9) / 2)
    assert q_inverse_identity(A, B, diff_quotient("log")) < 1e-10
    # reciprocal of the log divided difference realizes J_h
    Jh = j_f(A, B, "h").matrix
    assert np.allclose(q_f(A, B, reciprocal(log_kernel())).matrix, Jh, atol=1e-10 * np.abs(Jh).max())


def test_superop_from_channel_and_adjoint():
    ch = random_mixed_unitary(2, 5)
    S = SuperOperator.from_channel(ch)
    X, Y = ginibre(2, 1), ginibre(2, 2)
    assert np.allclose(S(X), ch(X))
    assert hs_inner(S(X), Y) == pytest.approx(hs_inner(X, S.adjoint()(Y)))


def test_hessian_examples():
    rng = np.random.default_rng(6)
    D, A = random_psd(3, rng), random_hermitian(3, rng)
    assert hessian_trace("square", D, A) == pytest.approx(2 * np.trace(A @ A).real)
    assert hessian_trace("xlogx", np.diag([0.5, 0.5]), np.diag([1.0, -1.0])) == pytest.approx(4)


@pytest.mark.parametrize("fid", ["square", "quartic", "sqrt", "inv", "log", "exp", "xlogx"])
def test_hessian_vs_fd(fid):
    rng = np.random.default_rng(7)
    D, A = random_psd(3, rng), random_hermitian(3, rng)
    exact = hessian_trace(fid, D, A)
    assert abs(exact - hessian_trace_fd(fid, D, A)) < 1e-5 * abs(exact)


def test_hessian_suite():
    assert hessian_fd_agreement(3, 5, seed=1)["max_error"] < 1e-5


@pytest.mark.parametrize("fid", ["sqrt", "h", "identity"])
def test_petz_metric_at_maximally_mixed(fid):
    rng = np.random.default_rng(8)
    n = 3
    A, B = ginibre(n, rng), ginibre(n, rng)
    f1 = float(get_function(fid)(1.0))
    val = petz_metric(fid, np.eye(n) / n, A, B)
    assert val == pytest.approx(n / f1 * np.trace(A @ B.conj().T), rel=1e-12)


def test_petz_metric_positive():
    rng = np.random.default_rng(9)
    for _ in range(20):
        D, A = random_density(3, rng), ginibre(3, rng)
        assert petz_metric("h", D, A, A).real >= -1e-10
    with pytest.raises(ValueError):
        petz_metric("h", np.eye(2), np.eye(2), np.eye(2))


def test_petz_monotonicity():
    rng = np.random.default_rng(10)
    A, B = random_psd(3, rng), random_psd(3, rng)
    assert abs(petz_monotonicity_check("sqrt", identity_channel(3), A, B)) < 1e-10
    for _ in range(10):
        ch = random_mixed_unitary(3, rng)
        assert petz_monotonicity_check("h", ch, A, B) >= -1e-9
    with pytest.raises(NonUnitalChannel):
        petz_monotonicity_check("h", partial_trace_channel(2), random_psd(4, rng), random_psd(4, rng))


@pytest.mark.parametrize("h", ["sqrt", "h"])
def test_petz_suite(h):
    rep = certify_petz_monotonicity(h, "mixed_unitary", 2, 20, seed=0)
    assert rep.holds and rep.trials == 20


def test_atomic_measure_represents_second_derivative():
    x = np.logspace(-2, 2, 30)
    assert np.allclose(XLOGX.second_derivative(x), get_function("xlogx").deriv2(x))
    K = XLOGX.kernel()
    assert np.allclose(K(x, x), 1 / x)
    with pytest.raises(ValueError):
        AtomicMeasure(-1.0)


def test_thm51():
    rng = np.random.default_rng(11)
    A, B, X = random_psd(3, rng), random_psd(3, rng), ginibre(3, rng)
    assert thm51_check(XLOGX, identity_channel(3), A, B, X) == pytest.approx(0, abs=1e-12)
    for _ in range(10):
        ch = random_mixed_unitary(3, rng)
        assert thm51_check(XLOGX, ch, A, B, X) >= -1e-9
        assert thm51_operator_check(XLOGX, ch, A, B) >= -1e-9
    rep = certify_thm51(XLOGX, "mixed_unitary", 3, 20, seed=1, operator=True)
    assert rep.holds


def test_scalar_identity_probe_pinching():
    rng = np.random.default_rng(12)
    A = random_psd(3, rng)
    mu = AtomicMeasure(0.5, [(0.0, 1.0), (2.0, 0.5)])
    for t in (0.5, 1.0, 3.0):
        assert scalar_identity_probe(mu, t, A, pinching_channel([[0, 1], [2]])) >= -1e-9


def test_kprime_examples():
    D = np.diag([0.5, 0.5])
    assert kprime_commutative(D, D, D, 2) == pytest.approx(1, abs=1e-12)
    rng = np.random.default_rng(13)
    a, b = rng.standard_normal(3), rng.standard_normal(3)
    d = np.array([0.2, 0.3, 0.5])
    assert kprime_commutative(d, a, b, 1) == pytest.approx(2 * a.sum() * b.sum())


@given(st.floats(1.0, 4.0), seeds)
def test_kprime_numeric_matches(p, seed):
    rng = np.random.default_rng(seed)
    d = rng.uniform(0.2, 1.0, 3)
    a, b = rng.standard_normal(3), rng.standard_normal(3)
    exact = kprime_commutative(d, a, b, p)
    num = kprime_numeric(np.diag(d), np.diag(a), np.diag(b), p)
    assert num == pytest.approx(exact, rel=1e-6, abs=1e-7)


def test_conjecture4_refutation():
    rep = refute_conjecture4(2.0)
    assert rep.K_D1 == pytest.approx(1, abs=1e-12)
    assert rep.K_D2 == pytest.approx(1.25, abs=1e-12)
    assert rep.refuted
    rep1 = refute_conjecture4(1.0)
    assert rep1.K_degenerate == 0.0 and abs(rep1.K_degenerate_numeric) < 1e-8 and rep1.refuted
    near = refute_conjecture4(1 + 1e-6)
    assert abs(near.difference) < 1e-5
    assert set(rep1.as_dict()) >= {"K_D1_D1", "K_D2_D2", "K_A_A"}
