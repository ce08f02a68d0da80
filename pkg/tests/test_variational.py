import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracelab.errors import SingularPower
from tracelab.linalg import matrix_power, polar
from tracelab.sampling import random_invertible, random_psd
from tracelab.variational import (
    ExponentQuad,
    holder_young_lower_bound,
    minimizing_pair,
    saturating_pair,
    variational_max_check,
    variational_min_check,
)

QUAD = ExponentQuad(2, 4, 8, 8)
seeds = st.integers(0, 2**32 - 1)


def test_quad_bookkeeping():
    q = ExponentQuad.from_triple(0.25, 0.25, 2)
    assert 1 / q.r0 == pytest.approx(0.25 + 0.25 + 0.5, abs=1e-12)
    assert q.as_tuple()[1:] == (4.0, 2, 4.0)
    with pytest.raises(ValueError):
        ExponentQuad(1, 2, 2, 3)
    c = ExponentQuad.completing(2, 3)
    assert 1 / c.r0 == pytest.approx(1 / c.r1 + 1 / c.r2 + 1 / c.r3)


@given(st.floats(0.05, 0.5), st.floats(0.05, 0.5), st.floats(0.5, 10))
def test_from_triple_identity(p, q, s):
    quad = ExponentQuad.from_triple(p, q, s)
    assert abs(1 / quad.r0 - (p + q + 1 / s)) < 1e-12


def test_identity_saturates():
    I = np.eye(3)
    lhs, rhs = holder_young_lower_bound(I, I, I, I, I, QUAD)
    assert lhs == pytest.approx(3) and rhs == pytest.approx(3)


def test_lower_bound_one_sided(rng):
    for _ in range(1000):
        n = int(rng.integers(2, 5))
        A, B, C, X, Y = (random_invertible(n, rng) for _ in range(5))
        lhs, rhs = holder_young_lower_bound(A, B, C, X, Y, QUAD)
        assert lhs >= rhs - 1e-9 * max(1.0, abs(lhs))


def test_singular_rejected():
    S = np.diag([1.0, 0.0])
    with pytest.raises(SingularPower):
        holder_young_lower_bound(np.eye(2), np.eye(2), np.eye(2), S, np.eye(2), QUAD)
    with pytest.raises(SingularPower):
        saturating_pair(np.eye(2), S, np.eye(2), QUAD)


def test_saturating_pair_psd_mid():
    P = random_psd(3, 1)
    A, C = saturating_pair(np.eye(3), P, np.eye(3), QUAD)
    assert np.allclose(A, matrix_power(P, QUAD.r2 / QUAD.r1))
    assert np.allclose(C, matrix_power(P, QUAD.r2 / QUAD.r3))


def test_saturating_pair_scalars():
    A, C = saturating_pair(np.array([[2.0]]), np.array([[6.0]]), np.array([[3.0]]), QUAD)
    assert A[0, 0] == pytest.approx(0.5)
    assert C[0, 0] == pytest.approx(1 / 3)


def test_saturating_pair_identities():
    rng = np.random.default_rng(4)
    X, B, Y = (random_invertible(4, rng) for _ in range(3))
    r0, r1, r2, r3 = QUAD.as_tuple()
    A, C = saturating_pair(X, B, Y, QUAD)
    U, absW = polar(np.linalg.solve(X, B) @ np.linalg.inv(Y))

    def close(M, ref):
        return np.abs(M - ref).max() <= 1e-9 * max(1.0, np.abs(ref).max())

    assert close(A @ X, matrix_power(absW, r2 / r1) @ U.conj().T)
    assert close(Y @ C, matrix_power(absW, r2 / r3))
    assert close(A @ B @ C, matrix_power(absW, r2 / r0))
    lhs, rhs = holder_young_lower_bound(A, B, C, X, Y, QUAD)
    assert abs(lhs - rhs) < 1e-8 * max(1, lhs)


def test_max_check_identity():
    rep = variational_max_check(np.eye(2), np.eye(2), np.eye(2), QUAD)
    assert rep.lhs == pytest.approx(2) and rep.saturated and rep.probes_ok


@pytest.mark.parametrize("quad", [QUAD, ExponentQuad.from_triple(0.25, 0.25, 2), ExponentQuad.from_triple(0.3, 0.2, 2)])
def test_max_check_random(quad):
    rng = np.random.default_rng(9)
    B, X, Y = (random_invertible(3, rng) for _ in range(3))
    rep = variational_max_check(B, X, Y, quad, rng=rng)
    assert rep.saturated and rep.probes_ok and rep.probes == 100
    assert rep.probe_excess < 0


@given(seeds, st.integers(2, 4))
def test_min_check_random(seed, n):
    rng = np.random.default_rng(seed)
    A, B, C = (random_invertible(n, rng) for _ in range(3))
    rep = variational_min_check(A, B, C, QUAD, rng=rng)
    assert rep.saturated and rep.probes_ok


def test_min_check_identity_and_pair():
    rep = variational_min_check(np.eye(3), np.eye(3), np.eye(3), QUAD, n_probes=0)
    assert rep.lhs == pytest.approx(3) and rep.rhs == pytest.approx(3)
    quad = ExponentQuad.completing(2, 3)
    rng = np.random.default_rng(2)
    A, B, C = (random_invertible(3, rng) for _ in range(3))
    X, Y = minimizing_pair(A, B, C, quad)
    assert variational_min_check(A, B, C, quad).saturated
    assert np.all(np.isfinite(X)) and np.all(np.isfinite(Y))


def test_probe_seed_reproducible():
    rng = np.random.default_rng(3)
    B, X, Y = (random_invertible(3, rng) for _ in range(3))
    a = variational_max_check(B, X, Y, QUAD, rng=5).probe_excess
    b = variational_max_check(B, X, Y, QUAD, rng=5).probe_excess
    assert a == b
