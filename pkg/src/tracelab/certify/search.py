"""Derivative-free counterexample search.

Every search maximizes a *relative violation margin* (positive means the
claimed inequality fails) over a real parameterization of its matrix
inputs. General matrices use ``2 n^2`` reals; positive matrices are
``G^* G + 1e-6 I`` with ``G`` general. A cheap diagonal warm start runs
first, then Nelder-Mead restarts until the evaluation budget is spent.
Every reported witness is re-evaluated with Jacobi eigendecompositions and
compensated sums and must keep at least half of its margin.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ..channels import block_swap_channel
from ..errors import SearchExhausted, TracelabError
from ..functionals import LambdaParams, TripleParams, lambda_abp, phi_cfl, psi_pqs, psi_ps
from ..linalg import abs_power_trace_compensated, matrix_power
from .convexity import scalar_convexity_boundary
from .report import TOL_CERT, SearchWitness

PSD_FLOOR = 1e-6
NM_ITER_PER_DIM = 200
WARM_SAMPLES = 200
POLISH_EVALS = 1000
DEFAULT_MIN_MARGIN = 1e-6
PENALTY = 1e3


# -- parameterization ---------------------------------------------------------


class Layout:
    """Maps a flat real vector to named ``n x n`` matrices.

    ``slots`` is a sequence of ``(name, kind)`` with kind ``"general"`` or
    ``"psd"``.
    """

    def __init__(self, n, slots):
        self.n, self.slots = n, tuple(slots)
        self.size = 2 * n * n * len(self.slots)

    def _blocks(self, theta):
        n2 = self.n * self.n
        theta = np.asarray(theta, dtype=float)
        for k, (name, kind) in enumerate(self.slots):
            chunk = theta[2 * n2 * k: 2 * n2 * (k + 1)]
            G = (chunk[:n2] + 1j * chunk[n2:]).reshape(self.n, self.n)
            yield name, kind, G

    def unpack(self, theta):
        out = {}
        for name, kind, G in self._blocks(theta):
            if kind == "psd":
                P = G.conj().T @ G + PSD_FLOOR * np.eye(self.n)
                out[name] = (P + P.conj().T) / 2
            else:
                out[name] = G
        return out

    def pack(self, generators):
        """Inverse of :meth:`unpack` on the generator level (``G`` for psd slots)."""
        parts = []
        for name, _ in self.slots:
            G = np.asarray(generators[name], dtype=np.complex128).ravel()
            parts.append(np.concatenate([G.real, G.imag]))
        return np.concatenate(parts)

    def diagonal_generator(self, values):
        """``G`` with ``G^* G + 1e-6 I = diag(values)``."""
        v = np.asarray(values, dtype=float)
        return np.diag(np.sqrt(np.clip(v - PSD_FLOOR, 0.0, None))).astype(np.complex128)


@dataclass
class Problem:
    """A violation margin to maximize.

    ``margin(mats, compensated)`` returns the relative violation (positive
    means the inequality fails); ``warm(rng)`` proposes a parameter vector
    from a structured (diagonal / rank-one) family.
    """

    claim: str
    layout: Layout
    margin: callable
    warm: callable | None
    params: dict
    present: callable = None


class _Counter:
    def __init__(self, problem, limit):
        self.problem, self.limit, self.count = problem, limit, 0
        self.best_theta, self.best = None, -np.inf

    @property
    def remaining(self):
        return self.limit - self.count

    def __call__(self, theta):
        self.count += 1
        try:
            m = self.problem.margin(self.problem.layout.unpack(theta), False)
        except (TracelabError, np.linalg.LinAlgError, FloatingPointError, OverflowError):
            return PENALTY
        if not np.isfinite(m):
            return PENALTY
        if m > self.best:
            self.best, self.best_theta = m, np.array(theta, copy=True)
        return -m


def _nelder_mead(counter, x0, maxfev):
    if maxfev <= 0:
        return
    with np.errstate(all="ignore"):
        minimize(counter, x0, method="Nelder-Mead",
                 options={"maxfev": int(maxfev), "maxiter": NM_ITER_PER_DIM * len(x0),
                          "xatol": 1e-10, "fatol": 1e-14, "adaptive": True})


def _witness(problem, theta, evaluations, seed, stage):
    mats = problem.layout.unpack(theta)
    margin = problem.margin(mats, False)
    try:
        verified = problem.margin(mats, True)
    except TracelabError:
        verified = -np.inf
    shown = problem.present(mats) if problem.present else mats
    return SearchWitness(problem.claim, shown, float(margin), float(verified), problem.layout.n, evaluations,
                         int(seed), dict(problem.params), stage)


def run_search(make_problem, dims, budget, seed, min_margin=DEFAULT_MIN_MARGIN, warm_samples=WARM_SAMPLES,
               polish=POLISH_EVALS):
    """Search each ``n`` in ``dims`` in turn, sharing ``budget`` evaluations evenly.

    Returns the first witness whose margin exceeds ``max(min_margin, tol)``
    and re-verifies to at least half of it; otherwise raises
    :class:`SearchExhausted` carrying the best candidate seen.
    """
    threshold = max(min_margin, TOL_CERT)
    children = np.random.SeedSequence(int(seed)).spawn(len(dims))
    used, best = 0, None
    for k, (n, child) in enumerate(zip(dims, children)):
        rng = np.random.default_rng(child)
        problem = make_problem(n)
        share = (budget - used) // (len(dims) - k)
        counter = _Counter(problem, share)
        stage = "nelder_mead"
        if problem.warm is not None:
            for _ in range(min(warm_samples, counter.remaining)):
                counter(problem.warm(rng))
            if counter.best > threshold:
                start = counter.best_theta
                _nelder_mead(counter, start, min(polish, counter.remaining))
                stage = "warm_start+polish"
        while counter.best <= threshold and counter.remaining > 0:
            x0 = counter.best_theta if counter.best_theta is not None and rng.uniform() < 0.3 else None
            if x0 is None:
                x0 = rng.standard_normal(problem.layout.size)
            else:
                x0 = x0 + 0.1 * rng.standard_normal(x0.size)
            _nelder_mead(counter, x0, min(NM_ITER_PER_DIM * problem.layout.size, counter.remaining))
        used += counter.count
        if counter.best_theta is None:
            continue
        w = _witness(problem, counter.best_theta, used, seed, stage)
        if w.margin > threshold and w.reverified:
            return w
        if best is None or w.margin > best.margin:
            best = w
    raise SearchExhausted(
        f"no violation above {threshold:g} within {used} evaluations"
        + (f" (best margin {best.margin:.3e})" if best is not None else ""),
        best=best,
    )


# -- compensated evaluations --------------------------------------------------


def _cpow(P, t):
    return matrix_power(P, t, method="jacobi", allow_singular=t > 0)


def _psi_ps_c(A, K1, K2, p, s):
    return abs_power_trace_compensated(K1 @ _cpow(A, p) @ K2, s)


def _rel(values, weights):
    """``sum w_i v_i / max |v_i|`` with a compensated sum."""
    scale = max(max(abs(v) for v in values), 1e-300)
    return math.fsum(w * v for w, v in zip(weights, values)) / scale


def _concavity_margin(f1, f2, fm):
    return _rel((f1, f2, fm), (0.5, 0.5, -1.0))


def _convexity_margin(f1, f2, fm):
    return _rel((f1, f2, fm), (-0.5, -0.5, 1.0))


# -- problems -----------------------------------------------------------------


def _psi_ps_problem(p, s, n, kind, adjoint):
    slots = [("K1", "general")] + ([] if adjoint else [("K2", "general")]) + [("A1", "psd"), ("A2", "psd")]
    layout = Layout(n, slots)
    sign = _concavity_margin if kind == "concave" else _convexity_margin

    def factors(m):
        return m["K1"], (m["K1"].conj().T if adjoint else m["K2"])

    def margin(m, compensated):
        K1, K2 = factors(m)
        A1, A2 = m["A1"], m["A2"]
        Am = (A1 + A2) / 2
        if compensated:
            vals = [_psi_ps_c(A, K1, K2, p, s) for A in (A1, A2, Am)]
        else:
            vals = [psi_ps(A, K1, K2, p, s) for A in (A1, A2, Am)]
        return sign(*vals)

    def warm(rng):
        # rank-one factors reduce the functional to |sum_j r_j u_j^p|^s
        u1, u2 = rng.uniform(0.05, 2.0, n), rng.uniform(0.05, 2.0, n)
        r = np.ones(n) if adjoint else rng.choice([-1.0, 1.0], n)
        K1 = np.zeros((n, n), dtype=np.complex128)
        K1[0, :] = 1.0
        K2 = np.zeros((n, n), dtype=np.complex128)
        K2[:, 0] = r
        gens = {"K1": K1, "K2": K2, "A1": layout.diagonal_generator(u1), "A2": layout.diagonal_generator(u2)}
        return layout.pack(gens)

    def present(m):
        K1, K2 = factors(m)
        return {"K1": K1, "K2": K2, "A1": m["A1"], "A2": m["A2"]}

    claim = "psi_ps.non_concavity" if kind == "concave" else "psi_ps.non_convexity"
    return Problem(claim, layout, margin, warm, {"p": p, "s": s, "adjoint": adjoint}, present)


def search_nonconcavity(p, s, n=(2, 3, 4), budget=100_000, seed=0, adjoint=False, min_margin=DEFAULT_MIN_MARGIN):
    """Look for ``K1, K2, A1, A2`` with ``Psi((A1+A2)/2) < (Psi(A1) + Psi(A2)) / 2``.

    ``Psi(A) = Tr |K1 A^p K2|^s``. With ``adjoint=True`` the search is
    restricted to ``K2 = K1^*``. ``n`` is a dimension or a sequence of
    dimensions tried in order.
    """
    if p == 0:
        raise ValueError("p must be non-zero")
    dims = (n,) if np.isscalar(n) else tuple(n)
    return run_search(lambda d: _psi_ps_problem(p, s, d, "concave", adjoint), dims, budget, seed, min_margin)


def search_nonconvexity(p, s, n=(2, 3, 4), budget=100_000, seed=0, adjoint=False, min_margin=DEFAULT_MIN_MARGIN):
    """Mirror of :func:`search_nonconcavity`: look for a midpoint value above the average."""
    if p == 0:
        raise ValueError("p must be non-zero")
    dims = (n,) if np.isscalar(n) else tuple(n)
    return run_search(lambda d: _psi_ps_problem(p, s, d, "convex", adjoint), dims, budget, seed, min_margin)


def _cfl_c(A, B, C, p, q2, r2):
    Ap = _cpow(A, p)
    M = Ap @ _cpow(B, q2) @ Ap @ _cpow(C, r2)
    return math.fsum(np.diag(M).real)


def _triple_problem(claim, n, f, fc, kind, params, diag_exponents=None):
    """Midpoint problem over six positive matrices ``A1, A2, B1, B2, C1, C2``."""
    names = ("A", "B", "C")
    layout = Layout(n, [(f"{x}{i}", "psd") for x in names for i in (1, 2)])
    sign = _concavity_margin if kind.startswith("concav") else _convexity_margin

    def margin(m, compensated):
        g = fc if compensated else f
        x1 = [m[f"{x}1"] for x in names]
        x2 = [m[f"{x}2"] for x in names]
        xm = [(a + b) / 2 for a, b in zip(x1, x2)]
        return sign(g(*x1), g(*x2), g(*xm))

    def warm(rng):
        gens = {name: layout.diagonal_generator(rng.uniform(0.05, 2.0, n)) for name, _ in layout.slots}
        return layout.pack(gens)

    return Problem(claim, layout, margin, warm, params)


def _cfl_search(p, q, r, n, budget, seed, min_margin, kind):
    if 0 in (p, q, r):
        raise ValueError("exponents must be non-zero")
    dims = (n,) if np.isscalar(n) else tuple(n)

    def make(d):
        return _triple_problem(
            f"phi_cfl.non_{kind}ity", d,
            lambda A, B, C: phi_cfl(A, B, C, p, 2 * q, 2 * r),
            lambda A, B, C: _cfl_c(A, B, C, p, 2 * q, 2 * r),
            kind, {"p": p, "q": q, "r": r},
        )

    return run_search(make, dims, budget, seed, min_margin)


def cfl_nonconcavity_check(p, q, r, n=(2, 3, 4), budget=100_000, seed=0, min_margin=DEFAULT_MIN_MARGIN):
    """Midpoint-concavity violation for ``(A, B, C) -> Tr(A^p B^{2q} A^p C^{2r})``."""
    return _cfl_search(p, q, r, n, budget, seed, min_margin, "concav")


def cfl_nonconvexity_check(p, q, r, n=(2, 3, 4), budget=100_000, seed=0, min_margin=DEFAULT_MIN_MARGIN):
    """Midpoint-convexity violation for ``(A, B, C) -> Tr(A^p B^{2q} A^p C^{2r})``."""
    return _cfl_search(p, q, r, n, budget, seed, min_margin, "convex")


def _psi_pqs_c(A, B, C, params):
    K1, K2 = params.factors(A.shape[0])
    M = _cpow(B, -params.p) @ K1 @ A @ K2 @ _cpow(C, -params.q)
    return abs_power_trace_compensated(M, params.s)


def search_remark_violation(alpha, beta, gamma, n=(2, 3), budget=100_000, seed=0, min_margin=DEFAULT_MIN_MARGIN):
    """Convexity violation of ``(A, C) -> Tr |A^alpha A C^beta|^gamma``.

    This is ``(A, B, C) -> Tr |B^alpha A C^beta|^gamma`` restricted to
    ``B = A``; a violation there rules out joint convexity of the
    three-variable functional at these exponents.
    """
    params = TripleParams(-alpha, -beta, gamma)
    dims = (n,) if np.isscalar(n) else tuple(n)

    def make(d):
        layout = Layout(d, [("A1", "psd"), ("A2", "psd"), ("C1", "psd"), ("C2", "psd")])

        def margin(m, compensated):
            g = (lambda A, C: _psi_pqs_c(A, A, C, params)) if compensated else (lambda A, C: psi_pqs(A, A, C, params))
            A1, A2, C1, C2 = m["A1"], m["A2"], m["C1"], m["C2"]
            return _convexity_margin(g(A1, C1), g(A2, C2), g((A1 + A2) / 2, (C1 + C2) / 2))

        def warm(rng):
            gens = {name: layout.diagonal_generator(rng.uniform(0.05, 2.0, d)) for name, _ in layout.slots}
            return layout.pack(gens)

        return Problem("remark.non_convexity", layout, margin, warm,
                       {"alpha": alpha, "beta": beta, "gamma": gamma})

    return run_search(make, dims, budget, seed, min_margin)


# -- Lambda under the block swap ----------------------------------------------


def _lambda_c(P, X, params):
    a, b, p = params.alpha, params.beta, params.p
    return abs_power_trace_compensated(_cpow(P, a / p) @ X @ _cpow(P, b / p), p)


def _block_diag(M1, M2):
    n = M1.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    out[:n, :n], out[n:, n:] = M1, M2
    return out


def block_swap_gap(P1, X1, P2, X2, params, compensated=False):
    """``Lambda(P, X) - Lambda(phi(P), phi(X))`` for the block embedding and the block-swap channel.

    Returns ``(gap, before, after, P, X)``; the gap equals twice the
    midpoint-convexity gap of ``Lambda`` at ``(P1, X1), (P2, X2)``.
    """
    P, X = _block_diag(P1, P2), _block_diag(X1, X2)
    ch = block_swap_channel(P1.shape[0])
    f = (lambda P, X: _lambda_c(P, X, params)) if compensated else (lambda P, X: lambda_abp(P, X, params))
    before, after = f(P, X), f(ch(P), ch(X))
    return math.fsum([before, -after]), before, after, P, X


def refute_conjecture2(p, alpha=-0.5, beta=None, n=1, seed=0, epsilons=(0.2, 0.1, 0.05, 0.02, 0.01)):
    """Monotonicity failure of ``Lambda`` under a unital channel for ``1 <= p < 2``.

    A negative-curvature direction of ``x^p / y`` on the grid ``{0.5, 1, 2}^2``
    gives scalars ``(x1, y1), (x2, y2)`` that break midpoint convexity; they
    are embedded as ``x I_n, y I_n`` in a block-diagonal pair and pushed
    through the block-swap channel. ``seed`` is recorded for provenance; the
    construction itself is deterministic.
    """
    beta = -1.0 - alpha if beta is None else beta
    if abs(alpha + beta + 1) > 1e-12 or not -1 <= alpha <= 0:
        raise ValueError("need alpha + beta = -1 and alpha in [-1, 0]")
    if not 1 <= p < 2 + 1e-12:
        raise ValueError("p must lie in [1, 2]")
    params = LambdaParams(alpha, beta, p)
    verdict = scalar_convexity_boundary(p)
    if verdict.convex:
        raise SearchExhausted(f"x^{p}/y is jointly convex; no scalar seed exists", best=None)
    (x, y), v = verdict.witness, np.real(verdict.direction)
    I = np.eye(n)
    best = None
    for eps in epsilons:
        d = eps * min(x, y)
        x1, y1, x2, y2 = x + d * v[0], y + d * v[1], x - d * v[0], y - d * v[1]
        P1, X1, P2, X2 = y1 * I, x1 * I, y2 * I, x2 * I
        gap, before, after, P, X = block_swap_gap(P1, X1, P2, X2, params)
        vgap, vb, va, _, _ = block_swap_gap(P1, X1, P2, X2, params, compensated=True)
        w = SearchWitness(
            "lambda.conjecture2_refutation", {"P": P, "X": X},
            margin=-gap / max(abs(before), abs(after)), verified_margin=-vgap / max(abs(vb), abs(va)),
            n=2 * n, evaluations=0, seed=int(seed), params=dict(params.as_dict(), seed_point=[x, y], step=d),
            stage="scalar_hessian_seed",
        )
        if best is None or w.margin > best.margin:
            best = w
        if w.conclusive:
            return w
    raise SearchExhausted(f"no conclusive violation at p={p}", best=best)
