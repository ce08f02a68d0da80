"""Scalar functions, two-variable kernels and atomic measures."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

DIFF_QUOTIENT_SWITCH = 1e-6


@dataclass(frozen=True)
class ScalarFunction:
    """A real function on ``(0, inf)`` with (optional) first two derivatives.

    All callables are vectorised over numpy arrays.
    """

    id: str
    func: Callable = field(repr=False)
    deriv: Callable | None = field(default=None, repr=False)
    deriv2: Callable | None = field(default=None, repr=False)

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))

    def derivative(self):
        if self.deriv is None:
            raise ValueError(f"{self.id} has no registered derivative")
        return ScalarFunction(self.id + "'", self.deriv, self.deriv2)


@dataclass(frozen=True)
class Kernel:
    """A two-variable function ``F(x, y)`` evaluated on eigenvalue pairs."""

    id: str
    func: Callable = field(repr=False)

    def __call__(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return self.func(x, y)


def _h(x):
    u = np.log(x)
    small = np.abs(u) < 1e-5
    safe = np.where(small, 1.0, u)
    return np.where(small, 1 + u / 2 + u * u / 6, np.expm1(safe) / safe)


def _dh(x):
    u = np.log(x)
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    exact = (safe * np.exp(safe) - np.expm1(safe)) / safe**2
    series = 0.5 + u / 3 + u * u / 8 + u**3 / 30
    return np.where(small, series, exact) / x


def power_function(a):
    a = float(a)
    return ScalarFunction(
        f"power:{a!r}",
        lambda x: x**a,
        lambda x: a * x ** (a - 1),
        lambda x: a * (a - 1) * x ** (a - 2),
    )


_CATALOG = {
    "one": ScalarFunction("one", np.ones_like, np.zeros_like, np.zeros_like),
    "identity": ScalarFunction("identity", lambda x: x, np.ones_like, np.zeros_like),
    "square": ScalarFunction("square", lambda x: x**2, lambda x: 2 * x, lambda x: 2 * np.ones_like(x)),
    "quartic": ScalarFunction("quartic", lambda x: x**4, lambda x: 4 * x**3, lambda x: 12 * x**2),
    "sqrt": ScalarFunction("sqrt", np.sqrt, lambda x: 0.5 / np.sqrt(x), lambda x: -0.25 * x**-1.5),
    "inv": ScalarFunction("inv", lambda x: 1 / x, lambda x: -(x**-2), lambda x: 2 * x**-3),
    "log": ScalarFunction("log", np.log, lambda x: 1 / x, lambda x: -(x**-2)),
    "exp": ScalarFunction("exp", np.exp, np.exp, np.exp),
    "xlogx": ScalarFunction("xlogx", lambda x: x * np.log(x), lambda x: np.log(x) + 1, lambda x: 1 / x),
    "h": ScalarFunction("h", _h, _dh),
}


def get_function(fid):
    """Look up a catalog entry; ``"power:<a>"`` builds ``x**a``."""
    if isinstance(fid, ScalarFunction):
        return fid
    if fid in _CATALOG:
        return _CATALOG[fid]
    if fid.startswith("power:"):
        return power_function(float(fid.split(":", 1)[1]))
    raise KeyError(f"unknown function {fid!r}; known: {sorted(_CATALOG)} or power:<a>")


def catalog_ids():
    return sorted(_CATALOG)


def diff_quotient(g, switch=DIFF_QUOTIENT_SWITCH):
    """First divided difference ``(g(s) - g(t)) / (s - t)``.

    Pairs closer than ``switch * max(|s|, |t|, 1)`` use ``g'((s + t) / 2)``.
    """
    g = get_function(g)
    if g.deriv is None:
        raise ValueError(f"{g.id} needs a derivative for its divided difference")

    def F(s, t):
        d = s - t
        near = np.abs(d) <= switch * np.maximum(np.maximum(np.abs(s), np.abs(t)), 1.0)
        safe = np.where(near, 1.0, d)
        return np.where(near, g.deriv((s + t) / 2), (g(s) - g(t)) / safe)

    return Kernel(f"{g.id}[1]", F)


def log_diff_quotient(x, y):
    """``(log x - log y) / (x - y)`` evaluated through ``log1p`` (no cancellation)."""
    d = x - y
    z = d / y
    zero = d == 0
    safe = np.where(zero, 1.0, d)
    return np.where(zero, 1.0 / y, np.log1p(np.where(zero, 0.0, z)) / safe)


def kernel_from_function(f):
    """``F(x, y) = f(x / y) y`` -- the kernel that identifies ``Q_F`` with ``J_f``."""
    f = get_function(f)
    return Kernel(f"J[{f.id}]", lambda x, y: f(x / y) * y)


def reciprocal(kernel):
    return Kernel(f"1/{kernel.id}", lambda x, y: 1.0 / kernel(x, y))


def constant_kernel(c):
    return Kernel(f"const:{c!r}", lambda x, y: np.full(np.broadcast(x, y).shape, float(c)))


@dataclass(frozen=True)
class AtomicMeasure:
    """``g(x) = c + sum_i w_i (t_i + 1) / (t_i + x)`` for a finite atomic measure."""

    c: float
    atoms: tuple = ()

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if self.c < 0:
            raise ValueError("c must be non-negative")
        if any(t < 0 or w <= 0 for t, w in atoms):
            raise ValueError("atoms need t >= 0 and w > 0")
        grid = np.logspace(-3, 3, 61)
        g = self.second_derivative(grid)
        if np.any(g <= 0) or np.any(np.diff(g) > 1e-15 * np.abs(g[:-1])):
            raise ValueError("g must be positive and non-increasing")

    def second_derivative(self, x):
        """The represented function (playing the role of ``f''``)."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, float(self.c))
        for t, w in self.atoms:
            out = out + w * (t + 1) / (t + x)
        return out

    def kernel(self):
        """Divided difference of ``f'``: ``c + sum_i w_i (t_i + 1) L(x + t_i, y + t_i)``."""

        def F(x, y):
            out = np.full(np.broadcast(x, y).shape, float(self.c))
            for t, w in self.atoms:
                out = out + w * (t + 1) * log_diff_quotient(x + t, y + t)
            return out

        return Kernel(f"measure[{self.c!r},{list(self.atoms)!r}]", F)


def h_operator_monotone_quadrature(x, nodes=32):
    """Maximum relative error of Gauss-Legendre ``int_0^1 x^t dt`` against ``h(x)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    t, w = np.polynomial.legendre.leggauss(nodes)
    t, w = (t + 1) / 2, w / 2
    quad = (x[:, None] ** t[None, :]) @ w
    exact = _h(x)
    return float(np.max(np.abs(quad - exact) / np.abs(exact)))
