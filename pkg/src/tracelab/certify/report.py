"""Result containers shared by certifiers and searches."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..io import matrix_to_json, to_jsonable

TOL_CERT = 1e-7
HOLDS = "holds_within_tol"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


def relative(gap, scale):
    return gap / max(scale, 1e-300)


def _serialize_inputs(inputs):
    out = {}
    for k, v in inputs.items():
        if isinstance(v, np.ndarray) and v.ndim == 2 and v.shape[0] == v.shape[1]:
            out[k] = matrix_to_json(v)
        else:
            out[k] = to_jsonable(v)
    return out


@dataclass
class TrialResult:
    """One trial: the worst gap it saw, the scale it is measured against and its inputs."""

    gap: float
    scale: float
    inputs: dict = field(default_factory=dict, repr=False)

    @property
    def relative_gap(self):
        return relative(self.gap, self.scale)


@dataclass
class CertReport:
    """Outcome of a randomized certification run.

    ``min_gap`` is the smallest relative gap ``gap / scale`` over all trials;
    the verdict is ``violated`` exactly when it drops below ``-tol``.
    """

    claim: str
    trials: int
    min_gap: float
    worst_gap: float
    worst_scale: float
    witness: dict
    seed: int
    params: dict = field(default_factory=dict)
    tol: float = TOL_CERT
    gaps: list = field(default_factory=list, repr=False)

    @property
    def verdict(self):
        return VIOLATED if self.min_gap < -self.tol else HOLDS

    @property
    def holds(self):
        return self.verdict == HOLDS

    @classmethod
    def from_trials(cls, claim, results, seed, params=None, tol=TOL_CERT):
        if not results:
            raise ValueError("a report needs at least one trial")
        worst = min(range(len(results)), key=lambda i: results[i].relative_gap)
        w = results[worst]
        return cls(
            claim=claim,
            trials=len(results),
            min_gap=w.relative_gap,
            worst_gap=w.gap,
            worst_scale=w.scale,
            witness=_serialize_inputs(w.inputs),
            seed=int(seed),
            params=dict(params or {}),
            tol=tol,
            gaps=[(r.gap, r.scale) for r in results],
        )

    def merge(self, other):
        """Combine two runs of the same claim (min-gap wins the witness)."""
        if other.claim != self.claim:
            raise ValueError("cannot merge reports of different claims")
        a, b = (self, other) if self.min_gap <= other.min_gap else (other, self)
        return CertReport(
            self.claim, self.trials + other.trials, a.min_gap, a.worst_gap, a.worst_scale,
            a.witness, self.seed, self.params, min(self.tol, other.tol), self.gaps + other.gaps,
        )

    def csv_rows(self):
        yield ("trial", "gap", "scale")
        for i, (g, s) in enumerate(self.gaps):
            yield (i, repr(float(g)), repr(float(s)))

    def to_dict(self):
        return {
            "claim": self.claim,
            "trials": self.trials,
            "min_gap": self.min_gap,
            "worst_gap": self.worst_gap,
            "worst_scale": self.worst_scale,
            "tol": self.tol,
            "verdict": self.verdict,
            "seed": self.seed,
            "params": to_jsonable(self.params),
            "witness": self.witness,
        }


@dataclass
class SearchWitness:
    """A counterexample found by search.

    ``margin`` is the relative size of the violation seen by the search and
    ``verified_margin`` the same quantity recomputed with Jacobi
    eigendecompositions and compensated sums.
    """

    claim: str
    matrices: dict
    margin: float
    verified_margin: float
    n: int
    evaluations: int
    seed: int
    params: dict = field(default_factory=dict)
    stage: str = ""
    tol: float = TOL_CERT

    @property
    def reverified(self):
        return self.verified_margin >= 0.5 * self.margin

    @property
    def agreement(self):
        """Relative disagreement between the two margins."""
        return abs(self.verified_margin - self.margin) / max(abs(self.margin), 1e-300)

    @property
    def conclusive(self):
        return self.margin > self.tol and self.reverified

    def to_dict(self):
        return {
            "claim": self.claim,
            "n": self.n,
            "margin": self.margin,
            "verified_margin": self.verified_margin,
            "reverified": self.reverified,
            "evaluations": self.evaluations,
            "stage": self.stage,
            "seed": self.seed,
            "params": to_jsonable(self.params),
            "matrices": _serialize_inputs(self.matrices),
        }


def worker_count(workers=None):
    """Explicit ``workers`` wins; otherwise ``TRACELAB_THREADS`` (default 1)."""
    if workers is None:
        workers = int(os.environ.get("TRACELAB_THREADS", "1") or 1)
    return max(1, int(workers))


def run_trials(trial, seed, trials, workers=None):
    """Run ``trial(rng)`` on independent child streams of ``SeedSequence(seed)``.

    Results come back in trial order whatever the worker count, so reports
    do not depend on scheduling.
    """
    children = np.random.SeedSequence(int(seed)).spawn(int(trials))
    rngs = [np.random.default_rng(c) for c in children]
    workers = worker_count(workers)
    if workers == 1:
        return [trial(r) for r in rngs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(trial, rngs))
