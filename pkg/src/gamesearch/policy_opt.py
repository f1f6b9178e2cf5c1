"""KL-regularized policy optimization.

Given action rewards Q, a prior policy, a simulation count N, and an
exploration constant C, find the policy maximizing

    sum_a pi(a) Q(a) - (C/sqrt(N)) * KL(prior || pi)

The optimum has the closed form pi(a) = lam * prior(a) / (u - Q(a)) with
lam = C/sqrt(N), where u is the unique root of f(u) = -1 + lam *
sum(prior/(u - Q)) above max(Q); u is found by Newton's method. A
reverse-KL variant (penalizing KL(pi || prior)) has a softmax solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels

EPSILON = 1e-10
MAX_NEWTON_ITERATIONS = 1000


@dataclass(frozen=True)
class PolicyOptProblem:
    q: np.ndarray
    prior: np.ndarray
    n_sims: int
    c: float

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        prior = np.asarray(self.prior, dtype=np.float64)
        if q.ndim != 1 or prior.shape != q.shape or q.shape[0] < 1:
            raise ValueError("q and prior must be equal-length vectors")
        if not np.all(np.isfinite(q)):
            raise ValueError("q entries must be finite")
        if np.any(prior <= 0.0) or not np.all(np.isfinite(prior)):
            raise ValueError("prior entries must be positive and finite")
        if self.n_sims < 1:
            raise ValueError("n_sims must be >= 1")
        if not self.c > 0.0:
            raise ValueError("c must be > 0")
        # accept positive weights; store the normalized prior
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "prior", prior / prior.sum())

    @property
    def lam(self) -> float:
        return self.c / math.sqrt(self.n_sims)


@dataclass(frozen=True)
class OptimizedPolicy:
    pi_bar: np.ndarray
    u: float
    iterations: int


def solve(problem: PolicyOptProblem) -> OptimizedPolicy:
    """Optimal policy for the forward-KL objective via Newton's method."""
    lam = problem.lam
    u, iterations = kernels.newton_common_ucb(problem.q, problem.prior, lam, EPSILON)
    if math.isnan(u):
        raise RuntimeError(f"Newton failed to converge in {iterations} iterations")
    pi = lam * problem.prior / (u - problem.q)
    pi_bar = pi / pi.sum()
    return OptimizedPolicy(pi_bar, float(u), int(iterations))


def objective(pi: np.ndarray, problem: PolicyOptProblem) -> float:
    """F(pi) = sum(pi * q) - lam * KL(prior || pi)."""
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != problem.q.shape:
        raise ValueError("pi has the wrong length")
    if np.any(pi <= 0.0):
        raise ValueError("pi must be strictly positive where the prior is")
    kl = float(np.sum(problem.prior * np.log(problem.prior / pi)))
    return float(np.dot(pi, problem.q)) - problem.lam * kl


def ucb(q_a: float, prior_a: float, n_parent_total: float, n_action: float, c: float) -> float:
    """Upper-confidence score of one action under visit-count bookkeeping."""
    return q_a + c * prior_a * math.sqrt(n_parent_total) / (1.0 + n_action)


def solve_reverse_kl(problem: PolicyOptProblem) -> np.ndarray:
    """Optimal policy when the KL penalty is KL(pi || prior) instead.

    Closed form pi(a) proportional to prior(a) * exp(q(a)/lam), computed
    with max-subtraction.
    """
    logits = problem.q / problem.lam
    w = problem.prior * np.exp(logits - logits.max())
    return w / w.sum()


def newton_iterates(problem: PolicyOptProblem) -> "tuple[list[float], float]":
    """All Newton iterates (including the start) and the final f value.

    Mirrors the solver loop operation for operation; a verification aid
    for the monotone-convergence property.
    """
    q, prior, lam = problem.q, problem.prior, problem.lam
    n = q.shape[0]
    u = q[0] + lam * prior[0]
    for i in range(1, n):
        v = q[i] + lam * prior[i]
        if v > u:
            u = v
    iterates = [float(u)]
    f = -1.0
    while True:
        f = -1.0
        fp = 0.0
        for i in range(n):
            d = u - q[i]
            t = prior[i] / d
            f += lam * t
            fp -= lam * t / d
        if f <= EPSILON:
            break
        u = u - f / fp
        iterates.append(float(u))
        if len(iterates) > MAX_NEWTON_ITERATIONS:
            raise RuntimeError("Newton failed to converge")
    return iterates, float(f)
