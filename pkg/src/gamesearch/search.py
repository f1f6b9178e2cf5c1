"""Shared search types and the algorithm dispatcher."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class Algorithm(str, Enum):
    UCB = "ucb"
    RMCTS = "rmcts"


@dataclass(frozen=True)
class SearchParams:
    n_sims: int
    c: float = 1.0
    seed: int = 0
    algorithm: Algorithm = Algorithm.RMCTS

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be > 0")
        minimum = 2 if self.algorithm == Algorithm.UCB else 1
        if self.n_sims < minimum:
            raise ValueError(
                f"n_sims must be >= {minimum} for {self.algorithm.value}"
            )


@dataclass(frozen=True)
class SearchStats:
    eval_calls: int
    eval_items: int
    wall_time: float

    def as_dict(self) -> dict:
        return {
            "eval_calls": self.eval_calls,
            "eval_items": self.eval_items,
            "wall_time": self.wall_time,
        }


@dataclass(frozen=True)
class SearchResult:
    """Output of one root search.

    policy/q/counts are full-action-space vectors (zero outside the
    actions the search touched); policy is None only for a terminal
    root. For joint multi-root searches the stats fields record the
    joint totals of the whole call, stamped on every root's result.
    """

    policy: "np.ndarray | None"
    value: float
    q: np.ndarray
    counts: np.ndarray
    stats: SearchStats

    def best_action(self) -> int:
        if self.policy is None:
            raise ValueError("terminal root has no policy")
        return int(np.argmax(self.policy))


def derived_seed(*key) -> int:
    """Well-mixed 32-bit seed from an integer tuple."""
    return int(np.random.SeedSequence(key).generate_state(1)[0])


def sample_policy(policy: np.ndarray, *key) -> int:
    """Draw one action from the policy with a key-derived uniform."""
    rng = np.random.default_rng(np.random.SeedSequence(key))
    cdf = np.cumsum(policy)
    a = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(a, len(policy) - 1)


def run_search(game, root, params: SearchParams, evaluator) -> SearchResult:
    """Single-root dispatch on params.algorithm."""
    if params.algorithm == Algorithm.UCB:
        from .mcts_ucb import search_ucb

        return search_ucb(game, root, params, evaluator)
    from .rmcts import search_rmcts_bfs

    return search_rmcts_bfs(game, [root], params, evaluator)[0]


def run_search_multi(game, roots, params: SearchParams, evaluator) -> list:
    """Multi-root dispatch; one joint, batch-friendly search per call."""
    if params.algorithm == Algorithm.UCB:
        from .mcts_ucb import search_ucb_multi

        return search_ucb_multi(game, roots, params, evaluator)
    from .rmcts import search_rmcts_bfs

    return search_rmcts_bfs(game, roots, params, evaluator)
