"""Bandit-style tree search with visit-count bookkeeping.

Each simulation walks from the root through already-visited nodes,
always taking the action with the maximal upper-confidence score

    Q(t,a) + C * prior(t,a) * sqrt(sum_b N(t,b)) / (1 + N(t,a))

until it reaches an unvisited or terminal node. Unvisited nonterminal
nodes cost one evaluator inference; terminal nodes pay out their exact
(or, for stochastic games, freshly sampled) score. The leaf value is
then averaged into Q along the path, sign-adjusted per node so every
Q(t,a) is from the perspective of the player to move at t. The returned
policy is the normalized root visit counts.

The root's own inference consumes the first simulation, so the root
action counts sum to n_sims - 1.

The multi-root variant runs many independent searches in lockstep: each
search suspends whenever it needs an inference, and all pending
inferences across roots are flushed as one evaluator batch per sweep.
The single-root search is the one-root special case of the same driver,
so both variants produce identical results by construction.
"""

from __future__ import annotations

import time

import numpy as np

from . import kernels
from .evaluators import Evaluator
from .games.base import Game
from .search import Algorithm, SearchParams, SearchResult, SearchStats


class _Node:
    __slots__ = ("state", "terminal", "visited", "legal", "prior", "q", "n", "children")

    def __init__(self, game: Game, state):
        self.state = state
        self.terminal = game.is_terminal(state)
        self.visited = False
        self.legal = None
        self.prior = None
        self.q = None
        self.n = None
        self.children = None


def _search_gen(game: Game, root, params: SearchParams, rng):
    """One root's search; yields states needing inference, receives Evaluations."""
    root_node = _Node(game, root)
    if root_node.terminal:
        raise ValueError("root is terminal")
    c = params.c
    remaining = params.n_sims
    while remaining > 0:
        t = root_node
        path = []
        while t.visited and not t.terminal:
            i = kernels.ucb_argmax(t.q, t.n, t.prior, c)
            if t.children[i] is None:
                t.children[i] = _Node(game, game.apply(t.state, int(t.legal[i])))
            path.append((t, i))
            t = t.children[i]
        if t.terminal:
            leaf_value = game.sample_terminal_score(t.state, t.state.to_move, rng)
        else:
            evaluation = yield t.state
            legal = game.legal_actions(t.state)
            t.legal = np.asarray(legal, dtype=np.int64)
            t.prior = evaluation.policy[t.legal]
            t.q = np.zeros(len(legal), dtype=np.float64)
            t.n = np.zeros(len(legal), dtype=np.int64)
            t.children = [None] * len(legal)
            t.visited = True
            leaf_value = evaluation.value
        leaf_to_move = t.state.to_move
        for node, i in path:
            node.n[i] += 1
            v = leaf_value if node.state.to_move == leaf_to_move else -leaf_value
            node.q[i] += (v - node.q[i]) / node.n[i]
        remaining -= 1

    counts = np.zeros(game.action_space_size, dtype=np.int64)
    q = np.zeros(game.action_space_size, dtype=np.float64)
    counts[root_node.legal] = root_node.n
    q[root_node.legal] = root_node.q
    policy = counts / counts.sum()
    value = float(np.dot(policy[root_node.legal], root_node.q))
    return policy, value, q, counts


def search_ucb_multi(
    game: Game, roots: list, params: SearchParams, evaluator: Evaluator
) -> list:
    """Independent per-root searches, with inferences batched per sweep."""
    if params.algorithm != Algorithm.UCB:
        raise ValueError("params.algorithm is not ucb")
    t0 = time.perf_counter()
    gens = []
    for i, root in enumerate(roots):
        rng = np.random.default_rng(np.random.SeedSequence((params.seed, i)))
        gens.append(_search_gen(game, root, params, rng))
    partial = [None] * len(roots)
    calls = 0
    items = 0
    requests = []
    for i, gen in enumerate(gens):
        try:
            requests.append((i, next(gen)))
        except StopIteration as stop:  # pragma: no cover - roots always evaluate
            partial[i] = stop.value
    while requests:
        batch = evaluator.evaluate_batch(game, [s for _, s in requests])
        calls += 1
        items += len(requests)
        advanced = []
        for (i, _), evaluation in zip(requests, batch.responses):
            try:
                advanced.append((i, gens[i].send(evaluation)))
            except StopIteration as stop:
                partial[i] = stop.value
        requests = advanced
    stats = SearchStats(calls, items, time.perf_counter() - t0)
    return [
        SearchResult(policy, value, q, counts, stats)
        for policy, value, q, counts in partial
    ]


def search_ucb(game: Game, root, params: SearchParams, evaluator: Evaluator) -> SearchResult:
    return search_ucb_multi(game, [root], params, evaluator)[0]
