"""Recursive search with whole-budget assignment and per-node policy optimization.

Instead of walking one simulation at a time, this search hands each node
a simulation budget up front: one simulation pays for the node's own
inference, and the rest are split among its actions in proportion to the
prior policy (systematic sampling, assign_simulations). Each child is
searched recursively with its assigned budget; the child values come
back as Q, a KL-regularized policy optimization turns (Q, prior) into
the posterior policy, and the node's value is the budget-weighted blend
of its prior value with the posterior-expected Q.

The tree shape therefore never depends on observed values, which is
what makes the breadth-first implementation possible: all nodes at one
depth are independent given their budgets, so the whole level is
evaluated in a single evaluator call, expanded, and the values are
filled in by one backward sweep (search_rmcts_bfs). Node storage lives
in arrays preallocated from the budget bound (every materialized node
consumes at least one simulation, so a tree of budget N has at most N
nodes).

Both implementations draw each node's assignment offset from a counter
stream keyed by (seed, root index, action path), and share every
arithmetic helper, so their outputs are bit-identical; the recursive
form is the readable reference, the breadth-first form is the one that
batches.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import kernels
from .evaluators import Evaluator
from .games.base import Game, sgn_between
from .policy_opt import EPSILON
from .search import Algorithm, SearchParams, SearchResult, SearchStats

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_UNIT_SALT = 0xA5A5A5A5A5A5A5A5
_TERMINAL_SALT = 0xC3C3C3C3C3C3C3C3


def _splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _root_key(seed: int, root_index: int) -> int:
    return _splitmix64(_splitmix64(seed & _MASK) ^ ((root_index + 1) * _GOLDEN & _MASK))


def _child_key(key: int, action: int) -> int:
    # _splitmix64(key ^ ((action + 1) * _GOLDEN & _MASK)), inlined: this
    # runs once per materialized node
    x = ((key ^ ((action + 1) * _GOLDEN & _MASK)) + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def _unit_from_key(key: int) -> float:
    """Deterministic offset in [0, 1) with full double precision."""
    return (_splitmix64(key ^ _UNIT_SALT) >> 11) * (1.0 / (1 << 53))


@dataclass(frozen=True)
class SimAssignment:
    counts: np.ndarray  # int64, sums to the assigned total


def assign_simulations(n: int, prior: np.ndarray, rng) -> SimAssignment:
    """Split n simulations over actions in proportion to the prior.

    Systematic sampling: boundaries t_i = n * cumsum(prior) and a single
    uniform offset x = rng.random(); slot i receives #{k : t_{i-1} <=
    x+k < t_i}. Every count is within floor/ceil of its expectation
    prior[i]*n and the counts sum to n exactly.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    prior = np.asarray(prior, dtype=np.float64)
    if prior.ndim != 1 or prior.size < 1:
        raise ValueError("prior must be a nonempty vector")
    if np.any(prior < 0) or abs(prior.sum() - 1.0) > 1e-6:
        raise ValueError("prior must be a probability vector")
    counts = np.zeros(prior.size, dtype=np.int64)
    kernels.assign_counts(prior, n, float(rng.random()), counts)
    return SimAssignment(counts)


def _signed(sgn: int, value: float) -> float:
    return value if sgn > 0 else -value


def _terminal_value(game: Game, state, key: int) -> float:
    """Terminal payout in the terminal state's to-move perspective."""
    if game.stochastic_terminal:
        rng = np.random.default_rng(_splitmix64(key ^ _TERMINAL_SALT))
        return float(game.sample_terminal_score(state, state.to_move, rng))
    return float(game.terminal_score(state, state.to_move))


def _node_assignment(policy_full: np.ndarray, legal: np.ndarray, n_children: int, key: int):
    """(compact prior over legal actions, per-action simulation counts)."""
    prior_compact = policy_full[legal]
    counts = np.zeros(legal.size, dtype=np.int64)
    kernels.assign_counts(prior_compact, n_children, _unit_from_key(key), counts)
    return prior_compact, counts


def _posterior(v0: float, n: int, q_counted: np.ndarray, prior_counted: np.ndarray, c: float):
    """Posterior policy over the counted actions and the blended value.

    Operation-for-operation the same arithmetic as policy_opt.solve on
    the restriction (normalize prior, Newton kernel, closed form, final
    renormalization), inlined to keep the per-node cost down.
    """
    lam = c / math.sqrt(n - 1)
    prior = prior_counted / prior_counted.sum()
    u, _ = kernels.newton_common_ucb(q_counted, prior, lam, EPSILON)
    if math.isnan(u):
        raise RuntimeError("Newton failed to converge")
    pi = lam * prior / (u - q_counted)
    pi = pi / pi.sum()
    v_bar = v0 / n + (n - 1) / n * float(np.dot(q_counted, pi))
    return v_bar, pi


def _empty_result(game: Game):
    return (
        np.zeros(game.action_space_size, dtype=np.float64),
        np.zeros(game.action_space_size, dtype=np.int64),
    )


def search_rmcts_recursive(
    game: Game,
    root,
    params: SearchParams,
    evaluator: Evaluator,
    root_index: int = 0,
) -> SearchResult:
    """Reference implementation: plain depth-first recursion.

    root_index shifts the node key stream, aligning this search with the
    root at that position of a joint search_rmcts_bfs call.
    """
    if params.algorithm != Algorithm.RMCTS:
        raise ValueError("params.algorithm is not rmcts")
    t0 = time.perf_counter()
    counters = [0, 0]  # calls, items

    def evaluate_one(state):
        batch = evaluator.evaluate_batch(game, [state])
        counters[0] += 1
        counters[1] += 1
        return batch.responses[0], batch.requests[0]

    def rec(state, n: int, key: int):
        """Returns (value, policy_full or None, q_full, counts_full)."""
        q_full, counts_full = _empty_result(game)
        if game.is_terminal(state):
            return _terminal_value(game, state, key), None, q_full, counts_full
        evaluation, mask = evaluate_one(state)
        if n == 1:
            return evaluation.value, evaluation.policy.copy(), q_full, counts_full
        legal = np.flatnonzero(mask)  # ascending, matches legal_actions
        prior_compact, counts = _node_assignment(evaluation.policy, legal, n - 1, key)
        counted = counts > 0
        q_counted = np.empty(int(counted.sum()), dtype=np.float64)
        j = 0
        for i in range(legal.size):
            if counts[i] == 0:
                continue
            a = int(legal[i])
            child = game.apply(state, a)
            v_child, _, _, _ = rec(child, int(counts[i]), _child_key(key, a))
            q_counted[j] = _signed(sgn_between(state, child), v_child)
            j += 1
        v_bar, pi_counted = _posterior(
            evaluation.value, n, q_counted, prior_compact[counted], params.c
        )
        policy_full = np.zeros(game.action_space_size, dtype=np.float64)
        policy_full[legal[counted]] = pi_counted
        q_full[legal[counted]] = q_counted
        counts_full[legal] = counts
        return v_bar, policy_full, q_full, counts_full

    value, policy, q_full, counts_full = rec(
        root, params.n_sims, _root_key(params.seed, root_index)
    )
    stats = SearchStats(counters[0], counters[1], time.perf_counter() - t0)
    return SearchResult(policy, float(value), q_full, counts_full, stats)


class _Arena:
    """Preallocated node storage for one joint breadth-first search."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.state = [None] * capacity
        self.key = [0] * capacity
        self.n = np.zeros(capacity, dtype=np.int64)
        self.parent_sgn = np.zeros(capacity, dtype=np.int8)
        self.terminal = np.zeros(capacity, dtype=bool)
        self.v0 = np.zeros(capacity, dtype=np.float64)
        self.value = np.zeros(capacity, dtype=np.float64)
        self.first_child = np.full(capacity, -1, dtype=np.int64)
        self.n_children = np.zeros(capacity, dtype=np.int64)
        self.legal = [None] * capacity
        self.prior_compact = [None] * capacity
        self.counts = [None] * capacity
        self.leaf_policy = [None] * capacity  # kept for root slots only


def search_rmcts_bfs(
    game: Game, roots: list, params: SearchParams, evaluator: Evaluator
) -> list:
    """Breadth-first implementation: one evaluator batch per tree level.

    Bit-identical per root to search_rmcts_recursive(root, params,
    root_index=i); stats record the joint totals of the whole call.
    """
    if params.algorithm != Algorithm.RMCTS:
        raise ValueError("params.algorithm is not rmcts")
    t0 = time.perf_counter()
    n_roots = len(roots)
    arena = _Arena(params.n_sims * n_roots)
    calls = 0
    items = 0

    for i, root in enumerate(roots):
        arena.state[i] = root
        arena.key[i] = _root_key(params.seed, i)
        arena.n[i] = params.n_sims
        arena.terminal[i] = game.is_terminal(root)
    alloc = n_roots

    # forward pass: evaluate a whole level, then materialize its children
    levels = []
    lo, hi = 0, alloc
    while lo < hi:
        levels.append((lo, hi))
        to_eval = []
        for idx in range(lo, hi):
            if arena.terminal[idx]:
                arena.value[idx] = _terminal_value(game, arena.state[idx], arena.key[idx])
            else:
                to_eval.append(idx)
        if to_eval:
            batch = evaluator.evaluate_batch(game, [arena.state[i] for i in to_eval])
            calls += 1
            items += len(to_eval)
            idx_arr = np.asarray(to_eval, dtype=np.int64)
            vals = np.fromiter(
                (e.value for e in batch.responses), dtype=np.float64, count=len(to_eval)
            )
            arena.v0[idx_arr] = vals
            leaf = arena.n[idx_arr] == 1
            arena.value[idx_arr[leaf]] = vals[leaf]
            if lo < n_roots:  # level 0: leaf roots keep their prior as the policy
                for pos in np.flatnonzero(leaf):
                    idx = int(idx_arr[pos])
                    if idx < n_roots:
                        arena.leaf_policy[idx] = batch.responses[pos].policy.copy()
            apply = game.apply
            is_terminal = game.is_terminal
            a_state, a_key, a_n = arena.state, arena.key, arena.n
            a_sgn, a_term = arena.parent_sgn, arena.terminal
            for pos in np.flatnonzero(~leaf):
                idx = int(idx_arr[pos])
                evaluation = batch.responses[pos]
                state = a_state[idx]
                key = a_key[idx]
                legal = np.flatnonzero(batch.requests[pos])  # ascending, matches legal_actions
                prior_compact, counts = _node_assignment(
                    evaluation.policy, legal, int(a_n[idx]) - 1, key
                )
                arena.legal[idx] = legal
                arena.prior_compact[idx] = prior_compact
                arena.counts[idx] = counts
                arena.first_child[idx] = alloc
                legal_list = legal.tolist()
                for i, c in enumerate(counts.tolist()):
                    if c == 0:
                        continue
                    a = legal_list[i]
                    if alloc >= arena.capacity:
                        raise RuntimeError("arena exhausted; sizing bug")
                    child = apply(state, a)
                    a_state[alloc] = child
                    a_key[alloc] = _child_key(key, a)
                    a_n[alloc] = c
                    a_sgn[alloc] = sgn_between(state, child)
                    a_term[alloc] = is_terminal(child)
                    alloc += 1
                arena.n_children[idx] = alloc - arena.first_child[idx]
        lo, hi = hi, alloc

    # backward pass: children are contiguous and ascending by action
    root_pi = [None] * n_roots
    a_term, a_n, a_value = arena.terminal, arena.n, arena.value
    a_first, a_nch, a_sgn = arena.first_child, arena.n_children, arena.parent_sgn
    for lo, hi in reversed(levels):
        for idx in range(lo, hi):
            if a_term[idx] or a_n[idx] == 1:
                continue
            first = int(a_first[idx])
            count = int(a_nch[idx])
            cvals = a_value[first:first + count]
            q_counted = np.where(a_sgn[first:first + count] > 0, cvals, -cvals)
            counted = arena.counts[idx] > 0
            v_bar, pi_counted = _posterior(
                float(arena.v0[idx]),
                int(arena.n[idx]),
                q_counted,
                arena.prior_compact[idx][counted],
                params.c,
            )
            arena.value[idx] = v_bar
            if idx < n_roots:
                root_pi[idx] = (q_counted, pi_counted)

    stats = SearchStats(calls, items, time.perf_counter() - t0)
    results = []
    for i in range(n_roots):
        q_full, counts_full = _empty_result(game)
        value = float(arena.value[i])
        if arena.terminal[i]:
            results.append(SearchResult(None, value, q_full, counts_full, stats))
            continue
        if arena.n[i] == 1:
            results.append(
                SearchResult(arena.leaf_policy[i], value, q_full, counts_full, stats)
            )
            continue
        legal = arena.legal[i]
        counts = arena.counts[i]
        counted = counts > 0
        q_counted, pi_counted = root_pi[i]
        policy_full = np.zeros(game.action_space_size, dtype=np.float64)
        policy_full[legal[counted]] = pi_counted
        q_full[legal[counted]] = q_counted
        counts_full[legal] = counts
        results.append(SearchResult(policy_full, value, q_full, counts_full, stats))
    return results
