"""Exact game solving by memoized negamax, for desk-scale positions.

Used by tests and benchmarks to label positions with ground truth:
exact values, forced wins, and the set of optimal moves. Only suitable
for small boards; the memo is keyed by state, so states must be
hashable (all engine states are).
"""

from __future__ import annotations

from dataclasses import dataclass

from .games.base import Game, sgn_between


@dataclass(frozen=True)
class SolvedPosition:
    state: object
    value: float  # exact score for the player to move
    best_actions: tuple[int, ...]
    plies_to_end: int  # length of one optimal line


def solve(game: Game, state, memo: dict | None = None) -> SolvedPosition:
    """Exact value of `state` for its player to move, with optimal play."""
    if memo is None:
        memo = {}
    hit = memo.get(state)
    if hit is not None:
        return hit
    if game.is_terminal(state):
        out = SolvedPosition(state, game.terminal_score(state, state.to_move), (), 0)
        memo[state] = out
        return out
    best_value = None
    best_actions: list[int] = []
    best_plies = 0
    for a in game.legal_actions(state):
        child = game.apply(state, a)
        sub = solve(game, child, memo)
        # child value is for child's mover; flip into this mover's frame
        value = sgn_between(state, child) * sub.value
        if best_value is None or value > best_value:
            best_value = value
            best_actions = [a]
            best_plies = sub.plies_to_end + 1
        elif value == best_value:
            best_actions.append(a)
            best_plies = min(best_plies, sub.plies_to_end + 1)
    out = SolvedPosition(state, best_value, tuple(best_actions), best_plies)
    memo[state] = out
    return out


def forced_win_positions(
    game: Game,
    max_positions: int,
    max_plies_to_win: int,
    require_unique_best: bool = True,
) -> list[SolvedPosition]:
    """Enumerate reachable positions where the mover wins by force, quickly.

    Walks the full reachable state space (breadth-first from the initial
    position), solving as it goes, and keeps positions whose mover has a
    strictly positive exact value achievable within max_plies_to_win
    plies, optionally only when a single move preserves the win. Results
    are in a stable discovery order.
    """
    memo: dict = {}
    found: list[SolvedPosition] = []
    seen = {game.initial_state()}
    frontier = [game.initial_state()]
    while frontier and len(found) < max_positions:
        next_frontier = []
        for s in frontier:
            if game.is_terminal(s):
                continue
            sol = solve(game, s, memo)
            if sol.value > 0 and sol.plies_to_end <= max_plies_to_win:
                if not require_unique_best or len(sol.best_actions) == 1:
                    found.append(sol)
                    if len(found) >= max_positions:
                        break
            for a in game.legal_actions(s):
                child = game.apply(s, a)
                if child not in seen:
                    seen.add(child)
                    next_frontier.append(child)
        frontier = next_frontier
    return found
