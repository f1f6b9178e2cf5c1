"""Batched prior providers for the searches.

An evaluator maps a batch of nonterminal states to per-state priors: a
value estimate v0 (game-score units, player-to-move perspective) and a
policy over the full action space. The base class owns legality masking,
renormalization, and thread-safe call counters; implementations are
calibration-free (uniform), handwritten (per-game heuristics), learned
(the tiny net in tinynet.py), or wrapped with synthetic latency for
timing studies.
"""

from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .games.base import Game, GameKind, Player


class Evaluation(NamedTuple):
    value: float
    policy: np.ndarray  # full action space; zero on illegal actions


@dataclass(frozen=True)
class EvalBatch:
    """One evaluator call: per-state legal masks and same-order results."""

    requests: list
    responses: list


class Evaluator:
    """Base class: masking, renormalization, and usage counters."""

    name = "base"

    def __init__(self):
        self._lock = threading.Lock()
        self.calls = 0
        self.items = 0

    def reset_counters(self) -> None:
        with self._lock:
            self.calls = 0
            self.items = 0

    def counters(self) -> tuple[int, int]:
        with self._lock:
            return self.calls, self.items

    def evaluate_batch(self, game: Game, states: list) -> EvalBatch:
        masks = []
        for s in states:
            if game.is_terminal(s):
                raise ValueError("cannot evaluate a terminal state")
            masks.append(game.legal_mask(s))
        values, policies = self._evaluate(game, states, masks)
        mask_arr = np.asarray(masks)
        policies = np.where(mask_arr, policies, 0.0)
        totals = policies.sum(axis=1)
        dead = totals <= 0.0
        if dead.any():
            # no prior mass on any legal action: fall back to uniform
            policies[dead] = mask_arr[dead]
            totals = policies.sum(axis=1)
        policies /= totals[:, None]
        responses = [
            Evaluation(v, p) for v, p in zip(np.asarray(values).tolist(), policies)
        ]
        with self._lock:
            self.calls += 1
            self.items += len(states)
        return EvalBatch(masks, responses)

    def _evaluate(self, game: Game, states: list, masks: list):
        """(per-state values, (batch, action_space) raw policy array).

        Raw policies need not be normalized; the base class masks and
        renormalizes. Implementations must be per-item deterministic so
        results do not depend on how states are grouped into batches.
        """
        raise NotImplementedError


class UniformEvaluator(Evaluator):
    """Zero value, uniform policy over legal actions."""

    name = "uniform"

    def _evaluate(self, game, states, masks):
        return (
            np.zeros(len(states)),
            np.ones((len(states), game.action_space_size), dtype=np.float64),
        )


class HeuristicEvaluator(Evaluator):
    """Handwritten value estimates with one-ply lookahead policies.

    The value function is game-specific (in score units, player-to-move
    perspective); the policy is a softmax over each legal child's value
    for the mover, so obviously strong moves get most of the prior mass.
    """

    name = "heuristic"

    def __init__(self, sharpness: float = 4.0):
        super().__init__()
        self.sharpness = sharpness

    def _evaluate(self, game, states, masks):
        values = np.empty(len(states))
        policies = np.zeros((len(states), game.action_space_size), dtype=np.float64)
        scale = game.max_score()
        for row, s in enumerate(states):
            acts = game.legal_actions(s)
            child_vals = np.empty(len(acts), dtype=np.float64)
            for i, a in enumerate(acts):
                child = game.apply(s, a)
                if game.is_terminal(child):
                    v = game.terminal_score(child, s.to_move)
                else:
                    v = self._value(game, child, s.to_move)
                child_vals[i] = v
            logits = self.sharpness * child_vals / scale
            policies[row, acts] = np.exp(logits - logits.max())
            values[row] = self._value(game, s, s.to_move)
        return values, policies

    def _value(self, game, s, perspective: Player) -> float:
        if game.is_terminal(s):
            return game.terminal_score(s, perspective)
        kind = game.config.game if game.config is not None else None
        if kind == GameKind.CONNECT4:
            v = _connect4_value(game, s)
        elif kind == GameKind.OTHELLO:
            v = _othello_value(game, s)
        elif kind == GameKind.DOTS_AND_BOXES:
            v = _dots_value(game, s)
        else:
            return 0.0
        # v is for the player to move in s; flip if asked for the other seat
        return v if perspective == s.to_move else -v


def _connect4_value(game, s) -> float:
    """Window counting: near-complete own lines minus the opponent's."""
    windows = _connect4_windows(game)
    own = s.p1_bb if s.to_move == Player.P1 else s.p2_bb
    opp = s.p2_bb if s.to_move == Player.P1 else s.p1_bb
    k = game.k
    score = 0.0
    for w in windows:
        mine = (own & w).bit_count()
        theirs = (opp & w).bit_count()
        if theirs == 0 and mine > 0:
            score += (mine / k) ** 2
        elif mine == 0 and theirs > 0:
            score -= (theirs / k) ** 2
    return math.tanh(0.35 * score)


def _connect4_windows(game) -> list:
    cached = getattr(game, "_heuristic_windows", None)
    if cached is not None:
        return cached
    stride = game.height + 1
    k = game.k
    windows = []
    for c in range(game.width):
        for r in range(game.height):
            for dc, dr in ((0, 1), (1, 0), (1, 1), (1, -1)):
                ec, er = c + dc * (k - 1), r + dr * (k - 1)
                if not (0 <= ec < game.width and 0 <= er < game.height):
                    continue
                w = 0
                for i in range(k):
                    w |= 1 << ((c + dc * i) * stride + (r + dr * i))
                windows.append(w)
    game._heuristic_windows = windows
    return windows


def _othello_value(game, s) -> float:
    """Corners, mobility, and (late) disc count, in disc units."""
    own, opp = game._own_opp(s)
    n = game.n
    corners = (0, n - 1, n * (n - 1), n * n - 1)
    corner_diff = 0
    for i in corners:
        bit = 1 << i
        if own & bit:
            corner_diff += 1
        elif opp & bit:
            corner_diff -= 1
    my_moves = game._placement_mask(own, opp).bit_count()
    opp_moves = game._placement_mask(opp, own).bit_count()
    disc_diff = own.bit_count() - opp.bit_count()
    progress = (own.bit_count() + opp.bit_count()) / game.n_cells
    v = (
        0.35 * game.n_cells / 4 * corner_diff
        + 0.8 * (my_moves - opp_moves)
        + disc_diff * progress * progress
    )
    return max(-game.n_cells * 0.95, min(game.n_cells * 0.95, v))


def _dots_value(game, s) -> float:
    """Boxes already owned plus boxes capturable right now, in box units."""
    own, opp = (
        (s.p1_boxes, s.p2_boxes) if s.to_move == Player.P1 else (s.p2_boxes, s.p1_boxes)
    )
    capturable = 0
    risky = 0
    for b, mask in enumerate(game._box_mask):
        if (own | opp) & (1 << b):
            continue
        drawn = (s.edges & mask).bit_count()
        if drawn == 3:
            capturable += 1
        elif drawn == 2:
            risky += 1
    v = (own.bit_count() - opp.bit_count()) + 0.9 * capturable - 0.3 * risky
    return max(-game.n_boxes * 0.95, min(game.n_boxes * 0.95, v))


@dataclass(frozen=True)
class LatencyModel:
    """Synthetic per-call inference cost, in microseconds."""

    fixed_overhead: float
    per_item_cost: float = 0.0

    def __post_init__(self):
        if self.fixed_overhead < 0 or self.per_item_cost < 0:
            raise ValueError("latency costs must be >= 0")

    def batch_seconds(self, n_items: int) -> float:
        return (self.fixed_overhead + self.per_item_cost * n_items) * 1e-6


class LatencyEvaluator(Evaluator):
    """Wraps another evaluator, sleeping per call to model inference cost."""

    def __init__(self, inner: Evaluator, model: LatencyModel):
        super().__init__()
        self.inner = inner
        self.model = model
        self.name = f"{inner.name}+latency"

    def evaluate_batch(self, game, states):
        delay = self.model.batch_seconds(len(states))
        if delay > 0:
            time.sleep(delay)
        batch = self.inner.evaluate_batch(game, states)
        with self._lock:
            self.calls += 1
            self.items += len(states)
        return batch

    def reset_counters(self):
        super().reset_counters()
        self.inner.reset_counters()


def with_latency(evaluator: Evaluator, model: LatencyModel) -> LatencyEvaluator:
    return LatencyEvaluator(evaluator, model)
