"""Small handwritten games used by demos and tests.

TabularGame wraps an explicit one-player game tree (children or terminal
values given literally). BanditGame is a one-player slot machine whose
arms pay +1/-1 stochastically; it is the one game with stochastic
terminal payouts, sampled per visit from a caller-owned RNG.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .base import Game, IllegalActionError, MoveParseError, NonTerminalError, Player

TreeSpec = dict[str, "list[str] | float"]


class TabularState(NamedTuple):
    key: str
    to_move: Player


class TabularGame(Game):
    """One-player game over an explicit tree.

    tree maps a state key either to a list of child keys (nonterminal)
    or to a terminal value for player 1.
    """

    def __init__(self, tree: TreeSpec, root: str):
        if root not in tree:
            raise ValueError(f"root {root!r} not in tree")
        self.tree = dict(tree)
        self.root = root
        self.config = None
        self._keys = sorted(self.tree)
        self._key_index = {k: i for i, k in enumerate(self._keys)}
        self.action_space_size = max(
            (len(v) for v in self.tree.values() if isinstance(v, list)), default=1
        )

    def initial_state(self) -> TabularState:
        return TabularState(self.root, Player.P1)

    def _children(self, s: TabularState) -> "list[str] | None":
        node = self.tree[s.key]
        return node if isinstance(node, list) else None

    def legal_actions(self, s: TabularState) -> list[int]:
        children = self._children(s)
        if children is None:
            return []
        return list(range(len(children)))

    def apply(self, s: TabularState, a: int) -> TabularState:
        children = self._children(s)
        if children is None:
            raise IllegalActionError("state is terminal")
        if not 0 <= a < len(children):
            raise IllegalActionError(f"no such action: {a}")
        return TabularState(children[a], Player.P1)

    def is_terminal(self, s: TabularState) -> bool:
        return self._children(s) is None

    def terminal_score(self, s: TabularState, perspective: Player) -> float:
        node = self.tree[s.key]
        if isinstance(node, list):
            raise NonTerminalError("state is not terminal")
        return float(node) if perspective == Player.P1 else -float(node)

    def encoding_shape(self) -> tuple[int, ...]:
        return (len(self._keys),)

    def encode(self, s: TabularState) -> np.ndarray:
        vec = np.zeros(self.encoding_shape(), dtype=np.float32)
        vec[self._key_index[s.key]] = 1.0
        return vec

    def render(self, s: TabularState) -> str:
        node = self.tree[s.key]
        if isinstance(node, list):
            return f"state {s.key}, actions -> {', '.join(node)}"
        return f"terminal {s.key}, value {node}"

    def parse_move(self, text: str) -> int:
        t = text.strip()
        if not t.isdigit():
            raise MoveParseError(f"expected an action index, got {text!r}")
        return int(t)

    def action_name(self, a: int) -> str:
        return str(a)

    def max_score(self) -> float:
        vals = [abs(float(v)) for v in self.tree.values() if not isinstance(v, list)]
        return max(vals) if vals else 1.0

    def max_game_length(self) -> int:
        def depth(key: str) -> int:
            node = self.tree[key]
            if not isinstance(node, list):
                return 0
            return 1 + max(depth(k) for k in node)

        return depth(self.root)


def binary_tree_game() -> TabularGame:
    """Two-level binary tree: left pays 1; right leads to a choice of -3 or 2."""
    tree: TreeSpec = {
        "s": ["s.l", "t"],
        "s.l": 1.0,
        "t": ["t.l", "t.r"],
        "t.l": -3.0,
        "t.r": 2.0,
    }
    return TabularGame(tree, root="s")


class BanditState(NamedTuple):
    arm: int  # -1 before an arm is pulled
    to_move: Player


class BanditGame(Game):
    """One-player slot machine; arm i pays +1 with probability probs[i], else -1."""

    stochastic_terminal = True

    def __init__(self, probs: "tuple[float, ...] | list[float]"):
        probs = tuple(float(p) for p in probs)
        if not probs or any(not 0.0 <= p <= 1.0 for p in probs):
            raise ValueError("arm probabilities must be in [0, 1]")
        self.probs = probs
        self.config = None
        self.action_space_size = len(probs)

    def initial_state(self) -> BanditState:
        return BanditState(-1, Player.P1)

    def legal_actions(self, s: BanditState) -> list[int]:
        if s.arm >= 0:
            return []
        return list(range(len(self.probs)))

    def apply(self, s: BanditState, a: int) -> BanditState:
        if s.arm >= 0:
            raise IllegalActionError("arm already pulled")
        if not 0 <= a < len(self.probs):
            raise IllegalActionError(f"no such arm: {a}")
        return BanditState(a, Player.P1)

    def is_terminal(self, s: BanditState) -> bool:
        return s.arm >= 0

    def terminal_score(self, s: BanditState, perspective: Player) -> float:
        # expected payout; per-visit draws go through sample_terminal_score
        if s.arm < 0:
            raise NonTerminalError("no arm pulled yet")
        value = 2.0 * self.probs[s.arm] - 1.0
        return value if perspective == Player.P1 else -value

    def sample_terminal_score(
        self, s: BanditState, perspective: Player, rng: np.random.Generator
    ) -> float:
        if s.arm < 0:
            raise NonTerminalError("no arm pulled yet")
        value = 1.0 if rng.random() < self.probs[s.arm] else -1.0
        return value if perspective == Player.P1 else -value

    def encoding_shape(self) -> tuple[int, ...]:
        return (len(self.probs) + 1,)

    def encode(self, s: BanditState) -> np.ndarray:
        vec = np.zeros(self.encoding_shape(), dtype=np.float32)
        vec[s.arm + 1] = 1.0
        return vec

    def render(self, s: BanditState) -> str:
        if s.arm < 0:
            return f"bandit with {len(self.probs)} arms, none pulled"
        return f"pulled arm {s.arm}"

    def parse_move(self, text: str) -> int:
        t = text.strip()
        if not t.isdigit():
            raise MoveParseError(f"expected an arm index, got {text!r}")
        return int(t)

    def action_name(self, a: int) -> str:
        return str(a)

    def max_score(self) -> float:
        return 1.0

    def max_game_length(self) -> int:
        return 1
