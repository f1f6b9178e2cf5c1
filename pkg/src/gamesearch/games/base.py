"""Common game interface shared by all engines.

States are immutable value objects; every rule query goes through the
owning ``Game`` instance. Scores are raw point differences relative to a
stated player (win/loss sign for Connect-4, disc difference for Othello,
box difference for Dots-and-Boxes).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Any, Sequence

import numpy as np


class Player(IntEnum):
    P1 = 0
    P2 = 1

    @property
    def other(self) -> "Player":
        return Player(1 - self)


class GameKind(str, Enum):
    CONNECT4 = "connect4"
    DOTS_AND_BOXES = "dotsandboxes"
    OTHELLO = "othello"


@dataclass(frozen=True)
class GameConfig:
    """Board-size configuration for the three standard games.

    Connect-4 defaults to 7x6 with k=4; Othello is square with even side 6
    or 8; Dots-and-Boxes width/height count boxes, at least 1x1.
    """

    game: GameKind
    width: int = 0
    height: int = 0
    connect_k: int = 4

    def __post_init__(self):
        if self.game == GameKind.CONNECT4:
            w = self.width or 7
            h = self.height or 6
            object.__setattr__(self, "width", w)
            object.__setattr__(self, "height", h)
            if not (2 <= self.connect_k <= max(w, h)):
                raise ValueError(f"connect_k={self.connect_k} does not fit a {w}x{h} board")
        elif self.game == GameKind.OTHELLO:
            w = self.width or 8
            object.__setattr__(self, "width", w)
            object.__setattr__(self, "height", self.height or w)
            if self.width != self.height or self.width not in (6, 8):
                raise ValueError("othello board must be square with side 6 or 8")
        elif self.game == GameKind.DOTS_AND_BOXES:
            object.__setattr__(self, "width", self.width or 2)
            object.__setattr__(self, "height", self.height or self.width or 2)
            if self.width < 1 or self.height < 1:
                raise ValueError("dots-and-boxes grid must be at least 1x1")


class IllegalActionError(ValueError):
    """Raised by apply() for an action not legal in the given state."""


class MoveParseError(ValueError):
    """Raised by parse_move() for text that is not a well-formed move."""


class NonTerminalError(ValueError):
    """Raised when a terminal-only query is made on a live state."""


def sgn_between(s, t) -> int:
    """+1 if the same player is to move in both states, else -1."""
    return 1 if s.to_move == t.to_move else -1


class Game(ABC):
    """Rules engine for one configuration; all methods are pure."""

    #: total number of action slots, fixed for the lifetime of the config
    action_space_size: int
    #: games whose terminal payout is a chance outcome (sampled per visit)
    stochastic_terminal: bool = False

    @abstractmethod
    def initial_state(self) -> Any: ...

    @abstractmethod
    def legal_actions(self, s) -> list[int]:
        """Sorted action ids; nonempty iff s is nonterminal."""

    @abstractmethod
    def apply(self, s, a: int) -> Any:
        """Successor of s under legal action a (raises IllegalActionError)."""

    @abstractmethod
    def is_terminal(self, s) -> bool: ...

    @abstractmethod
    def terminal_score(self, s, perspective: Player) -> float:
        """Final score of a terminal state relative to `perspective`."""

    @abstractmethod
    def encoding_shape(self) -> tuple[int, ...]: ...

    @abstractmethod
    def encode(self, s) -> np.ndarray:
        """Fixed-shape float32 planes from the player-to-move perspective."""

    @abstractmethod
    def render(self, s) -> str: ...

    @abstractmethod
    def parse_move(self, text: str) -> int: ...

    @abstractmethod
    def action_name(self, a: int) -> str: ...

    @abstractmethod
    def max_score(self) -> float:
        """Bound B with |terminal_score| <= B for this configuration."""

    @abstractmethod
    def max_game_length(self) -> int: ...

    def legal_mask(self, s) -> np.ndarray:
        mask = np.zeros(self.action_space_size, dtype=bool)
        mask[self.legal_actions(s)] = True
        return mask

    def encode_into(self, states, out: np.ndarray) -> None:
        """Write flattened encodings of the states into the rows of out.

        Row i must equal encode(states[i]).ravel(); games override this
        with a batched computation where one is available.
        """
        for i, s in enumerate(states):
            out[i] = self.encode(s).ravel()

    def sample_terminal_score(self, s, perspective: Player, rng) -> float:
        """Terminal payout for one visit; deterministic games ignore rng."""
        return self.terminal_score(s, perspective)


def random_playout(game: Game, state, rng, max_plies: int | None = None):
    """Play uniformly random moves to the end; returns the terminal state."""
    limit = max_plies if max_plies is not None else game.max_game_length()
    s = state
    plies = 0
    while not game.is_terminal(s):
        if plies >= limit:
            raise RuntimeError("playout exceeded the game's move bound")
        acts = game.legal_actions(s)
        s = game.apply(s, acts[rng.integers(len(acts))])
        plies += 1
    return s
