"""Connect-4 on a configurable board with a configurable line length.

Bitboard layout: each column occupies height+1 bits (one sentinel bit on
top so line detection cannot wrap between columns); bit 0 of a column is
the bottom cell. One action per column.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .base import (
    Game,
    GameConfig,
    GameKind,
    IllegalActionError,
    MoveParseError,
    NonTerminalError,
    Player,
)


class Connect4State(NamedTuple):
    p1_bb: int
    p2_bb: int
    to_move: Player
    move_count: int
    score_p1: "int | None"  # None while the game is live


class Connect4(Game):
    def __init__(self, config: GameConfig | None = None):
        self.config = config or GameConfig(GameKind.CONNECT4)
        if self.config.game != GameKind.CONNECT4:
            raise ValueError("config is not a connect-4 config")
        self.width = self.config.width
        self.height = self.config.height
        self.k = self.config.connect_k
        self.action_space_size = self.width
        self._stride = self.height + 1
        self._col_mask = [
            ((1 << self.height) - 1) << (c * self._stride) for c in range(self.width)
        ]
        self._bottom = [1 << (c * self._stride) for c in range(self.width)]
        self._top_cell = [1 << (c * self._stride + self.height - 1) for c in range(self.width)]
        # line directions: vertical, horizontal, and both diagonals
        self._dirs = (1, self._stride, self._stride - 1, self._stride + 1)
        # shift tables for vectorized encode/legal_mask; boards whose
        # bitboards overflow int64 fall back to per-cell loops
        if (self.width - 1) * self._stride + self.height - 1 <= 62:
            rows = np.arange(self.height - 1, -1, -1, dtype=np.int64)
            cols = np.arange(self.width, dtype=np.int64) * self._stride
            self._cell_shifts = (rows[:, None] + cols[None, :])[None, :, :]
            self._top_bits = np.array(self._top_cell, dtype=np.int64)
        else:
            self._cell_shifts = None
            self._top_bits = None

    def initial_state(self) -> Connect4State:
        return Connect4State(0, 0, Player.P1, 0, None)

    def legal_actions(self, s: Connect4State) -> list[int]:
        if s.score_p1 is not None:
            return []
        occ = s.p1_bb | s.p2_bb
        return [c for c in range(self.width) if not occ & self._top_cell[c]]

    def legal_mask(self, s: Connect4State) -> np.ndarray:
        if s.score_p1 is not None or self._top_bits is None:
            return super().legal_mask(s)
        return ((s.p1_bb | s.p2_bb) & self._top_bits) == 0

    def apply(self, s: Connect4State, a: int) -> Connect4State:
        if s.score_p1 is not None:
            raise IllegalActionError("game is over")
        if not 0 <= a < self.width:
            raise IllegalActionError(f"no such column: {a}")
        occ = s.p1_bb | s.p2_bb
        if occ & self._top_cell[a]:
            raise IllegalActionError(f"column {a + 1} is full")
        bit = (occ + self._bottom[a]) & self._col_mask[a]
        mover = s.to_move
        bb = (s.p1_bb | bit) if mover == Player.P1 else (s.p2_bb | bit)
        score = None
        if self._has_line(bb):
            score = 1 if mover == Player.P1 else -1
        elif s.move_count + 1 == self.width * self.height:
            score = 0
        if mover == Player.P1:
            return Connect4State(bb, s.p2_bb, Player.P2, s.move_count + 1, score)
        return Connect4State(s.p1_bb, bb, Player.P1, s.move_count + 1, score)

    def _has_line(self, bb: int) -> bool:
        for d in self._dirs:
            r = bb
            for i in range(1, self.k):
                r &= bb >> (i * d)
                if not r:
                    break
            if r:
                return True
        return False

    def is_terminal(self, s: Connect4State) -> bool:
        return s.score_p1 is not None

    def terminal_score(self, s: Connect4State, perspective: Player) -> float:
        if s.score_p1 is None:
            raise NonTerminalError("game is not over")
        return float(s.score_p1 if perspective == Player.P1 else -s.score_p1)

    def encoding_shape(self) -> tuple[int, ...]:
        return (2, self.height, self.width)

    def encode(self, s: Connect4State) -> np.ndarray:
        own = s.p1_bb if s.to_move == Player.P1 else s.p2_bb
        opp = s.p2_bb if s.to_move == Player.P1 else s.p1_bb
        if self._cell_shifts is not None:
            boards = np.empty((2, 1, 1), dtype=np.int64)
            boards[0, 0, 0] = own
            boards[1, 0, 0] = opp
            return ((boards >> self._cell_shifts) & 1).astype(np.float32)
        planes = np.zeros(self.encoding_shape(), dtype=np.float32)
        for c in range(self.width):
            base = c * self._stride
            for r in range(self.height):
                bit = 1 << (base + r)
                if own & bit:
                    planes[0, self.height - 1 - r, c] = 1.0
                elif opp & bit:
                    planes[1, self.height - 1 - r, c] = 1.0
        return planes

    def encode_into(self, states, out: np.ndarray) -> None:
        if self._cell_shifts is None:
            super().encode_into(states, out)
            return
        n = len(states)
        p1 = np.fromiter((s.p1_bb for s in states), dtype=np.int64, count=n)
        p2 = np.fromiter((s.p2_bb for s in states), dtype=np.int64, count=n)
        p1_moves = np.fromiter(
            (s.to_move == Player.P1 for s in states), dtype=bool, count=n
        )
        own = np.where(p1_moves, p1, p2)
        opp = np.where(p1_moves, p2, p1)
        cells = self._cell_shifts.ravel()
        half = cells.size
        out[:, :half] = (own[:, None] >> cells) & 1
        out[:, half:] = (opp[:, None] >> cells) & 1

    def render(self, s: Connect4State) -> str:
        rows = []
        for r in range(self.height - 1, -1, -1):
            cells = []
            for c in range(self.width):
                bit = 1 << (c * self._stride + r)
                cells.append("X" if s.p1_bb & bit else "O" if s.p2_bb & bit else ".")
            rows.append(" ".join(cells))
        rows.append(" ".join(str(c + 1) for c in range(self.width)))
        return "\n".join(rows)

    def parse_move(self, text: str) -> int:
        t = text.strip()
        if not t.isdigit():
            raise MoveParseError(f"expected a column number, got {text!r}")
        col = int(t)
        if not 1 <= col <= self.width:
            raise MoveParseError(f"column out of range 1..{self.width}: {col}")
        return col - 1

    def action_name(self, a: int) -> str:
        return str(a + 1)

    def max_score(self) -> float:
        return 1.0

    def max_game_length(self) -> int:
        return self.width * self.height
