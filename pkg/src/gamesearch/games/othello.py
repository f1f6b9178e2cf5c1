"""Othello on a square board (6x6 or 8x8).

Bitboard layout: bit index = row * n + col, with a1 the top-left cell
(file letter = column, rank digit = row). Actions are cell indices plus
one reserved PASS index equal to n*n. PASS is legal exactly when no
placement flips a disc; two consecutive passes or a full board end the
game. Scores are disc differences.
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


class OthelloState(NamedTuple):
    p1_bb: int  # black
    p2_bb: int  # white
    to_move: Player
    move_count: int
    pass_count: int
    score_p1: "int | None"


class Othello(Game):
    def __init__(self, config: GameConfig | None = None):
        self.config = config or GameConfig(GameKind.OTHELLO)
        if self.config.game != GameKind.OTHELLO:
            raise ValueError("config is not an othello config")
        n = self.config.width
        self.n = n
        self.n_cells = n * n
        self.pass_action = self.n_cells
        self.action_space_size = self.n_cells + 1
        self._full = (1 << self.n_cells) - 1
        first_col = 0
        for r in range(n):
            first_col |= 1 << (r * n)
        self._not_first_col = self._full & ~first_col
        self._not_last_col = self._full & ~(first_col << (n - 1))
        # (shift amount, pre-shift mask, left?) per direction
        self._shifts = (
            (1, self._not_last_col, True),        # east
            (1, self._not_first_col, False),      # west
            (n, self._full, True),                # south
            (n, self._full, False),               # north
            (n + 1, self._not_last_col, True),    # south-east
            (n - 1, self._not_first_col, True),   # south-west
            (n - 1, self._not_last_col, False),   # north-east
            (n + 1, self._not_first_col, False),  # north-west
        )

    def initial_state(self) -> OthelloState:
        n = self.n
        h = n // 2
        white = (1 << ((h - 1) * n + h - 1)) | (1 << (h * n + h))
        black = (1 << ((h - 1) * n + h)) | (1 << (h * n + h - 1))
        return OthelloState(black, white, Player.P1, 0, 0, None)

    def _shift(self, bb: int, amount: int, mask: int, left: bool) -> int:
        bb &= mask
        return (bb << amount) & self._full if left else bb >> amount

    def _placement_mask(self, own: int, opp: int) -> int:
        empty = self._full & ~(own | opp)
        legal = 0
        for amount, mask, left in self._shifts:
            t = self._shift(own, amount, mask, left) & opp
            for _ in range(self.n - 2):
                t |= self._shift(t, amount, mask, left) & opp
            legal |= self._shift(t, amount, mask, left) & empty
        return legal

    def _flips(self, own: int, opp: int, bit: int) -> int:
        flips = 0
        for amount, mask, left in self._shifts:
            x = self._shift(bit, amount, mask, left)
            run = 0
            while x & opp:
                run |= x
                x = self._shift(x, amount, mask, left)
            if run and x & own:
                flips |= run
        return flips

    def _own_opp(self, s: OthelloState) -> tuple[int, int]:
        if s.to_move == Player.P1:
            return s.p1_bb, s.p2_bb
        return s.p2_bb, s.p1_bb

    def legal_actions(self, s: OthelloState) -> list[int]:
        if s.score_p1 is not None:
            return []
        own, opp = self._own_opp(s)
        mask = self._placement_mask(own, opp)
        if not mask:
            return [self.pass_action]
        return [i for i in range(self.n_cells) if mask & (1 << i)]

    def apply(self, s: OthelloState, a: int) -> OthelloState:
        if s.score_p1 is not None:
            raise IllegalActionError("game is over")
        own, opp = self._own_opp(s)
        if a == self.pass_action:
            if self._placement_mask(own, opp):
                raise IllegalActionError("pass while a placement is legal")
            pass_count = s.pass_count + 1
            score = self._score(s.p1_bb, s.p2_bb) if pass_count >= 2 else None
            return OthelloState(
                s.p1_bb, s.p2_bb, s.to_move.other, s.move_count + 1, pass_count, score
            )
        if not 0 <= a < self.n_cells:
            raise IllegalActionError(f"no such cell: {a}")
        bit = 1 << a
        if (own | opp) & bit:
            raise IllegalActionError(f"cell {self.action_name(a)} is occupied")
        flips = self._flips(own, opp, bit)
        if not flips:
            raise IllegalActionError(f"{self.action_name(a)} flips nothing")
        own |= bit | flips
        opp &= ~flips
        p1_bb, p2_bb = (own, opp) if s.to_move == Player.P1 else (opp, own)
        score = None
        if (p1_bb | p2_bb) == self._full:
            score = self._score(p1_bb, p2_bb)
        return OthelloState(p1_bb, p2_bb, s.to_move.other, s.move_count + 1, 0, score)

    @staticmethod
    def _score(p1_bb: int, p2_bb: int) -> int:
        return p1_bb.bit_count() - p2_bb.bit_count()

    def is_terminal(self, s: OthelloState) -> bool:
        return s.score_p1 is not None

    def terminal_score(self, s: OthelloState, perspective: Player) -> float:
        if s.score_p1 is None:
            raise NonTerminalError("game is not over")
        return float(s.score_p1 if perspective == Player.P1 else -s.score_p1)

    def encoding_shape(self) -> tuple[int, ...]:
        return (2, self.n, self.n)

    def encode(self, s: OthelloState) -> np.ndarray:
        planes = np.zeros(self.encoding_shape(), dtype=np.float32)
        own, opp = self._own_opp(s)
        for r in range(self.n):
            for c in range(self.n):
                bit = 1 << (r * self.n + c)
                if own & bit:
                    planes[0, r, c] = 1.0
                elif opp & bit:
                    planes[1, r, c] = 1.0
        return planes

    def render(self, s: OthelloState) -> str:
        header = "  " + " ".join(chr(ord("a") + c) for c in range(self.n))
        rows = [header]
        for r in range(self.n):
            cells = []
            for c in range(self.n):
                bit = 1 << (r * self.n + c)
                cells.append("X" if s.p1_bb & bit else "O" if s.p2_bb & bit else ".")
            rows.append(f"{r + 1} " + " ".join(cells))
        return "\n".join(rows)

    def parse_move(self, text: str) -> int:
        t = text.strip().lower()
        if t == "pass":
            return self.pass_action
        if len(t) < 2 or not t[0].isalpha() or not t[1:].isdigit():
            raise MoveParseError(f"expected a cell like d3 or 'pass', got {text!r}")
        col = ord(t[0]) - ord("a")
        row = int(t[1:]) - 1
        if not (0 <= col < self.n and 0 <= row < self.n):
            raise MoveParseError(f"cell off the board: {text!r}")
        return row * self.n + col

    def action_name(self, a: int) -> str:
        if a == self.pass_action:
            return "pass"
        row, col = divmod(a, self.n)
        return f"{chr(ord('a') + col)}{row + 1}"

    def max_score(self) -> float:
        return float(self.n_cells)

    def max_game_length(self) -> int:
        # every placement adds a disc; passes never occur twice in a row mid-game
        return 2 * self.n_cells
