"""Dots-and-Boxes on a width x height grid of boxes.

Actions are edges: horizontal edges first (row-major over a (height+1) x
width grid), then vertical edges (row-major over a height x (width+1)
grid). Completing at least one box grants another turn. Scores are box
differences. Edge notation is "h r c" / "v r c" with 0-based row and
column.
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


class DotsAndBoxesState(NamedTuple):
    edges: int  # bitmask over the fixed edge indexing
    p1_boxes: int  # bitmask over boxes, row-major
    p2_boxes: int
    to_move: Player
    move_count: int
    score_p1: "int | None"


class DotsAndBoxes(Game):
    def __init__(self, config: GameConfig | None = None):
        self.config = config or GameConfig(GameKind.DOTS_AND_BOXES)
        if self.config.game != GameKind.DOTS_AND_BOXES:
            raise ValueError("config is not a dots-and-boxes config")
        self.width = self.config.width
        self.height = self.config.height
        self.n_h = (self.height + 1) * self.width
        self.n_v = self.height * (self.width + 1)
        self.n_edges = self.n_h + self.n_v
        self.n_boxes = self.width * self.height
        self.action_space_size = self.n_edges
        self._full = (1 << self.n_edges) - 1
        # 4-edge mask per box, and the boxes touching each edge
        self._box_mask = []
        for r in range(self.height):
            for c in range(self.width):
                mask = (
                    (1 << self._h_edge(r, c))
                    | (1 << self._h_edge(r + 1, c))
                    | (1 << self._v_edge(r, c))
                    | (1 << self._v_edge(r, c + 1))
                )
                self._box_mask.append(mask)
        self._edge_boxes: list[tuple[int, ...]] = [()] * self.n_edges
        for b, mask in enumerate(self._box_mask):
            for e in range(self.n_edges):
                if mask & (1 << e):
                    self._edge_boxes[e] = self._edge_boxes[e] + (b,)

    def _h_edge(self, r: int, c: int) -> int:
        return r * self.width + c

    def _v_edge(self, r: int, c: int) -> int:
        return self.n_h + r * (self.width + 1) + c

    def initial_state(self) -> DotsAndBoxesState:
        return DotsAndBoxesState(0, 0, 0, Player.P1, 0, None)

    def legal_actions(self, s: DotsAndBoxesState) -> list[int]:
        if s.score_p1 is not None:
            return []
        return [e for e in range(self.n_edges) if not s.edges & (1 << e)]

    def apply(self, s: DotsAndBoxesState, a: int) -> DotsAndBoxesState:
        if s.score_p1 is not None:
            raise IllegalActionError("game is over")
        if not 0 <= a < self.n_edges:
            raise IllegalActionError(f"no such edge: {a}")
        if s.edges & (1 << a):
            raise IllegalActionError(f"edge {self.action_name(a)} already drawn")
        edges = s.edges | (1 << a)
        claimed = 0
        for b in self._edge_boxes[a]:
            if edges & self._box_mask[b] == self._box_mask[b]:
                claimed |= 1 << b
        p1_boxes, p2_boxes = s.p1_boxes, s.p2_boxes
        if claimed:
            if s.to_move == Player.P1:
                p1_boxes |= claimed
            else:
                p2_boxes |= claimed
            to_move = s.to_move
        else:
            to_move = s.to_move.other
        score = None
        if edges == self._full:
            score = p1_boxes.bit_count() - p2_boxes.bit_count()
        return DotsAndBoxesState(edges, p1_boxes, p2_boxes, to_move, s.move_count + 1, score)

    def is_terminal(self, s: DotsAndBoxesState) -> bool:
        return s.score_p1 is not None

    def terminal_score(self, s: DotsAndBoxesState, perspective: Player) -> float:
        if s.score_p1 is None:
            raise NonTerminalError("game is not over")
        return float(s.score_p1 if perspective == Player.P1 else -s.score_p1)

    def encoding_shape(self) -> tuple[int, ...]:
        return (3, 2 * self.height + 1, 2 * self.width + 1)

    def encode(self, s: DotsAndBoxesState) -> np.ndarray:
        # lattice picture: even/even points are dots, edges sit between them,
        # boxes at odd/odd points; planes are own boxes, opp boxes, drawn edges
        planes = np.zeros(self.encoding_shape(), dtype=np.float32)
        own, opp = (
            (s.p1_boxes, s.p2_boxes) if s.to_move == Player.P1 else (s.p2_boxes, s.p1_boxes)
        )
        for r in range(self.height):
            for c in range(self.width):
                bit = 1 << (r * self.width + c)
                if own & bit:
                    planes[0, 2 * r + 1, 2 * c + 1] = 1.0
                elif opp & bit:
                    planes[1, 2 * r + 1, 2 * c + 1] = 1.0
        for r in range(self.height + 1):
            for c in range(self.width):
                if s.edges & (1 << self._h_edge(r, c)):
                    planes[2, 2 * r, 2 * c + 1] = 1.0
        for r in range(self.height):
            for c in range(self.width + 1):
                if s.edges & (1 << self._v_edge(r, c)):
                    planes[2, 2 * r + 1, 2 * c] = 1.0
        return planes

    def render(self, s: DotsAndBoxesState) -> str:
        lines = []
        for r in range(self.height + 1):
            row = []
            for c in range(self.width):
                row.append("+")
                row.append("---" if s.edges & (1 << self._h_edge(r, c)) else "   ")
            row.append("+")
            lines.append("".join(row))
            if r < self.height:
                row = []
                for c in range(self.width + 1):
                    row.append("|" if s.edges & (1 << self._v_edge(r, c)) else " ")
                    if c < self.width:
                        bit = 1 << (r * self.width + c)
                        owner = " X " if s.p1_boxes & bit else " O " if s.p2_boxes & bit else "   "
                        row.append(owner)
                lines.append("".join(row))
        return "\n".join(lines)

    def parse_move(self, text: str) -> int:
        parts = text.strip().lower().split()
        if len(parts) != 3 or parts[0] not in ("h", "v"):
            raise MoveParseError(f"expected 'h r c' or 'v r c', got {text!r}")
        try:
            r, c = int(parts[1]), int(parts[2])
        except ValueError:
            raise MoveParseError(f"bad edge coordinates in {text!r}") from None
        if parts[0] == "h":
            if not (0 <= r <= self.height and 0 <= c < self.width):
                raise MoveParseError(f"horizontal edge off the board: {text!r}")
            return self._h_edge(r, c)
        if not (0 <= r < self.height and 0 <= c <= self.width):
            raise MoveParseError(f"vertical edge off the board: {text!r}")
        return self._v_edge(r, c)

    def action_name(self, a: int) -> str:
        if a < self.n_h:
            r, c = divmod(a, self.width)
            return f"h {r} {c}"
        r, c = divmod(a - self.n_h, self.width + 1)
        return f"v {r} {c}"

    def max_score(self) -> float:
        return float(self.n_boxes)

    def max_game_length(self) -> int:
        return self.n_edges
