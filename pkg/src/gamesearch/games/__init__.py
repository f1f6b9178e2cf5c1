from .base import (
    Game,
    GameConfig,
    GameKind,
    IllegalActionError,
    MoveParseError,
    NonTerminalError,
    Player,
    random_playout,
    sgn_between,
)
from .connect4 import Connect4, Connect4State
from .dotsandboxes import DotsAndBoxes, DotsAndBoxesState
from .othello import Othello, OthelloState
from .toys import BanditGame, BanditState, TabularGame, TabularState, binary_tree_game

_GAME_CLASSES = {
    GameKind.CONNECT4: Connect4,
    GameKind.DOTS_AND_BOXES: DotsAndBoxes,
    GameKind.OTHELLO: Othello,
}


def make_game(config: GameConfig) -> Game:
    """Build the engine for a config; see GameKind for the known games."""
    try:
        cls = _GAME_CLASSES[config.game]
    except KeyError:
        raise ValueError(f"unknown game: {config.game}") from None
    return cls(config)


__all__ = [
    "BanditGame",
    "BanditState",
    "Connect4",
    "Connect4State",
    "DotsAndBoxes",
    "DotsAndBoxesState",
    "Game",
    "GameConfig",
    "GameKind",
    "IllegalActionError",
    "MoveParseError",
    "NonTerminalError",
    "Othello",
    "OthelloState",
    "Player",
    "TabularGame",
    "TabularState",
    "binary_tree_game",
    "make_game",
    "random_playout",
    "sgn_between",
]
