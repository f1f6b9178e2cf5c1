"""Rules checks for the othello engine, cross-checked against a slow
grid-based reimplementation."""

import numpy as np
import pytest

from gamesearch.games import GameConfig, GameKind, IllegalActionError, Othello, Player
from oracles import othello_flipped_cells, othello_reference_moves


def test_initial_position_eight():
    game = Othello(GameConfig(GameKind.OTHELLO, 8))
    s = game.initial_state()
    assert s.p1_bb.bit_count() == 2
    assert s.p2_bb.bit_count() == 2
    assert s.to_move == Player.P1
    # standard opening replies for black: d3, c4, f5, e6
    expected = sorted(game.parse_move(m) for m in ("d3", "c4", "f5", "e6"))
    assert game.legal_actions(s) == expected


def test_initial_position_six():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    s = game.initial_state()
    expected = sorted(game.parse_move(m) for m in ("c2", "b3", "e4", "d5"))
    assert game.legal_actions(s) == expected


def test_first_move_flips_one_disc():
    game = Othello(GameConfig(GameKind.OTHELLO, 8))
    s = game.initial_state()
    t = game.apply(s, game.parse_move("d3"))
    assert t.p1_bb.bit_count() == 4
    assert t.p2_bb.bit_count() == 1
    assert t.to_move == Player.P2
    flipped = othello_flipped_cells(s, t, game.n)
    assert flipped == frozenset({game.parse_move("d4")})


@pytest.mark.parametrize("side", [6, 8])
def test_moves_and_flips_match_reference(side):
    """Play random games with the engine; at every position the legal
    moves and the flip set of the chosen move must match the oracle."""
    game = Othello(GameConfig(GameKind.OTHELLO, side))
    rng = np.random.default_rng(23 + side)
    for _ in range(6):
        s = game.initial_state()
        while not game.is_terminal(s):
            ref_flips, pass_legal = othello_reference_moves(game, s)
            legal = game.legal_actions(s)
            if pass_legal:
                assert legal == [game.pass_action]
            else:
                assert legal == sorted(ref_flips)
            a = int(legal[rng.integers(len(legal))])
            t = game.apply(s, a)
            if a != game.pass_action:
                assert othello_flipped_cells(s, t, game.n) == ref_flips[a]
            s = t


def test_illegal_placements_rejected():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    s = game.initial_state()
    with pytest.raises(IllegalActionError):
        game.apply(s, game.parse_move("c3"))  # occupied
    with pytest.raises(IllegalActionError):
        game.apply(s, game.parse_move("a1"))  # flips nothing
    with pytest.raises(IllegalActionError):
        game.apply(s, game.pass_action)  # placements exist


def test_two_passes_end_the_game():
    # a board where neither side can move: P1 owns the top half,
    # P2 the bottom half, separated by an empty middle row with no
    # bracketing possible? simplest legal construction: drive the
    # engine into a real double-pass via a crafted position
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    n = game.n
    # one black disc in the corner, one detached white disc: no move
    # flips anything for either player
    from gamesearch.games.othello import OthelloState

    s = OthelloState(1 << 0, 1 << (n * n - 1), Player.P1, 10, 0, None)
    assert game.legal_actions(s) == [game.pass_action]
    s = game.apply(s, game.pass_action)
    assert not game.is_terminal(s)
    assert game.legal_actions(s) == [game.pass_action]
    s = game.apply(s, game.pass_action)
    assert game.is_terminal(s)
    assert game.terminal_score(s, Player.P1) == 0.0  # one disc each


def test_pass_streak_resets_after_a_placement():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    from gamesearch.games.othello import OthelloState

    # white in the a1 corner, black beside it at b1: black has no
    # placement (nothing brackets the corner), white can play c1
    s = OthelloState(1 << 1, 1 << 0, Player.P1, 10, 0, None)
    assert game.legal_actions(s) == [game.pass_action]
    s = game.apply(s, game.pass_action)
    assert s.pass_count == 1
    t = game.apply(s, game.parse_move("c1"))
    assert t.pass_count == 0
    assert not game.is_terminal(t)
    assert t.p2_bb.bit_count() == 3  # b1 flipped to white


def test_terminal_score_is_disc_difference():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    rng = np.random.default_rng(29)
    for _ in range(8):
        s = game.initial_state()
        while not game.is_terminal(s):
            legal = game.legal_actions(s)
            s = game.apply(s, int(legal[rng.integers(len(legal))]))
        diff = s.p1_bb.bit_count() - s.p2_bb.bit_count()
        assert game.terminal_score(s, Player.P1) == float(diff)
        assert abs(diff) <= game.max_score()


def test_full_board_ends_without_passes():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    rng = np.random.default_rng(31)
    saw_full_board = False
    for _ in range(20):
        s = game.initial_state()
        while not game.is_terminal(s):
            legal = game.legal_actions(s)
            s = game.apply(s, int(legal[rng.integers(len(legal))]))
        if (s.p1_bb | s.p2_bb).bit_count() == game.n_cells:
            saw_full_board = True
            assert s.pass_count == 0
    assert saw_full_board


def test_move_names_are_file_rank():
    game = Othello(GameConfig(GameKind.OTHELLO, 8))
    assert game.action_name(game.parse_move("d3")) == "d3"
    assert game.parse_move("PASS") == game.pass_action
    assert game.action_name(game.pass_action) == "pass"
    for bad in ("z9", "a0", "4d", "", "a"):
        with pytest.raises(ValueError):
            game.parse_move(bad)


def test_encoding_planes_are_own_then_opponent():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    s = game.initial_state()
    enc = game.encode(s)
    assert enc.shape == (2, 6, 6)
    assert enc[0].sum() == 2  # black to move: own = black
    assert enc[1].sum() == 2
    t = game.apply(s, game.legal_actions(s)[0])
    enc2 = game.encode(t)
    assert enc2[0].sum() == 1  # now white is "own" and has one disc left
    assert enc2[1].sum() == 4
