"""Interface laws every game engine must satisfy."""

import numpy as np
import pytest

from gamesearch.games import (
    BanditGame,
    Connect4,
    DotsAndBoxes,
    GameConfig,
    GameKind,
    IllegalActionError,
    MoveParseError,
    NonTerminalError,
    Othello,
    Player,
    binary_tree_game,
    make_game,
    random_playout,
    sgn_between,
)
from oracles import random_position

ALL_GAMES = [
    ("connect4_7x6", Connect4()),
    ("connect4_4x4", Connect4(GameConfig(GameKind.CONNECT4, 4, 4, connect_k=3))),
    ("othello_6", Othello(GameConfig(GameKind.OTHELLO, 6))),
    ("dots_2x2", DotsAndBoxes()),
    ("dots_1x2", DotsAndBoxes(GameConfig(GameKind.DOTS_AND_BOXES, 2, 1))),
    ("tree", binary_tree_game()),
    ("bandit", BanditGame((0.9, 0.5, 0.1))),
]

IDS = [name for name, _ in ALL_GAMES]
ENGINES = [game for _, game in ALL_GAMES]


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_legal_actions_sorted_and_match_mask(game):
    rng = np.random.default_rng(11)
    for _ in range(40):
        s = random_position(game, rng)
        acts = game.legal_actions(s)
        assert acts == sorted(acts)
        assert len(set(acts)) == len(acts)
        assert acts, "nonterminal state must have a legal action"
        mask = game.legal_mask(s)
        assert mask.shape == (game.action_space_size,)
        assert mask.dtype == bool
        assert np.flatnonzero(mask).tolist() == acts


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_apply_rejects_illegal_actions(game):
    rng = np.random.default_rng(12)
    for _ in range(25):
        s = random_position(game, rng)
        legal = set(game.legal_actions(s))
        for a in range(game.action_space_size):
            if a not in legal:
                with pytest.raises(IllegalActionError):
                    game.apply(s, a)
        with pytest.raises(IllegalActionError):
            game.apply(s, game.action_space_size + 3)


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_terminal_scores_are_zero_sum_and_bounded(game):
    rng = np.random.default_rng(13)
    bound = game.max_score()
    for _ in range(30):
        final = random_playout(game, game.initial_state(), rng)
        assert game.is_terminal(final)
        assert game.legal_actions(final) == []
        assert not game.legal_mask(final).any()
        a = game.terminal_score(final, Player.P1)
        b = game.terminal_score(final, Player.P2)
        assert a == -b
        assert abs(a) <= bound


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_terminal_queries_raise_on_live_states(game):
    s = game.initial_state()
    with pytest.raises(NonTerminalError):
        game.terminal_score(s, Player.P1)


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_encode_shape_dtype_and_batch_agreement(game):
    rng = np.random.default_rng(14)
    shape = game.encoding_shape()
    states = [random_position(game, rng) for _ in range(17)]
    flat = int(np.prod(shape))
    out = np.full((len(states), flat), -1.0, dtype=np.float32)
    game.encode_into(states, out)
    for i, s in enumerate(states):
        enc = game.encode(s)
        assert enc.shape == shape
        assert enc.dtype == np.float32
        assert np.array_equal(out[i], enc.ravel())


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_playouts_respect_move_bound(game):
    rng = np.random.default_rng(15)
    bound = game.max_game_length()
    for _ in range(20):
        s = game.initial_state()
        plies = 0
        while not game.is_terminal(s):
            acts = game.legal_actions(s)
            s = game.apply(s, int(acts[rng.integers(len(acts))]))
            plies += 1
            assert plies <= bound
        assert game.is_terminal(s)


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_move_name_round_trip(game):
    rng = np.random.default_rng(16)
    for _ in range(25):
        s = random_position(game, rng)
        for a in game.legal_actions(s):
            assert game.parse_move(game.action_name(a)) == a
    with pytest.raises(MoveParseError):
        game.parse_move("certainly not a move")


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_render_returns_text(game):
    rng = np.random.default_rng(17)
    s = random_position(game, rng)
    text = game.render(s)
    assert isinstance(text, str) and text


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_perspective_sign_between_states(game):
    rng = np.random.default_rng(18)
    for _ in range(25):
        s = random_position(game, rng)
        acts = game.legal_actions(s)
        t = game.apply(s, int(acts[rng.integers(len(acts))]))
        expected = 1 if s.to_move == t.to_move else -1
        assert sgn_between(s, t) == expected


@pytest.mark.parametrize("game", ENGINES, ids=IDS)
def test_states_are_hashable_values(game):
    s = game.initial_state()
    t = game.initial_state()
    assert s == t
    assert hash(s) == hash(t)
    a = game.legal_actions(s)[0]
    u = game.apply(s, a)
    assert u != s
    assert s == t, "apply must not mutate its input"


def test_make_game_builds_each_kind():
    for kind in GameKind:
        game = make_game(GameConfig(kind))
        assert game.action_space_size >= 1
        assert not game.is_terminal(game.initial_state())


def test_config_validation():
    with pytest.raises(ValueError):
        GameConfig(GameKind.CONNECT4, 4, 4, connect_k=9)
    with pytest.raises(ValueError):
        GameConfig(GameKind.OTHELLO, 7)
    with pytest.raises(ValueError):
        GameConfig(GameKind.OTHELLO, 6, 8)
    with pytest.raises(ValueError):
        GameConfig(GameKind.DOTS_AND_BOXES, 0, -1)
    with pytest.raises(ValueError):
        Connect4(GameConfig(GameKind.OTHELLO, 6))


def test_stochastic_flag_only_on_the_bandit():
    assert BanditGame((0.5,)).stochastic_terminal
    for name, game in ALL_GAMES:
        if name != "bandit":
            assert not game.stochastic_terminal


def test_sampled_scores_match_expectation_for_deterministic_games():
    rng = np.random.default_rng(19)
    game = Connect4(GameConfig(GameKind.CONNECT4, 4, 4, connect_k=3))
    final = random_playout(game, game.initial_state(), rng)
    for p in (Player.P1, Player.P2):
        assert game.sample_terminal_score(final, p, rng) == game.terminal_score(final, p)


def test_bandit_sampled_scores_are_signed_draws():
    game = BanditGame((0.7, 0.2))
    s = game.apply(game.initial_state(), 0)
    rng = np.random.default_rng(20)
    draws = [game.sample_terminal_score(s, Player.P1, rng) for _ in range(400)]
    assert set(draws) == {1.0, -1.0}
    mean = float(np.mean(draws))
    assert abs(mean - game.terminal_score(s, Player.P1)) < 0.1
    mirror = np.random.default_rng(20)
    flipped = [game.sample_terminal_score(s, Player.P2, mirror) for _ in range(400)]
    assert flipped == [-d for d in draws]
