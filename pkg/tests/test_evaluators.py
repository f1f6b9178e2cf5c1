"""Contract checks for the batched state evaluators."""

import time

import numpy as np
import pytest

from gamesearch.evaluators import (
    Evaluation,
    Evaluator,
    HeuristicEvaluator,
    LatencyModel,
    UniformEvaluator,
    with_latency,
)
from gamesearch.games import (
    Connect4,
    DotsAndBoxes,
    GameConfig,
    GameKind,
    Othello,
    random_playout,
)
from gamesearch.tinynet import NetEvaluator, TinyNet
from oracles import random_position

GAMES = [
    Connect4(GameConfig(GameKind.CONNECT4, 5, 4, connect_k=3)),
    Othello(GameConfig(GameKind.OTHELLO, 6)),
    DotsAndBoxes(GameConfig(GameKind.DOTS_AND_BOXES, 2, 2)),
]


def evaluators_for(game, seed=0):
    return [
        UniformEvaluator(),
        HeuristicEvaluator(),
        NetEvaluator(TinyNet.for_game(game, hidden_size=12, seed=seed)),
    ]


@pytest.mark.parametrize("game", GAMES, ids=lambda g: g.config.game.value)
def test_policies_are_masked_distributions(game):
    rng = np.random.default_rng(71)
    states = [random_position(game, rng) for _ in range(12)]
    for ev in evaluators_for(game):
        batch = ev.evaluate_batch(game, states)
        assert len(batch.responses) == len(states)
        for s, mask, (value, policy) in zip(states, batch.requests, batch.responses):
            assert np.array_equal(mask, game.legal_mask(s))
            assert policy.shape == (game.action_space_size,)
            assert np.all(policy[~mask] == 0.0)
            assert np.all(policy[mask] > 0.0)
            assert policy.sum() == pytest.approx(1.0, abs=1e-9)
            assert abs(value) <= game.max_score() + 1e-9


@pytest.mark.parametrize("game", GAMES, ids=lambda g: g.config.game.value)
def test_results_do_not_depend_on_batching(game):
    rng = np.random.default_rng(72)
    states = [random_position(game, rng) for _ in range(9)]
    for ev in evaluators_for(game):
        whole = ev.evaluate_batch(game, states).responses
        for i, s in enumerate(states):
            single = ev.evaluate_batch(game, [s]).responses[0]
            assert single.value == whole[i].value
            assert np.array_equal(single.policy, whole[i].policy)
        split = (
            ev.evaluate_batch(game, states[:4]).responses
            + ev.evaluate_batch(game, states[4:]).responses
        )
        for a, b in zip(whole, split):
            assert a.value == b.value
            assert np.array_equal(a.policy, b.policy)


def test_terminal_states_are_rejected():
    game = Connect4(GameConfig(GameKind.CONNECT4, 4, 4, connect_k=3))
    final = random_playout(game, game.initial_state(), np.random.default_rng(73))
    for ev in evaluators_for(game):
        with pytest.raises(ValueError):
            ev.evaluate_batch(game, [game.initial_state(), final])


def test_usage_counters_accumulate_and_reset():
    game = GAMES[0]
    rng = np.random.default_rng(74)
    ev = UniformEvaluator()
    assert ev.counters() == (0, 0)
    ev.evaluate_batch(game, [random_position(game, rng) for _ in range(5)])
    ev.evaluate_batch(game, [random_position(game, rng)])
    assert ev.counters() == (2, 6)
    ev.reset_counters()
    assert ev.counters() == (0, 0)


def test_zero_mass_policies_fall_back_to_uniform():
    class AllZeros(Evaluator):
        def _evaluate(self, game, states, masks):
            return np.zeros(len(states)), np.zeros(
                (len(states), game.action_space_size)
            )

    game = GAMES[0]
    s = game.initial_state()
    batch = AllZeros().evaluate_batch(game, [s])
    policy = batch.responses[0].policy
    legal = game.legal_actions(s)
    assert np.allclose(policy[legal], 1.0 / len(legal))


def test_uniform_evaluator_is_flat_over_legal_moves():
    game = GAMES[0]
    rng = np.random.default_rng(75)
    s = random_position(game, rng)
    (value, policy) = UniformEvaluator().evaluate_batch(game, [s]).responses[0]
    assert value == 0.0
    legal = game.legal_actions(s)
    assert np.allclose(policy[legal], 1.0 / len(legal))


def test_heuristic_prefers_an_immediate_win():
    game = Connect4(GameConfig(GameKind.CONNECT4, 4, 4, connect_k=3))
    s = game.initial_state()
    # X stacks column 0 to two in a row; O answers in column 3
    for a in (0, 3, 0, 3):
        s = game.apply(s, a)
    _, policy = HeuristicEvaluator().evaluate_batch(game, [s]).responses[0]
    assert int(policy.argmax()) == 0, "winning drop should take most prior mass"
    assert policy[0] > 0.5


def test_heuristic_value_flips_with_the_seat():
    game = Othello(GameConfig(GameKind.OTHELLO, 6))
    rng = np.random.default_rng(76)
    ev = HeuristicEvaluator()
    for _ in range(10):
        s = random_position(game, rng)
        v_mover = ev._value(game, s, s.to_move)
        v_other = ev._value(game, s, s.to_move.other)
        assert v_mover == -v_other


def test_evaluation_is_a_named_tuple():
    e = Evaluation(0.5, np.array([1.0]))
    assert e.value == 0.5 and e[0] == 0.5


def test_latency_model_arithmetic():
    model = LatencyModel(1000.0, 50.0)
    assert model.batch_seconds(1) == pytest.approx(1.05e-3)
    assert model.batch_seconds(20) == pytest.approx(2e-3)
    with pytest.raises(ValueError):
        LatencyModel(-1.0)


def test_latency_wrapper_sleeps_and_counts_both_layers():
    game = GAMES[0]
    rng = np.random.default_rng(77)
    states = [random_position(game, rng) for _ in range(3)]
    inner = UniformEvaluator()
    ev = with_latency(inner, LatencyModel(20_000.0))
    t0 = time.perf_counter()
    batch = ev.evaluate_batch(game, states)
    elapsed = time.perf_counter() - t0
    assert elapsed >= 0.02
    assert ev.counters() == (1, 3)
    assert inner.counters() == (1, 3)
    assert len(batch.responses) == 3
    ev.reset_counters()
    assert ev.counters() == (0, 0)
    assert inner.counters() == (0, 0)
    assert ev.name == "uniform+latency"


def test_latency_results_match_the_inner_evaluator():
    game = GAMES[1]
    rng = np.random.default_rng(78)
    states = [random_position(game, rng) for _ in range(4)]
    plain = UniformEvaluator().evaluate_batch(game, states).responses
    wrapped = (
        with_latency(UniformEvaluator(), LatencyModel(100.0))
        .evaluate_batch(game, states)
        .responses
    )
    for a, b in zip(plain, wrapped):
        assert a.value == b.value
        assert np.array_equal(a.policy, b.policy)
