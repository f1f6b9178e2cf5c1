"""Rollout generation, the replay buffer, and the training loop."""

import json
import struct

import numpy as np
import pytest

from gamesearch.games import Connect4, DotsAndBoxes, GameConfig, GameKind
from gamesearch.search import Algorithm, SearchParams, sample_policy
from gamesearch.selfplay import (
    METRICS_FIELDS,
    REPLAY_MAGIC,
    ReplayBuffer,
    ReplayExample,
    RolloutConfig,
    TrainLoopConfig,
    examples_from_game,
    generate_rollouts,
    generate_rollouts_timed,
    train_loop,
)
from gamesearch.evaluators import UniformEvaluator
from gamesearch.tinynet import TinyNet
from oracles import sign_product_targets

C4 = Connect4(GameConfig(GameKind.CONNECT4, 4, 4, connect_k=3))
DNB = DotsAndBoxes(GameConfig(GameKind.DOTS_AND_BOXES, 2, 2))


def _scripted_history(game, rng):
    """Random playout recorded as (state, flat policy) pairs plus the final."""
    s = game.initial_state()
    history = []
    while not game.is_terminal(s):
        acts = game.legal_actions(s)
        policy = np.zeros(game.action_space_size)
        policy[acts] = 1.0 / len(acts)
        history.append((s, policy))
        s = game.apply(s, int(acts[rng.integers(len(acts))]))
    return history, s


@pytest.mark.parametrize("game", [C4, DNB], ids=["connect4", "dots"])
def test_value_targets_match_the_sign_chain_oracle(game):
    """Each example's value is the final score in its own state's
    perspective, also reachable by chaining per-move perspective signs."""
    rng = np.random.default_rng(17)
    for _ in range(15):
        history, final = _scripted_history(game, rng)
        examples = examples_from_game(game, history, final)
        states = [s for s, _ in history]
        expected = sign_product_targets(game, states, final)
        assert len(examples) == len(states)
        for ex, s, (state, policy), want in zip(examples, states, history, expected):
            assert ex.target_value == want
            assert np.array_equal(ex.encoding, game.encode(state))
            assert ex.target_policy is policy


def _fake_example(i, k=3):
    policy = np.zeros(k)
    policy[i % k] = 1.0
    return ReplayExample(np.full((2, 2), float(i), dtype=np.float32), policy, float(i))


def test_buffer_is_a_fifo_ring():
    buf = ReplayBuffer(capacity=3)
    buf.extend(_fake_example(i) for i in range(5))
    assert len(buf) == 3
    assert buf.appended == 5
    assert [ex.target_value for ex in buf.contents()] == [2.0, 3.0, 4.0]
    with pytest.raises(ValueError):
        ReplayBuffer(0)


def test_buffer_sampling_is_seeded():
    a = ReplayBuffer(8, seed=4)
    b = ReplayBuffer(8, seed=4)
    for buf in (a, b):
        buf.extend(_fake_example(i) for i in range(8))
    enc_a, pol_a, val_a = a.sample(12)
    enc_b, pol_b, val_b = b.sample(12)
    assert np.array_equal(enc_a, enc_b)
    assert np.array_equal(pol_a, pol_b)
    assert np.array_equal(val_a, val_b)
    assert enc_a.shape == (12, 2, 2) and pol_a.shape == (12, 3)
    assert a.sampled == 12
    with pytest.raises(ValueError):
        ReplayBuffer(4).sample(1)


def test_buffer_save_load_round_trip(tmp_path):
    buf = ReplayBuffer(10, seed=1)
    buf.extend(_fake_example(i) for i in range(6))
    path = tmp_path / "replay.bin"
    buf.save(path)
    loaded = ReplayBuffer.load(path)
    assert len(loaded) == 6
    for orig, back in zip(buf.contents(), loaded.contents()):
        assert np.array_equal(orig.encoding, back.encoding)
        assert back.encoding.dtype == np.float32
        assert np.array_equal(orig.target_policy, back.target_policy)
        assert orig.target_value == back.target_value
    capped = ReplayBuffer.load(path, capacity=4)
    assert len(capped) == 4
    assert [ex.target_value for ex in capped.contents()] == [2.0, 3.0, 4.0, 5.0]


def test_buffer_rejects_foreign_and_truncated_files(tmp_path):
    empty = ReplayBuffer(4)
    with pytest.raises(ValueError):
        empty.save(tmp_path / "never.bin")

    bogus = tmp_path / "bogus.bin"
    bogus.write_bytes(b"NOTRB\x00" + b"\x00" * 32)
    with pytest.raises(ValueError, match="not a replay"):
        ReplayBuffer.load(bogus)

    buf = ReplayBuffer(4)
    buf.extend(_fake_example(i) for i in range(2))
    good = tmp_path / "good.bin"
    buf.save(good)
    blob = good.read_bytes()
    (tmp_path / "short.bin").write_bytes(blob[:-5])
    with pytest.raises(ValueError, match="truncated|malformed"):
        ReplayBuffer.load(tmp_path / "short.bin")
    versioned = blob[: len(REPLAY_MAGIC)] + struct.pack("<I", 99) + blob[len(REPLAY_MAGIC) + 4 :]
    (tmp_path / "vers.bin").write_bytes(versioned)
    with pytest.raises(ValueError, match="version"):
        ReplayBuffer.load(tmp_path / "vers.bin")


def test_buffer_jsonl_export(tmp_path):
    buf = ReplayBuffer(4)
    buf.extend(_fake_example(i) for i in range(3))
    path = tmp_path / "replay.jsonl"
    buf.export_jsonl(path)
    lines = path.read_text().strip().split("\n")
    assert len(lines) == 3
    first = json.loads(lines[0])
    assert set(first) == {"encoding", "policy", "value"}
    assert first["value"] == 0.0
    assert first["encoding"] == [0.0] * 4


def _rollout_config(games, seed=3, n_sims=8):
    params = SearchParams(n_sims, seed=seed, algorithm=Algorithm.RMCTS)
    return RolloutConfig(C4, params, games, temperature_plies=6)


def test_rollout_examples_replay_as_a_legal_game():
    """A one-game rollout's examples reconstruct the exact trajectory:
    following the recorded policies with the rollout's own move rule
    visits the same encodings and ends at a terminal whose scores are
    the value targets."""
    config = _rollout_config(games=1)
    examples = generate_rollouts(UniformEvaluator(), config)
    s = C4.initial_state()
    states = []
    for ply, ex in enumerate(examples):
        assert np.array_equal(ex.encoding, C4.encode(s))
        legal = C4.legal_actions(s)
        assert ex.target_policy[legal].sum() == pytest.approx(1.0, abs=1e-12)
        off = np.delete(np.arange(C4.action_space_size), legal)
        assert not ex.target_policy[off].any()
        states.append(s)
        if ply < config.temperature_plies:
            a = sample_policy(ex.target_policy, config.params.seed, 0, ply, 2)
        else:
            a = int(ex.target_policy.argmax())
        s = C4.apply(s, a)
    assert C4.is_terminal(s)
    expected = sign_product_targets(C4, states, s)
    assert [ex.target_value for ex in examples] == expected


def test_rollouts_are_deterministic():
    a = generate_rollouts(UniformEvaluator(), _rollout_config(games=3))
    b = generate_rollouts(UniformEvaluator(), _rollout_config(games=3))
    assert len(a) == len(b) > 0
    for x, y in zip(a, b):
        assert np.array_equal(x.encoding, y.encoding)
        assert np.array_equal(x.target_policy, y.target_policy)
        assert x.target_value == y.target_value
    c = generate_rollouts(UniformEvaluator(), _rollout_config(games=3, seed=4))
    assert len(c) != len(a) or any(
        x.target_value != y.target_value for x, y in zip(a, c)
    )


def test_timed_rollouts_stop_on_the_budget():
    examples, games, elapsed = generate_rollouts_timed(
        UniformEvaluator(), _rollout_config(games=4, n_sims=4), 0.0
    )
    assert (examples, games) == ([], 0)
    examples, games, elapsed = generate_rollouts_timed(
        UniformEvaluator(), _rollout_config(games=4, n_sims=4), 0.3
    )
    assert games >= 1
    assert len(examples) >= games * 5  # a 4x4 k=3 game runs at least 5 plies
    assert elapsed >= 0.3


def test_config_validation():
    params = SearchParams(4, algorithm=Algorithm.RMCTS)
    with pytest.raises(ValueError):
        RolloutConfig(C4, params, games=0)
    with pytest.raises(ValueError):
        RolloutConfig(C4, params, games=1, temperature_plies=-1)
    with pytest.raises(ValueError):
        TrainLoopConfig(C4, params, iterations=-1)
    with pytest.raises(ValueError):
        TrainLoopConfig(C4, params, iterations=1, learning_rate=0.0)
    with pytest.raises(ValueError):
        TrainLoopConfig(C4, params, iterations=1, rollout_games=0)


def _train_config(out_dir, **overrides):
    base = dict(
        game=C4,
        params=SearchParams(8, seed=1, algorithm=Algorithm.RMCTS),
        iterations=2,
        rollout_games=4,
        minibatches=4,
        batch_size=16,
        learning_rate=0.05,
        buffer_capacity=500,
        checkpoint_every=1,
        hidden_size=8,
        eval_games_per_side=2,
        out_dir=out_dir,
    )
    base.update(overrides)
    return TrainLoopConfig(**base)


def test_train_loop_produces_metrics_and_checkpoints(tmp_path):
    result = train_loop(_train_config(tmp_path))
    assert [m.iteration for m in result.metrics] == [1, 2]
    for m in result.metrics:
        assert m.games == 4
        assert m.examples >= 4 * 5
        assert np.isfinite(m.mean_loss) and m.mean_loss > 0
    assert result.metrics[0].buffer_size == result.metrics[0].examples
    assert (
        result.metrics[1].buffer_size
        == result.metrics[0].examples + result.metrics[1].examples
    )

    names = [p.name for p in result.checkpoint_paths]
    assert names == ["checkpoint_0000.gstnet", "checkpoint_0001.gstnet", "checkpoint_0002.gstnet"]
    assert all(p.exists() for p in result.checkpoint_paths)
    final = TinyNet.load(result.checkpoint_paths[-1])
    assert np.array_equal(final.get_flat(), result.net.get_flat())
    initial = TinyNet.load(result.checkpoint_paths[0])
    assert not np.array_equal(initial.get_flat(), result.net.get_flat())

    rows = result.metrics_path.read_text().strip().split("\n")
    assert rows[0] == ",".join(METRICS_FIELDS)
    assert len(rows) == 3
    first = rows[1].split(",")
    assert int(first[0]) == 1
    assert float(first[4]) == result.metrics[0].mean_loss

    assert result.final_arena is not None
    assert len(result.final_arena.records) == 4


def test_train_loop_is_deterministic(tmp_path):
    a = train_loop(_train_config(tmp_path / "a", run_final_arena=False))
    b = train_loop(_train_config(tmp_path / "b", run_final_arena=False))
    assert [m.mean_loss for m in a.metrics] == [m.mean_loss for m in b.metrics]
    assert np.array_equal(a.net.get_flat(), b.net.get_flat())
    assert a.final_arena is None


def test_train_loop_without_output_directory():
    result = train_loop(
        _train_config(None, iterations=1, rollout_games=2, eval_games_per_side=1)
    )
    assert result.checkpoint_paths == []
    assert result.metrics_path is None
    assert len(result.metrics) == 1
    assert result.final_arena is not None
