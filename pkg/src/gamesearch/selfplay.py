"""Self-play rollout generation, replay storage, and the training loop.

Rollouts play many games in lockstep: every live game runs one search per
sweep through a single multi-root call, so evaluator batches span games.
Each visited state becomes one replay example whose value target is the
final score of its own game, taken from that state's player-to-move
perspective. A small SGD loop then fits the network to sampled examples
and periodically checkpoints.
"""

from __future__ import annotations

import csv
import json
import struct
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .arena import AgentSpec, MatchConfig, MatchReport, play_match
from .evaluators import Evaluator, LatencyModel, with_latency
from .games.base import Game
from .search import SearchParams, derived_seed, run_search_multi, sample_policy
from .tinynet import NetEvaluator, TinyNet

REPLAY_MAGIC = b"GSRB\x00\x00"
REPLAY_VERSION = 1


@dataclass(frozen=True)
class ReplayExample:
    encoding: np.ndarray  # float32, the game's encoding shape
    target_policy: np.ndarray  # float64 over the full action space, sums to 1
    target_value: float  # final game score, player-to-move perspective


class ReplayBuffer:
    """Fixed-capacity FIFO store with seeded uniform sampling."""

    def __init__(self, capacity: int, seed: int = 0):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.appended = 0
        self.sampled = 0
        self._data = []
        self._pos = 0  # next slot to overwrite once full
        self._rng = np.random.default_rng(seed)

    def __len__(self) -> int:
        return len(self._data)

    def append(self, example: ReplayExample) -> None:
        if len(self._data) < self.capacity:
            self._data.append(example)
        else:
            self._data[self._pos] = example
            self._pos = (self._pos + 1) % self.capacity
        self.appended += 1

    def extend(self, examples) -> None:
        for ex in examples:
            self.append(ex)

    def contents(self) -> list:
        """Current examples, oldest first."""
        return self._data[self._pos :] + self._data[: self._pos]

    def sample(self, batch_size: int):
        """(encodings, policies, values) stacked over a uniform draw."""
        if not self._data:
            raise ValueError("cannot sample from an empty buffer")
        idx = self._rng.integers(len(self._data), size=batch_size)
        self.sampled += batch_size
        enc = np.stack([self._data[i].encoding for i in idx])
        pol = np.stack([self._data[i].target_policy for i in idx])
        val = np.array([self._data[i].target_value for i in idx], dtype=np.float64)
        return enc, pol, val

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        """Length-prefixed binary records, oldest first.

        Layout: magic, u32 version, u32 header length, JSON header
        {encoding_shape, action_space, count}, then per record a u32
        byte length followed by encoding float32 bytes, policy float64
        bytes, and one float64 value.
        """
        items = self.contents()
        if not items:
            raise ValueError("refusing to save an empty buffer")
        header = {
            "encoding_shape": list(items[0].encoding.shape),
            "action_space": int(items[0].target_policy.shape[0]),
            "count": len(items),
        }
        blob = json.dumps(header).encode("utf-8")
        with open(path, "wb") as f:
            f.write(REPLAY_MAGIC)
            f.write(struct.pack("<II", REPLAY_VERSION, len(blob)))
            f.write(blob)
            for ex in items:
                enc = np.ascontiguousarray(ex.encoding, dtype=np.float32).tobytes()
                pol = np.ascontiguousarray(ex.target_policy, dtype=np.float64).tobytes()
                payload = enc + pol + struct.pack("<d", ex.target_value)
                f.write(struct.pack("<I", len(payload)))
                f.write(payload)

    @classmethod
    def load(cls, path, capacity: "int | None" = None, seed: int = 0) -> "ReplayBuffer":
        with open(path, "rb") as f:
            if f.read(len(REPLAY_MAGIC)) != REPLAY_MAGIC:
                raise ValueError(f"{path}: not a replay file")
            version, header_len = struct.unpack("<II", f.read(8))
            if version != REPLAY_VERSION:
                raise ValueError(f"unsupported replay version {version}")
            header = json.loads(f.read(header_len).decode("utf-8"))
            shape = tuple(header["encoding_shape"])
            n_actions = header["action_space"]
            enc_bytes = int(np.prod(shape)) * 4
            pol_bytes = n_actions * 8
            buf = cls(capacity if capacity is not None else max(header["count"], 1), seed)
            for _ in range(header["count"]):
                (length,) = struct.unpack("<I", f.read(4))
                payload = f.read(length)
                if len(payload) != length or length != enc_bytes + pol_bytes + 8:
                    raise ValueError(f"{path}: truncated or malformed record")
                enc = np.frombuffer(payload[:enc_bytes], dtype=np.float32).reshape(shape)
                pol = np.frombuffer(payload[enc_bytes : enc_bytes + pol_bytes], dtype=np.float64)
                (val,) = struct.unpack("<d", payload[enc_bytes + pol_bytes :])
                buf.append(ReplayExample(enc.copy(), pol.copy(), val))
        return buf

    def export_jsonl(self, path) -> None:
        """One JSON object per example, for eyeballing replay contents."""
        with open(path, "w") as f:
            for ex in self.contents():
                f.write(
                    json.dumps(
                        {
                            "encoding": np.asarray(ex.encoding, dtype=float).ravel().tolist(),
                            "policy": np.asarray(ex.target_policy, dtype=float).tolist(),
                            "value": ex.target_value,
                        }
                    )
                )
                f.write("\n")


@dataclass(frozen=True)
class RolloutConfig:
    game: Game
    params: SearchParams
    games: int  # completed games (fixed mode) or lockstep width (timed mode)
    temperature_plies: int = 6

    def __post_init__(self):
        if self.games < 1:
            raise ValueError("games must be >= 1")
        if self.temperature_plies < 0:
            raise ValueError("temperature_plies must be >= 0")


class _LiveGame:
    __slots__ = ("state", "history", "ply", "index")

    def __init__(self, state, index: int):
        self.state = state
        self.history = []
        self.ply = 0
        self.index = index


def examples_from_game(game, history, final) -> list:
    """Back-fill one finished game: history is the visited (state, policy)
    pairs in order, final the terminal state. Each example's value target
    is the final score seen from that state's player to move."""
    out = []
    for state, policy in history:
        out.append(
            ReplayExample(
                game.encode(state), policy, game.terminal_score(final, state.to_move)
            )
        )
    return out


def _rollout_driver(game, evaluator, config, budget_seconds):
    """Lockstep self-play; returns (examples, completed games, elapsed).

    budget_seconds None plays exactly config.games games with no refill;
    otherwise finished slots are refilled and play stops at the first
    sweep boundary past the budget (partial games are dropped).
    """
    params = config.params
    t0 = time.perf_counter()
    next_index = config.games
    live = [_LiveGame(game.initial_state(), i) for i in range(config.games)]
    examples = []
    completed = 0
    sweep = 0
    while live:
        if budget_seconds is not None and time.perf_counter() - t0 >= budget_seconds:
            break
        sweep_params = SearchParams(
            params.n_sims, params.c, derived_seed(params.seed, sweep), params.algorithm
        )
        results = run_search_multi(
            game, [slot.state for slot in live], sweep_params, evaluator
        )
        survivors = []
        for slot, result in zip(live, results):
            if slot.ply < config.temperature_plies:
                a = sample_policy(result.policy, params.seed, slot.index, slot.ply, 2)
            else:
                a = result.best_action()
            slot.history.append((slot.state, result.policy))
            slot.state = game.apply(slot.state, a)
            slot.ply += 1
            if game.is_terminal(slot.state):
                examples.extend(examples_from_game(game, slot.history, slot.state))
                completed += 1
                if budget_seconds is not None:
                    survivors.append(_LiveGame(game.initial_state(), next_index))
                    next_index += 1
            else:
                survivors.append(slot)
        live = survivors
        sweep += 1
    return examples, completed, time.perf_counter() - t0


def generate_rollouts(evaluator: Evaluator, config: RolloutConfig) -> list:
    """Play config.games full games; one example per visited state."""
    examples, _, _ = _rollout_driver(config.game, evaluator, config, None)
    return examples


def generate_rollouts_timed(evaluator: Evaluator, config: RolloutConfig, budget_seconds: float):
    """Roll out under a wall-clock budget; returns (examples, games, elapsed)."""
    return _rollout_driver(config.game, evaluator, config, budget_seconds)


@dataclass(frozen=True)
class TrainLoopConfig:
    game: Game
    params: SearchParams
    iterations: int
    rollout_games: int = 64
    minibatches: int = 32
    batch_size: int = 64
    learning_rate: float = 0.05
    buffer_capacity: int = 50_000
    temperature_plies: int = 6
    checkpoint_every: int = 5
    hidden_size: int = 64
    latency_us: float = 0.0
    eval_games_per_side: int = 32
    run_final_arena: bool = True
    out_dir: "str | Path | None" = None

    def __post_init__(self):
        for name in (
            "rollout_games",
            "minibatches",
            "batch_size",
            "buffer_capacity",
            "checkpoint_every",
            "hidden_size",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")


@dataclass(frozen=True)
class IterationMetrics:
    iteration: int
    games: int
    examples: int
    buffer_size: int
    mean_loss: float
    rollout_seconds: float
    train_seconds: float

    def as_row(self) -> list:
        return [
            self.iteration,
            self.games,
            self.examples,
            self.buffer_size,
            self.mean_loss,
            self.rollout_seconds,
            self.train_seconds,
        ]


METRICS_FIELDS = [
    "iteration",
    "games",
    "examples",
    "buffer_size",
    "mean_loss",
    "rollout_seconds",
    "train_seconds",
]


@dataclass(frozen=True)
class TrainResult:
    net: TinyNet
    metrics: list  # IterationMetrics per iteration
    checkpoint_paths: list
    metrics_path: "Path | None"
    final_arena: "MatchReport | None"


def train_loop(config: TrainLoopConfig) -> TrainResult:
    """Alternate self-play rollouts and SGD on the replay buffer.

    Checkpoints land in out_dir (iteration 0, every checkpoint_every
    iterations, and the final net); metrics.csv gets one row per
    iteration. The final net then plays the iteration-0 net over a
    small paired arena unless run_final_arena is off.
    """
    game = config.game
    seed = config.params.seed
    net = TinyNet.for_game(game, hidden_size=config.hidden_size, seed=seed)
    buffer = ReplayBuffer(config.buffer_capacity, seed=derived_seed(seed, 1))

    out_dir = Path(config.out_dir) if config.out_dir is not None else None
    checkpoint_paths = []
    metrics_path = None
    writer = None
    metrics_file = None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        initial_path = out_dir / "checkpoint_0000.gstnet"
        net.save(initial_path)
        checkpoint_paths.append(initial_path)
        metrics_path = out_dir / "metrics.csv"
        metrics_file = open(metrics_path, "w", newline="")
        writer = csv.writer(metrics_file)
        writer.writerow(METRICS_FIELDS)
    initial = TinyNet.load(checkpoint_paths[0]) if checkpoint_paths else _clone(net)

    metrics = []
    try:
        for iteration in range(1, config.iterations + 1):
            evaluator = _wrap(NetEvaluator(net), config.latency_us)
            rollout_cfg = RolloutConfig(
                game,
                SearchParams(
                    config.params.n_sims,
                    config.params.c,
                    derived_seed(seed, 2, iteration),
                    config.params.algorithm,
                ),
                config.rollout_games,
                config.temperature_plies,
            )
            t0 = time.perf_counter()
            examples = generate_rollouts(evaluator, rollout_cfg)
            rollout_s = time.perf_counter() - t0
            buffer.extend(examples)

            t0 = time.perf_counter()
            total_loss = 0.0
            for _ in range(config.minibatches):
                enc, pol, val = buffer.sample(config.batch_size)
                total_loss += net.train_step(enc, pol, val, config.learning_rate)
            train_s = time.perf_counter() - t0

            row = IterationMetrics(
                iteration,
                config.rollout_games,
                len(examples),
                len(buffer),
                total_loss / config.minibatches,
                rollout_s,
                train_s,
            )
            metrics.append(row)
            if writer is not None:
                writer.writerow(row.as_row())
                metrics_file.flush()
            if out_dir is not None and (
                iteration % config.checkpoint_every == 0 or iteration == config.iterations
            ):
                path = out_dir / f"checkpoint_{iteration:04d}.gstnet"
                net.save(path)
                checkpoint_paths.append(path)
    finally:
        if metrics_file is not None:
            metrics_file.close()

    final_arena = None
    if config.run_final_arena and config.iterations > 0:
        spec = AgentSpec(
            config.params.algorithm, config.params.n_sims, config.params.c, "net"
        )
        final_arena = play_match(
            MatchConfig(
                game,
                spec,
                spec,
                games_per_side=config.eval_games_per_side,
                seed=derived_seed(seed, 3),
            ),
            evaluators=(NetEvaluator(net), NetEvaluator(initial)),
        )
    return TrainResult(net, metrics, checkpoint_paths, metrics_path, final_arena)


def _wrap(evaluator: Evaluator, latency_us: float) -> Evaluator:
    if latency_us > 0:
        return with_latency(evaluator, LatencyModel(fixed_overhead=latency_us))
    return evaluator


def _clone(net: TinyNet) -> TinyNet:
    twin = TinyNet(
        net.input_shape, net.n_actions, net.hidden_size, net.score_scale, net.game_config
    )
    twin.set_flat(net.get_flat().copy())
    return twin
