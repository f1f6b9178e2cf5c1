"""Head-to-head matches, timing benchmarks, and a bandit demo.

play_match pits two configured agents over paired games (each pair swaps
seats and shares per-ply seeds, so a self-match is exactly symmetric).
bench_single_root / bench_multi_root sweep the simulation budget for both
algorithms under a synthetic-latency evaluator and report wall time and
evaluator-usage counters. bandit_trace records per-step upper-confidence
values and visit counts on a two-armed slot machine.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import kernels
from .evaluators import (
    Evaluator,
    HeuristicEvaluator,
    LatencyModel,
    UniformEvaluator,
    with_latency,
)
from .games import BanditGame, Game, Player
from .search import (
    Algorithm,
    SearchParams,
    derived_seed,
    run_search,
    run_search_multi,
    sample_policy,
)

BENCH_SWEEP = (32, 64, 128, 256, 512, 1024, 2048)


def build_evaluator(evaluator_id: str, game: Game, latency_us: float = 0.0) -> Evaluator:
    """Evaluator from an id string: uniform | heuristic | net | net:<path>.

    "net" builds a freshly initialized network for the game; "net:<path>"
    loads a checkpoint. A positive latency_us wraps the result in a
    fixed-overhead-per-call latency model.
    """
    from .tinynet import NetEvaluator, TinyNet

    if evaluator_id == "uniform":
        ev = UniformEvaluator()
    elif evaluator_id == "heuristic":
        ev = HeuristicEvaluator()
    elif evaluator_id == "net":
        ev = NetEvaluator(TinyNet.for_game(game))
    elif evaluator_id.startswith("net:"):
        ev = NetEvaluator(TinyNet.load(evaluator_id[4:]))
    else:
        raise ValueError(f"unknown evaluator id: {evaluator_id!r}")
    if latency_us > 0:
        ev = with_latency(ev, LatencyModel(fixed_overhead=latency_us))
    return ev


@dataclass(frozen=True)
class AgentSpec:
    """One side of a match: search algorithm plus its evaluator."""

    algorithm: Algorithm
    n_sims: int
    c: float = 1.0
    evaluator: str = "uniform"
    latency_us: float = 0.0

    def label(self) -> str:
        return f"{self.algorithm.value}(n={self.n_sims},c={self.c},{self.evaluator})"

    def params(self, seed: int) -> SearchParams:
        return SearchParams(self.n_sims, self.c, seed, self.algorithm)

    def build(self, game: Game) -> Evaluator:
        return build_evaluator(self.evaluator, game, self.latency_us)


@dataclass(frozen=True)
class MatchConfig:
    game: Game
    agent_a: AgentSpec
    agent_b: AgentSpec
    games_per_side: int
    seed: int = 0
    opening_plies: int = 2
    threads: int = 1

    def __post_init__(self):
        if self.games_per_side < 1:
            raise ValueError("games_per_side must be >= 1")


class GameRecord(NamedTuple):
    index: int
    pair: int
    a_seat: str  # "P1" if agent A moved first
    score_a: float
    plies: int
    time_a: float
    time_b: float


@dataclass(frozen=True)
class MatchReport:
    """Aggregate view of one match; all fields recomputable from records."""

    agent_a: str
    agent_b: str
    records: list
    scores: np.ndarray  # agent A perspective, one entry per game
    mean_score: float
    wins: int
    draws: int
    losses: int
    mean_time_a: float
    mean_time_b: float
    speedup: float  # agent B search time / agent A search time

    def as_dict(self) -> dict:
        return {
            "agent_a": self.agent_a,
            "agent_b": self.agent_b,
            "mean_score": self.mean_score,
            "wins": self.wins,
            "draws": self.draws,
            "losses": self.losses,
            "mean_time_a": self.mean_time_a,
            "mean_time_b": self.mean_time_b,
            "speedup": self.speedup,
            "games": [r._asdict() for r in self.records],
        }

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.as_dict(), f, indent=2)
            f.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(GameRecord._fields)
            writer.writerows(self.records)


def _play_one_game(game, spec_by_seat, eval_by_seat, match_seed, pair, opening_plies):
    """One game; returns (score for seat P1, search seconds per seat, plies).

    Search seeds and opening draws are keyed (match_seed, pair, ply) with
    no seat term, so the seat-swapped twin of a game between identical
    agents replays move for move.
    """
    s = game.initial_state()
    seconds = {Player.P1: 0.0, Player.P2: 0.0}
    ply = 0
    while not game.is_terminal(s):
        seat = s.to_move
        spec = spec_by_seat[seat]
        params = spec.params(derived_seed(match_seed, pair, ply))
        t0 = time.perf_counter()
        result = run_search(game, s, params, eval_by_seat[seat])
        seconds[seat] += time.perf_counter() - t0
        if ply < opening_plies:
            a = sample_policy(result.policy, match_seed, pair, ply, 1)
        else:
            a = result.best_action()
        s = game.apply(s, a)
        ply += 1
    return game.terminal_score(s, Player.P1), seconds, ply


def play_match(config: MatchConfig, evaluators=None) -> MatchReport:
    """Run the full paired match; evaluators can be passed in (a, b) or built.

    Every move is the argmax of the agent's returned policy (ties break
    to the lowest action id) except the first opening_plies plies, which
    are sampled from the policy to vary openings across pairs.
    """
    game = config.game
    if evaluators is None:
        evaluators = (config.agent_a.build(game), config.agent_b.build(game))
    ev_a, ev_b = evaluators

    def run(task):
        index, pair, a_first = task
        if a_first:
            spec_by_seat = {Player.P1: config.agent_a, Player.P2: config.agent_b}
            eval_by_seat = {Player.P1: ev_a, Player.P2: ev_b}
        else:
            spec_by_seat = {Player.P1: config.agent_b, Player.P2: config.agent_a}
            eval_by_seat = {Player.P1: ev_b, Player.P2: ev_a}
        score_p1, seconds, plies = _play_one_game(
            game, spec_by_seat, eval_by_seat, config.seed, pair, config.opening_plies
        )
        seat_a = Player.P1 if a_first else Player.P2
        return GameRecord(
            index,
            pair,
            seat_a.name,
            score_p1 if a_first else -score_p1,
            plies,
            seconds[seat_a],
            seconds[seat_a.other],
        )

    tasks = []
    for pair in range(config.games_per_side):
        tasks.append((2 * pair, pair, True))
        tasks.append((2 * pair + 1, pair, False))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(run, tasks))
    else:
        records = [run(t) for t in tasks]

    scores = np.array([r.score_a for r in records], dtype=np.float64)
    n_games = len(records)
    time_a = sum(r.time_a for r in records) / n_games
    time_b = sum(r.time_b for r in records) / n_games
    return MatchReport(
        agent_a=config.agent_a.label(),
        agent_b=config.agent_b.label(),
        records=records,
        scores=scores,
        mean_score=float(scores.mean()),
        wins=int((scores > 0).sum()),
        draws=int((scores == 0).sum()),
        losses=int((scores < 0).sum()),
        mean_time_a=time_a,
        mean_time_b=time_b,
        speedup=time_b / time_a if time_a > 0 else float("inf"),
    )


class BenchRow(NamedTuple):
    algorithm: str
    n_roots: int
    n_sims: int
    wall_time: float
    eval_calls: int
    eval_items: int
    time_per_root: float


@dataclass(frozen=True)
class BenchReport:
    """Budget sweep for one or both algorithms on a fixed position set."""

    game: str
    evaluator: str
    latency_us: float
    rows: list
    speedups: dict  # n_sims -> ucb wall time / rmcts wall time

    def as_dict(self) -> dict:
        return {
            "game": self.game,
            "evaluator": self.evaluator,
            "latency_us": self.latency_us,
            "rows": [r._asdict() for r in self.rows],
            "speedups": {str(k): v for k, v in self.speedups.items()},
        }

    def write_json(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.as_dict(), f, indent=2)
            f.write("\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(BenchRow._fields)
            writer.writerows(self.rows)


def _bench(game, roots, n_sweep, evaluator_id, latency_us, c, seed, algorithms):
    kernels.warmup()
    base = build_evaluator(evaluator_id, game, latency_us)
    rows = []
    times = {}
    for n in n_sweep:
        for algo in algorithms:
            params = SearchParams(n, c, seed, algo)
            t0 = time.perf_counter()
            results = run_search_multi(game, roots, params, base)
            wall = time.perf_counter() - t0
            stats = results[0].stats
            rows.append(
                BenchRow(
                    algo.value,
                    len(roots),
                    n,
                    wall,
                    stats.eval_calls,
                    stats.eval_items,
                    wall / len(roots),
                )
            )
            times[(algo, n)] = wall
    speedups = {}
    for n in n_sweep:
        if (Algorithm.UCB, n) in times and (Algorithm.RMCTS, n) in times:
            speedups[n] = times[(Algorithm.UCB, n)] / times[(Algorithm.RMCTS, n)]
    name = game.config.game.value if game.config is not None else type(game).__name__
    return BenchReport(name, evaluator_id, latency_us, rows, speedups)


def bench_single_root(
    game: Game,
    n_sweep=BENCH_SWEEP,
    evaluator: str = "net",
    latency_us: float = 1000.0,
    c: float = 1.0,
    seed: int = 0,
    algorithms=(Algorithm.RMCTS, Algorithm.UCB),
) -> BenchReport:
    """Budget sweep from the initial position, one root per search."""
    return _bench(
        game, [game.initial_state()], n_sweep, evaluator, latency_us, c, seed, algorithms
    )


def bench_multi_root(
    game: Game,
    roots: int = 64,
    n_sweep=BENCH_SWEEP,
    evaluator: str = "net",
    latency_us: float = 1000.0,
    c: float = 1.0,
    seed: int = 0,
    algorithms=(Algorithm.RMCTS, Algorithm.UCB),
) -> BenchReport:
    """Joint sweep over many root copies; per-root seeds keep trees distinct."""
    root_states = [game.initial_state()] * roots
    return _bench(game, root_states, n_sweep, evaluator, latency_us, c, seed, algorithms)


@dataclass(frozen=True)
class BanditConfig:
    probs: tuple  # per-arm payout probability for +1 (else -1)
    n_sims: int = 200
    c: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.probs):
            raise ValueError("arm probabilities must be in [0, 1]")
        if self.n_sims < 2:
            raise ValueError("n_sims must be >= 2")


@dataclass(frozen=True)
class BanditTrace:
    """Per-simulation bookkeeping of the bandit search, row per step.

    Step 1 is the root inference (uniform prior, no pull); each later
    step pulls the arm with the highest upper-confidence score and
    updates its running mean with a freshly sampled payout. The counts
    and means after the final step match search_ucb on the same game
    with the same seed.
    """

    probs: tuple
    steps: np.ndarray  # (n,) 1-based simulation index
    counts: np.ndarray  # (n, arms) pulls so far
    q: np.ndarray  # (n, arms) running mean payout
    ucb: np.ndarray  # (n, arms) score used for the next selection

    def write_csv(self, path) -> None:
        arms = range(len(self.probs))
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(
                ["step"]
                + [f"count_{a}" for a in arms]
                + [f"q_{a}" for a in arms]
                + [f"ucb_{a}" for a in arms]
            )
            for i in range(len(self.steps)):
                writer.writerow(
                    [int(self.steps[i])]
                    + [int(x) for x in self.counts[i]]
                    + [float(x) for x in self.q[i]]
                    + [float(x) for x in self.ucb[i]]
                )


def bandit_trace(config: BanditConfig) -> BanditTrace:
    """Trace visit counts and upper-confidence values on the slot machine."""
    game = BanditGame(config.probs)
    root = game.initial_state()
    arms = len(config.probs)
    # same stream the tree search uses for its single root
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0)))
    prior = np.full(arms, 1.0 / arms)
    q = np.zeros(arms, dtype=np.float64)
    n = np.zeros(arms, dtype=np.int64)
    children = [game.apply(root, a) for a in range(arms)]

    steps = np.arange(1, config.n_sims + 1, dtype=np.int64)
    counts_out = np.zeros((config.n_sims, arms), dtype=np.int64)
    q_out = np.zeros((config.n_sims, arms), dtype=np.float64)
    ucb_out = np.zeros((config.n_sims, arms), dtype=np.float64)
    for step in range(config.n_sims):
        if step > 0:  # step 0 is the root's own inference
            i = kernels.ucb_argmax(q, n, prior, config.c)
            payout = game.sample_terminal_score(children[i], root.to_move, rng)
            n[i] += 1
            q[i] += (payout - q[i]) / n[i]
        counts_out[step] = n
        q_out[step] = q
        ucb_out[step] = q + config.c * prior * np.sqrt(n.sum()) / (1.0 + n)
    return BanditTrace(config.probs, steps, counts_out, q_out, ucb_out)
