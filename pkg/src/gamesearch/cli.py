"""Command-line entry point.

Subcommands: bench, arena, bandit, selfplay, train, serve, solve-policy.
Every run prints its resolved configuration as one JSON line before
doing any work, so an output file can always be traced back to the
exact invocation. An optional --config JSON file supplies defaults;
explicit flags win. Exit codes: 0 success, 2 usage error, 1 runtime
failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

import numpy as np

from .games import GameConfig, GameKind, make_game
from .search import Algorithm, SearchParams

GAME_CHOICES = [k.value for k in GameKind]
ALGO_CHOICES = [a.value for a in Algorithm]


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _add_game_flags(p, default_game="connect4"):
    p.add_argument("--game", choices=GAME_CHOICES, default=default_game)
    p.add_argument("--width", type=int, default=0, help="board width (0 = game default)")
    p.add_argument("--height", type=int, default=0, help="board height (0 = game default)")
    p.add_argument("--connect-k", type=int, default=4, help="connect-4 line length")


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", type=Path, default=Path("."))
    p.add_argument("--format", choices=["csv", "json", "both"], default="both")
    p.add_argument("--threads", type=int, default=1)


def _game_from_args(args):
    return make_game(
        GameConfig(
            GameKind(args.game),
            width=args.width,
            height=args.height,
            connect_k=args.connect_k,
        )
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gamesearch",
        description="Game-search engines, benchmarks, and training harnesses.",
    )
    parser.add_argument(
        "--config", type=Path, default=None, help="JSON file with flag defaults"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bench", help="budget sweep timing both algorithms")
    _add_game_flags(p)
    _add_common(p)
    p.add_argument("--algo", choices=ALGO_CHOICES + ["both"], default="both")
    p.add_argument("--sims", type=_int_list, default=None, help="comma-separated budgets")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--roots", type=int, default=1, help="root states per joint search")
    p.add_argument("--latency-us", type=float, default=1000.0)
    p.add_argument("--eval", default="net", help="uniform | heuristic | net | net:<ckpt>")
    p.add_argument("--out", default="bench", help="output file stem")

    p = sub.add_parser("arena", help="paired match between two agents")
    _add_game_flags(p, default_game="othello")
    _add_common(p)
    p.add_argument("--algo-a", choices=ALGO_CHOICES, default="rmcts")
    p.add_argument("--algo-b", choices=ALGO_CHOICES, default="ucb")
    p.add_argument("--sims-a", type=int, default=512)
    p.add_argument("--sims-b", type=int, default=256)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--eval", default="heuristic")
    p.add_argument("--games", type=int, default=32, help="games per side")
    p.add_argument("--latency-us", type=float, default=0.0)
    p.add_argument("--opening-plies", type=int, default=2)
    p.add_argument("--out", default="arena", help="output file stem")

    p = sub.add_parser("bandit", help="two-armed bandit bookkeeping trace")
    _add_common(p)
    p.add_argument("--p", type=_float_list, default=[0.6, 0.4], help="arm payout probabilities")
    p.add_argument("--sims", type=int, default=200)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--out", default="bandit", help="output file stem")

    p = sub.add_parser("selfplay", help="generate rollout games into a replay file")
    _add_game_flags(p)
    _add_common(p)
    p.add_argument("--algo", choices=ALGO_CHOICES, default="rmcts")
    p.add_argument("--sims", type=int, default=64)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--eval", default="net")
    p.add_argument("--games", type=int, default=64)
    p.add_argument("--temperature-plies", type=int, default=6)
    p.add_argument("--latency-us", type=float, default=0.0)
    p.add_argument("--out", default="replay", help="output file stem")
    p.add_argument("--jsonl", action="store_true", help="also write a JSON-lines export")

    p = sub.add_parser("train", help="self-play training loop on the tiny net")
    _add_game_flags(p)
    _add_common(p)
    p.add_argument("--algo", choices=ALGO_CHOICES, default="rmcts")
    p.add_argument("--sims", type=int, default=64)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--rollout-games", type=int, default=64)
    p.add_argument("--minibatches", type=int, default=32)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--checkpoint-every", type=int, default=5)
    p.add_argument("--latency-us", type=float, default=0.0)
    p.add_argument("--no-final-arena", action="store_true")

    p = sub.add_parser("serve", help="run the HTTP play service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--frontend-dir", type=Path, default=None)

    p = sub.add_parser("solve-policy", help="regularized policy for one decision")
    p.add_argument("--q", type=_float_list, required=True, help="action values, comma-separated")
    p.add_argument("--prior", type=_float_list, default=None, help="prior weights (default uniform)")
    p.add_argument("--sims", type=int, default=500)
    p.add_argument("--c", type=float, default=1.0)

    return parser


def _print_config(args) -> None:
    resolved = {}
    for key, value in sorted(vars(args).items()):
        if key == "config":
            continue
        resolved[key] = str(value) if isinstance(value, Path) else value
    print(json.dumps({"resolved_config": resolved}))


def _emit(report, out_dir: Path, stem: str, fmt: str) -> list:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        path = out_dir / f"{stem}.csv"
        report.write_csv(path)
        written.append(str(path))
    if fmt in ("json", "both"):
        path = out_dir / f"{stem}.json"
        report.write_json(path)
        written.append(str(path))
    return written


def _cmd_bench(args) -> int:
    from .arena import BENCH_SWEEP, bench_multi_root, bench_single_root

    game = _game_from_args(args)
    algorithms = (
        tuple(Algorithm) if args.algo == "both" else (Algorithm(args.algo),)
    )
    sweep = tuple(args.sims) if args.sims else BENCH_SWEEP
    if args.roots <= 1:
        report = bench_single_root(
            game, sweep, args.eval, args.latency_us, args.c, args.seed, algorithms
        )
    else:
        report = bench_multi_root(
            game, args.roots, sweep, args.eval, args.latency_us, args.c, args.seed, algorithms
        )
    for path in _emit(report, args.out_dir, args.out, args.format):
        print(f"wrote {path}")
    for n, speedup in report.speedups.items():
        print(f"n_sims={n}: speedup {speedup:.2f}x")
    return 0


def _cmd_arena(args) -> int:
    from .arena import AgentSpec, MatchConfig, play_match

    game = _game_from_args(args)
    config = MatchConfig(
        game,
        AgentSpec(Algorithm(args.algo_a), args.sims_a, args.c, args.eval, args.latency_us),
        AgentSpec(Algorithm(args.algo_b), args.sims_b, args.c, args.eval, args.latency_us),
        games_per_side=args.games,
        seed=args.seed,
        opening_plies=args.opening_plies,
        threads=args.threads,
    )
    report = play_match(config)
    for path in _emit(report, args.out_dir, args.out, args.format):
        print(f"wrote {path}")
    print(
        f"{report.agent_a} vs {report.agent_b}: mean score {report.mean_score:+.3f} "
        f"({report.wins}W/{report.draws}D/{report.losses}L), "
        f"time/game {report.mean_time_a:.2f}s vs {report.mean_time_b:.2f}s "
        f"(speedup {report.speedup:.2f}x)"
    )
    return 0


def _cmd_bandit(args) -> int:
    from .arena import BanditConfig, bandit_trace

    trace = bandit_trace(BanditConfig(tuple(args.p), args.sims, args.c, args.seed))
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / f"{args.out}.csv"
    trace.write_csv(path)
    print(f"wrote {path}")
    print(f"final counts: {trace.counts[-1].tolist()}")
    return 0


def _cmd_selfplay(args) -> int:
    from .arena import build_evaluator
    from .selfplay import ReplayBuffer, RolloutConfig, generate_rollouts

    game = _game_from_args(args)
    evaluator = build_evaluator(args.eval, game, args.latency_us)
    config = RolloutConfig(
        game,
        SearchParams(args.sims, args.c, args.seed, Algorithm(args.algo)),
        games=args.games,
        temperature_plies=args.temperature_plies,
    )
    examples = generate_rollouts(evaluator, config)
    buffer = ReplayBuffer(max(len(examples), 1), seed=args.seed)
    buffer.extend(examples)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    path = args.out_dir / f"{args.out}.bin"
    buffer.save(path)
    print(f"wrote {path} ({len(examples)} examples from {args.games} games)")
    if args.jsonl:
        jsonl = args.out_dir / f"{args.out}.jsonl"
        buffer.export_jsonl(jsonl)
        print(f"wrote {jsonl}")
    return 0


def _cmd_train(args) -> int:
    from .selfplay import TrainLoopConfig, train_loop

    game = _game_from_args(args)
    config = TrainLoopConfig(
        game,
        SearchParams(args.sims, args.c, args.seed, Algorithm(args.algo)),
        iterations=args.iterations,
        rollout_games=args.rollout_games,
        minibatches=args.minibatches,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        hidden_size=args.hidden,
        checkpoint_every=args.checkpoint_every,
        latency_us=args.latency_us,
        run_final_arena=not args.no_final_arena,
        out_dir=args.out_dir,
    )
    result = train_loop(config)
    if result.metrics:
        first, last = result.metrics[0], result.metrics[-1]
        print(f"loss: iteration 1 {first.mean_loss:.4f} -> iteration {last.iteration} {last.mean_loss:.4f}")
    print(f"checkpoints: {[str(p) for p in result.checkpoint_paths]}")
    if result.final_arena is not None:
        print(f"final vs initial: mean score {result.final_arena.mean_score:+.3f}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(args.frontend_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _cmd_solve_policy(args) -> int:
    from .policy_opt import PolicyOptProblem, solve

    q = np.asarray(args.q, dtype=np.float64)
    prior = (
        np.asarray(args.prior, dtype=np.float64)
        if args.prior is not None
        else np.full(len(q), 1.0 / len(q))
    )
    if prior.shape != q.shape:
        print("error: --q and --prior must have the same length", file=sys.stderr)
        return 2
    result = solve(PolicyOptProblem(q, prior, args.sims, args.c))
    print(
        json.dumps(
            {
                "policy": [float(x) for x in result.pi_bar],
                "u": result.u,
                "iterations": result.iterations,
            }
        )
    )
    return 0


_COMMANDS = {
    "bench": _cmd_bench,
    "arena": _cmd_arena,
    "bandit": _cmd_bandit,
    "selfplay": _cmd_selfplay,
    "train": _cmd_train,
    "serve": _cmd_serve,
    "solve-policy": _cmd_solve_policy,
}


def _config_tokens(path: Path, argv: list) -> list:
    """Turn a JSON defaults file into argv tokens placed before the user's
    flags, so explicitly passed flags take precedence."""
    with open(path) as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    tokens = []
    for key, value in data.items():
        flag = "--" + str(key).replace("_", "-")
        if isinstance(value, bool):
            if value:
                tokens.append(flag)
        elif isinstance(value, list):
            tokens.extend([flag, ",".join(str(v) for v in value)])
        else:
            tokens.extend([flag, str(value)])
    return tokens


_NUMBER_LIST = re.compile(r"^-\d[\d.,eE+-]*$")
_NUMBER_FLAGS = ("--q", "--prior", "--p")


def _merge_number_lists(argv: list) -> list:
    """Rewrite `--q -3,2` as `--q=-3,2` so the value is not read as a flag."""
    out = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in _NUMBER_FLAGS and i + 1 < len(argv) and _NUMBER_LIST.match(argv[i + 1]):
            out.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            out.append(token)
    return out


def main(argv=None) -> int:
    argv = _merge_number_lists(list(sys.argv[1:] if argv is None else argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is not None:
        # re-parse with config defaults spliced in after the subcommand
        try:
            extra = _config_tokens(args.config, argv)
        except (OSError, ValueError) as err:
            print(f"error: bad config file: {err}", file=sys.stderr)
            return 2
        at = argv.index(args.command) + 1
        args = parser.parse_args(argv[:at] + extra + argv[at:])
    _print_config(args)
    try:
        return _COMMANDS[args.command](args)
    except KeyboardInterrupt:
        return 130
    except Exception as err:  # surface runtime failures as exit 1
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
