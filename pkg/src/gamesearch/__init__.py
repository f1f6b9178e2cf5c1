"""Game-search engine: batched Monte Carlo tree search in two flavors.

The classic bandit-style search (mcts_ucb) walks root-to-leaf once per
simulation; the recursive search (rmcts) assigns whole simulation
budgets down the tree and solves a regularized policy optimization at
each node, which lets it batch evaluator calls per tree level. Around
the two engines: game rules (games), batched evaluators (evaluators,
tinynet), match/benchmark harnesses (arena), self-play training
(selfplay), an HTTP play service (service), and a CLI (cli).
"""

from .search import (
    Algorithm,
    SearchParams,
    SearchResult,
    SearchStats,
    run_search,
    run_search_multi,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "SearchParams",
    "SearchResult",
    "SearchStats",
    "run_search",
    "run_search_multi",
    "__version__",
]
