"""Time the hot kernels: JIT-compiled vs pure-Python fallback.

Builds both variants explicitly (ignoring GAMESEARCH_NUMBA) from the same
function bodies, checks they agree bitwise on the benchmark inputs, and
prints a timing table. Workload shapes mirror the engine's hot paths:
per-node policy solves, budget assignment, selection argmax, and batched
network inference.
"""

import argparse
import time

import numpy as np

from gamesearch.kernels import (
    _assign_counts_py,
    _net_forward_py,
    _newton_common_ucb_py,
    _ucb_argmax_py,
)


def _build_jitted():
    try:
        from numba import njit
    except ImportError:
        return None
    jit = {
        "newton_common_ucb": njit(cache=True)(_newton_common_ucb_py),
        "assign_counts": njit(cache=True)(_assign_counts_py),
        "ucb_argmax": njit(cache=True)(_ucb_argmax_py),
        "net_forward": njit(cache=True)(_net_forward_py),
    }
    return jit


def _workloads(rng, repeats):
    """(name, python fn, jit key, list of argument tuples, runs)."""
    loads = []

    for k in (2, 8, 32):
        args = []
        for _ in range(64):
            q = rng.normal(0.0, 2.0, size=k)
            prior = rng.dirichlet(np.ones(k))
            lam = float(rng.uniform(0.05, 1.0))
            args.append((q, prior, lam, 1e-10))
        loads.append((f"newton_common_ucb k={k}", _newton_common_ucb_py,
                      "newton_common_ucb", args, repeats))

    for k in (8, 32):
        args = []
        for _ in range(64):
            prior = rng.dirichlet(np.ones(k))
            out = np.zeros(k, dtype=np.int64)
            args.append((prior, 512, float(rng.random()), out))
        loads.append((f"assign_counts k={k}", _assign_counts_py,
                      "assign_counts", args, repeats))

    args = []
    for _ in range(64):
        k = 7
        q = rng.normal(0.0, 0.5, size=k)
        counts = rng.integers(0, 200, size=k).astype(np.float64)
        prior = rng.dirichlet(np.ones(k))
        args.append((q, counts, prior, 1.0))
    loads.append(("ucb_argmax k=7", _ucb_argmax_py, "ucb_argmax", args, repeats * 2))

    batch, n_in, hidden, actions = 16, 48, 32, 4
    args = []
    for _ in range(4):
        xb = rng.normal(0.0, 1.0, size=(batch, n_in))
        w1 = rng.normal(0.0, 0.2, size=(hidden, n_in))
        b1 = rng.normal(0.0, 0.1, size=hidden)
        w2 = rng.normal(0.0, 0.2, size=(actions, hidden))
        b2 = rng.normal(0.0, 0.1, size=actions)
        wv = rng.normal(0.0, 0.2, size=hidden)
        values = np.zeros(batch)
        policies = np.zeros((batch, actions))
        args.append((xb, w1, b1, w2, b2, wv, 0.05, 1.0, values, policies))
    loads.append((f"net_forward {batch}x{n_in}->{hidden}->{actions}",
                  _net_forward_py, "net_forward", args, max(repeats // 100, 3)))

    return loads


def _agree(py_fn, jit_fn, args_list):
    """Bitwise agreement of the two paths, including output buffers."""
    for args in args_list:
        py_args = tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args)
        jit_args = tuple(a.copy() if isinstance(a, np.ndarray) else a for a in args)
        r_py = py_fn(*py_args)
        r_jit = jit_fn(*jit_args)
        if r_py is not None and not np.array_equal(np.asarray(r_py), np.asarray(r_jit)):
            return False
        for a, b in zip(py_args, jit_args):
            if isinstance(a, np.ndarray) and not np.array_equal(a, b):
                return False
    return True


def _time(fn, args_list, runs):
    t0 = time.perf_counter()
    for _ in range(runs):
        for args in args_list:
            fn(*args)
    return (time.perf_counter() - t0) / (runs * len(args_list))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--repeats", type=int, default=300, help="timing loop runs per workload")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    jit = _build_jitted()
    loads = _workloads(rng, args.repeats)

    if jit is None:
        print("numba unavailable: timing the pure-Python path only")
    else:
        for name, py_fn, key, args_list, _ in loads:
            if not _agree(py_fn, jit[key], args_list[:4]):
                print(f"MISMATCH: {name} differs between paths")
                return 1

    header = f"{'kernel':<34} {'python/call':>14} {'jit/call':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, py_fn, key, args_list, runs in loads:
        t_py = _time(py_fn, args_list, max(runs // 20, 1))
        if jit is None:
            print(f"{name:<34} {t_py * 1e6:>11.2f} us {'-':>14} {'-':>9}")
            continue
        jit[key](*args_list[0])  # compile outside the timed loop
        t_jit = _time(jit[key], args_list, runs)
        print(
            f"{name:<34} {t_py * 1e6:>11.2f} us {t_jit * 1e6:>11.2f} us "
            f"{t_py / t_jit:>8.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
