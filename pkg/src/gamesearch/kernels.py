"""Hot numeric kernels, JIT-compiled with numba when available.

Set ``GAMESEARCH_NUMBA=0`` to force the pure-Python fallbacks. Both paths
run the exact same function bodies (explicit loops, fixed operation order),
so results are bit-identical with and without the JIT.
"""

from __future__ import annotations

import math
import os

import numpy as np

_FALSY = ("0", "false", "no", "off")

USE_NUMBA = os.environ.get("GAMESEARCH_NUMBA", "1").lower() not in _FALSY

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def _maybe_jit(fn):
    if USE_NUMBA:
        return njit(cache=True)(fn)
    return fn


def _newton_common_ucb_py(q, prior, lam, eps):
    """Root of f(u) = -1 + lam * sum(prior/(u - q)) for u > max(q).

    Newton's method starting at u0 = max(q + lam*prior). There f(u0) >= 0
    (the argmax term alone contributes 1 to the sum), f is convex and
    decreasing, so the iterates increase monotonically toward the root.
    Returns (u, iterations).
    """
    n = q.shape[0]
    u = q[0] + lam * prior[0]
    for i in range(1, n):
        v = q[i] + lam * prior[i]
        if v > u:
            u = v
    it = 0
    while True:
        f = -1.0
        fp = 0.0
        for i in range(n):
            d = u - q[i]
            t = prior[i] / d
            f += lam * t
            fp -= lam * t / d
        if f <= eps:
            break
        u = u - f / fp
        it += 1
        if it > 1000:
            # unreachable for valid input; guards against NaN poisoning
            return math.nan, it
    return u, it


def _assign_counts_py(prior, n, x, out):
    """Systematic apportionment of n draws to weights via a single offset.

    Boundaries t_i = n * cumsum(prior); slot i receives the number of
    integers k with t_{i-1} <= x + k < t_i. The final boundary is pinned
    to exactly n so the counts always sum to n regardless of float error
    in the cumulative sum. Returns the sum (== n).
    """
    m = prior.shape[0]
    cum = 0.0
    prev = int(np.ceil(0.0 - x))  # == 0 for x in [0, 1)
    total = 0
    for i in range(m):
        cum += prior[i]
        if i == m - 1:
            t = float(n)
        else:
            t = n * cum
        cur = int(np.ceil(t - x))
        out[i] = cur - prev
        total += cur - prev
        prev = cur
    return total


def _net_forward_py(xb, w1, b1, w2, b2, wv, bv0, scale, values, policies):
    """Batched forward pass of the two-layer net, one item at a time.

    Hidden layer tanh(w1 x + b1); value head tanh scaled to score units,
    written to values; policy head written to policies as max-subtracted
    exponentiated logits (unnormalized, caller masks and renormalizes).
    The item loop carries no state between items, so outputs are
    independent of how requests are grouped into batches.
    """
    n_items = xb.shape[0]
    n_in = w1.shape[1]
    n_hidden = w1.shape[0]
    n_actions = w2.shape[0]
    h = np.empty(n_hidden, np.float64)
    for t in range(n_items):
        for i in range(n_hidden):
            acc = b1[i]
            for j in range(n_in):
                acc += w1[i, j] * xb[t, j]
            h[i] = math.tanh(acc)
        acc = bv0
        for i in range(n_hidden):
            acc += wv[i] * h[i]
        values[t] = math.tanh(acc) * scale
        mx = -math.inf
        for a in range(n_actions):
            acc = b2[a]
            for i in range(n_hidden):
                acc += w2[a, i] * h[i]
            policies[t, a] = acc
            if acc > mx:
                mx = acc
        for a in range(n_actions):
            policies[t, a] = math.exp(policies[t, a] - mx)


def _ucb_argmax_py(q, counts, prior, c):
    """Index of the maximal upper-confidence score, first index on ties."""
    n = q.shape[0]
    total = 0.0
    for i in range(n):
        total += counts[i]
    s = math.sqrt(total)
    best = q[0] + c * prior[0] * s / (1.0 + counts[0])
    best_i = 0
    for i in range(1, n):
        v = q[i] + c * prior[i] * s / (1.0 + counts[i])
        if v > best:
            best = v
            best_i = i
    return best_i


newton_common_ucb = _maybe_jit(_newton_common_ucb_py)
assign_counts = _maybe_jit(_assign_counts_py)
ucb_argmax = _maybe_jit(_ucb_argmax_py)
net_forward = _maybe_jit(_net_forward_py)


def warmup():
    """Trigger JIT compilation of all kernels (no-op without numba)."""
    q = np.array([0.0, 1.0])
    p = np.array([0.5, 0.5])
    newton_common_ucb(q, p, 0.1, 1e-10)
    out = np.zeros(2, dtype=np.int64)
    assign_counts(p, 10, 0.25, out)
    ucb_argmax(q, out, p, 1.0)
    net_forward(
        np.zeros((1, 2)), np.zeros((2, 2)), np.zeros(2), np.zeros((2, 2)),
        np.zeros(2), np.zeros(2), 0.0, 1.0, np.zeros(1), np.zeros((1, 2)),
    )
