"""Exhaustive reference implementations for short series (length <= ~14).

These share no code with the fast kernels and exist to check them.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np


@lru_cache(maxsize=32)
def _subsets(n):
    # every nonempty subset as a mask row, plus each member's predecessor in it
    m = np.arange(1, 2 ** n, dtype=np.int64)
    sel = ((m[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
    last = np.where(sel, np.arange(n)[None, :], -1)
    run = np.maximum.accumulate(last, axis=1)
    prev = np.concatenate([np.full((sel.shape[0], 1), -1), run[:, :-1]], axis=1)
    return sel, prev


def vq_exhaustive(values, q: float, powered_first: bool = True) -> float:
    """max over nonempty index subsets of (lead + sum |increments|^q)^(1/q)."""
    a = np.asarray(values, dtype=float)
    sel, prev = _subsets(a.size)
    head = sel & (prev < 0)
    body = sel & (prev >= 0)
    lead = np.abs(a) ** q if powered_first else np.abs(a)
    inc = np.abs(a[None, :] - a[np.maximum(prev, 0)]) ** q
    tot = np.where(head, lead[None, :], 0.0).sum(axis=1) + np.where(body, inc, 0.0).sum(axis=1)
    return float(tot.max() ** (1.0 / q))


def increment_variation_exhaustive(values, q: float = 2.0) -> float:
    """max over subsets of (sum |increments|^q)^(1/q); single points give 0."""
    a = np.asarray(values, dtype=float)
    best = 0.0
    for r in range(2, a.size + 1):
        for idx in combinations(range(a.size), r):
            best = max(best, float(np.sum(np.abs(np.diff(a[list(idx)])) ** q)))
    return best ** (1.0 / q)


def jump_exhaustive(values, lam: float) -> int:
    """Largest system s1 < t1 <= s2 < t2 <= ... with |a_tk - a_sk| > lam."""
    a = tuple(float(x) for x in values)
    n = len(a)

    @lru_cache(maxsize=None)
    def best(start):
        top = 0
        for s in range(start, n):
            for t in range(s + 1, n):
                if abs(a[t] - a[s]) > lam:
                    top = max(top, 1 + best(t))
        return top

    return best(0)
