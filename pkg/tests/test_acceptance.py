"""Acceptance criteria 1-12, each run as its experiment with default settings.

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary (see conftest.py).  Run directly with `python3 tests/test_acceptance.py`.
"""

import functools
from dataclasses import replace

import pytest

from varjump.config import defaults_for
from varjump.experiments import CRITERIA, run_experiment

LINES = []

# seconds; criteria without a stated runtime have no entry
LIMITS = {1: 10, 2: 10, 3: 30, 5: 60, 6: 120, 8: 120, 10: 30, 11: 600}


def _config(c):
    cfg = defaults_for(CRITERIA[c])
    if c == 1:
        cfg = replace(cfg, params={**cfg.params, "operators": 0})
    elif c == 11:
        cfg = replace(cfg, params={**cfg.params, "oracle": 0})
    elif c == 3:
        cfg = replace(cfg, seed=7)
    return cfg


@functools.lru_cache(maxsize=None)
def _run(c):
    return run_experiment(_config(c))


def check(c):
    rep = _run(c)
    vs = rep.verdicts_for(c)
    secs = rep.timings["total_seconds"]
    limit = LIMITS.get(c)
    fails = [v for v in vs if not v.passed]
    slow = limit is not None and secs >= limit
    ok = bool(vs) and not fails and not slow
    parts = "; ".join(f"{v.name} {v.measured:.4g} vs {v.bound:.4g}" for v in (fails or vs)[:3])
    timing = f"{secs:.1f}s" + (f" (limit {limit}s)" if limit else "")
    line = f"{'PASS' if ok else 'FAIL'} criterion {c}: {CRITERIA[c]}, {len(vs)} checks, {timing}; {parts}"
    LINES.append(line)
    print(line)
    return ok, vs, fails, slow


@pytest.mark.parametrize("c", range(1, 13))
def test_criterion(c):
    ok, vs, fails, slow = check(c)
    assert vs, f"criterion {c} produced no verdicts"
    assert not fails, [f"{v.name}: {v.measured} vs {v.bound}" for v in fails]
    assert not slow, f"criterion {c} exceeded its runtime limit"


if __name__ == "__main__":
    import sys
    results = [check(c)[0] for c in range(1, 13)]
    sys.exit(0 if all(results) else 1)
