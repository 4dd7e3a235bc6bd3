"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import timeit

import numpy as np

from varjump._backend import compiled, fallback


def cases(rng):
    a = np.ascontiguousarray(np.cumsum(rng.standard_normal((2000, 48)), axis=1))
    lam = rng.uniform(0.2, 2.0, a.shape[0])
    img = np.ascontiguousarray(rng.standard_normal((256, 256)))
    c, s = math.cos(0.7), math.sin(0.7)
    return [
        ("vq_rows q=2, 2000x48", lambda m: m.vq_rows(a, 2.0)),
        ("vq_rows q=3, 2000x48", lambda m: m.vq_rows(a, 3.0)),
        ("vq_rows q=2.5, 2000x48", lambda m: m.vq_rows(a, 2.5)),
        ("jump_rows, 2000x48", lambda m: m.jump_rows(a, 0.5)),
        ("jump_rows_each, 2000x48", lambda m: m.jump_rows_each(a, lam)),
        ("block_rows 0..16, 2000x48", lambda m: m.block_rows(a, 0, 16)),
        ("rotate_bilinear 256^2", lambda m: m.rotate_bilinear(img, c, s)),
    ]


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    core = compiled()
    if core is None:
        print("compiled extension not built; nothing to compare")
        return 1
    rng = np.random.default_rng(0)
    print(f"backends: python (numpy fallback) vs cython")
    print(f"{'kernel':28s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}  max diff")
    for name, fn in cases(rng):
        diff = float(np.max(np.abs(np.asarray(fn(fallback), float) - np.asarray(fn(core), float))))
        t_py = min(timeit.repeat(lambda: fn(fallback), number=1, repeat=args.repeat)) * 1e3
        t_cy = min(timeit.repeat(lambda: fn(core), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:28s} {t_py:10.2f} {t_cy:10.2f} {t_py / t_cy:8.1f}  {diff:.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
