#!/usr/bin/env python3
"""Compare the compiled Louvain kernel against the pure-Python fallback.

Runs the same seeded detection on planted-partition graphs of growing size
with both backends, checks the partitions are bit-identical, and prints the
wall-clock ratio. Usage: python benchmarks/compare_backends.py [--sizes ...]
"""

import argparse
import importlib
import time

import numpy as np

from commaug.community import BACKEND, louvain
from commaug.synth import SbmSpec, generate

core_py = importlib.import_module("commaug.community._core_py")
louvain_mod = importlib.import_module("commaug.community.louvain")


def run_once(g, gamma, seed, kernel):
    original = louvain_mod.local_move
    louvain_mod.local_move = kernel
    try:
        t0 = time.perf_counter()
        result = louvain(g, gamma, seed)
        return result, time.perf_counter() - t0
    finally:
        louvain_mod.local_move = original


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[1_000, 5_000, 20_000, 50_000])
    parser.add_argument("--gamma", type=float, default=1.0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if BACKEND != "cython":
        print("compiled kernel unavailable; build it with `pip install -e .`")
        return

    compiled = importlib.import_module("commaug.community._core").local_move
    print(f"{'n':>8} {'m':>9} {'compiled_s':>11} {'python_s':>10} {'speedup':>8}  identical")
    for n in args.sizes:
        g, _ = generate(SbmSpec(n=n, blocks=8, p_in=min(1.0, 1600 / n),
                                p_out=min(1.0, 160 / n), seed=args.seed))
        res_c, t_c = run_once(g, args.gamma, args.seed, compiled)
        res_p, t_p = run_once(g, args.gamma, args.seed, core_py.local_move)
        same = (res_c.partition.assign.tobytes() == res_p.partition.assign.tobytes()
                and res_c.Q == res_p.Q)
        print(f"{n:>8} {g.m:>9} {t_c:>11.4f} {t_p:>10.4f} {t_p / t_c:>8.1f}  {same}")
        if not same:
            raise SystemExit("backend mismatch! kernels have diverged")


if __name__ == "__main__":
    main()
