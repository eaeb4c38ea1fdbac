"""Compare the compiled and pure-Python rank kernels over F_p.

Usage: python3 benchmarks/bench_rank.py [--sizes 20 60 120] [--repeat 5] [--prime P]

Two workloads are timed: random square matrices, and the interpolation
matrices behind the built-in constructions (the matrices the pipeline
actually factors).
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit

from bitriple import _rank_py, kernels
from bitriple.constructions import BUILTIN_NAMES, builtin
from bitriple.linsys import DEFAULT_PRIME, interpolation_matrix, sample_configuration
from bitriple.picard import canonical_class


def random_matrix(n: int, p: int, seed: int) -> list[list[int]]:
    rng = random.Random(seed)
    return [[rng.randrange(p) for _ in range(n)] for _ in range(n)]


def pipeline_matrices(p: int) -> list[tuple[list[list[int]], int]]:
    out = []
    for name in BUILTIN_NAMES:
        bd = builtin(name).building_data()
        cfg = sample_configuration(bd.surface, p)
        K = canonical_class(bd.surface)
        for L in bd.L.values():
            for c in (K + L, L, -K):
                if c.d >= 0:
                    out.append(interpolation_matrix(c, cfg))
    return out


def best_time(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[20, 60, 120])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    args = parser.parse_args(argv)
    compiled = kernels._compiled
    if compiled is None:
        print("compiled kernel not built; only the Python fallback is available", file=sys.stderr)
        return 1
    p = args.prime
    print(f"{'workload':<28}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for n in args.sizes:
        m = random_matrix(n, p, n)
        assert compiled.rank_mod_p(m, n, p) == _rank_py.rank_mod_p(m, n, p)
        tp = best_time(lambda: _rank_py.rank_mod_p(m, n, p), args.repeat)
        tc = best_time(lambda: compiled.rank_mod_p(m, n, p), args.repeat)
        print(f"{f'random {n}x{n}':<28}{tp:>12.5f}{tc:>12.5f}{tp / tc:>9.1f}x")
    mats = pipeline_matrices(p)
    for rows, ncols in mats:
        assert compiled.rank_mod_p(rows, ncols, p) == _rank_py.rank_mod_p(rows, ncols, p)
    tp = best_time(lambda: [_rank_py.rank_mod_p(r, c, p) for r, c in mats], args.repeat)
    tc = best_time(lambda: [compiled.rank_mod_p(r, c, p) for r, c in mats], args.repeat)
    print(f"{f'pipeline ({len(mats)} matrices)':<28}{tp:>12.5f}{tc:>12.5f}{tp / tc:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
