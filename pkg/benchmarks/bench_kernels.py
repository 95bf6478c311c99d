"""Time the numba kernels against the pure-numpy fallback.

    python3 benchmarks/bench_kernels.py --pairs 5000 --sentences 500
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from llmg2p import kernels


def _words(rng, n_words, max_len=8):
    lens = rng.integers(1, max_len + 1, size=n_words)
    offsets = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
    return rng.integers(1, 30, size=int(offsets[-1])).astype(np.int64), offsets


def _time(fn, *args, repeat=3):
    fn(*args)  # warm-up (numba compiles here)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def run_pairs(edit, pairs):
    for a, b in pairs:
        edit(a, b)


def run_sentences(matrix, align, sentences):
    for (a, ao), (b, bo) in sentences:
        align(matrix(a, ao, b, bo), 1.0)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--pairs", type=int, default=5000, help="flattened sentence pairs for edit distance")
    parser.add_argument("--sentences", type=int, default=500, help="sentence pairs for word alignment")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    pairs = [
        (rng.integers(0, 30, size=rng.integers(10, 80)), rng.integers(0, 30, size=rng.integers(10, 80)))
        for _ in range(args.pairs)
    ]
    sentences = [
        (_words(rng, int(rng.integers(3, 20))), _words(rng, int(rng.integers(3, 20))))
        for _ in range(args.sentences)
    ]

    rows = [("numpy", kernels.edit_distance_numpy, kernels.distance_matrix_numpy, kernels.align_dp_numpy)]
    if kernels.HAS_NUMBA:
        rows.insert(0, ("numba", kernels.edit_distance_numba, kernels.distance_matrix_numba, kernels.align_dp_numba))
    else:
        print("numba is not installed; timing the numpy path only")

    print(f"{'backend':<8} {'edit distance':>15} {'word alignment':>16}")
    for name, edit, matrix, align in rows:
        t_edit = _time(run_pairs, edit, pairs)
        t_align = _time(run_sentences, matrix, align, sentences)
        print(f"{name:<8} {t_edit:>14.3f}s {t_align:>15.3f}s")


if __name__ == "__main__":
    main()
