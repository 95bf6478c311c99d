"""Edit-distance and word-alignment kernels.

Each kernel has a numba-compiled version and a pure numpy/Python version.
The numba path is used unless numba is missing or ``LLMG2P_DISABLE_NUMBA``
is set to a true value; ``BACKEND`` names the active path. Both paths are
importable directly (``*_numba`` / ``*_numpy``) for testing and benchmarks.

Sequences are int32 code arrays. Word lists are passed flattened with an
offsets array of length ``n_words + 1``.
"""

from __future__ import annotations

import os

import numpy as np

EPS = 1e-9

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False

_DISABLED = os.environ.get("LLMG2P_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


def _edit_distance_loops(a, b):
    n = a.shape[0]
    m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    prev = np.arange(m + 1)
    cur = np.empty(m + 1, dtype=prev.dtype)
    for i in range(1, n + 1):
        cur[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            best = prev[j - 1] + (0 if ai == b[j - 1] else 1)
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if cur[j - 1] + 1 < best:
                best = cur[j - 1] + 1
            cur[j] = best
        prev, cur = cur, prev
    return prev[m]


def edit_distance_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """Levenshtein distance with unit costs, one vectorized row at a time."""
    n, m = len(a), len(b)
    if n == 0:
        return m
    if m == 0:
        return n
    ramp = np.arange(m + 1)
    prev = ramp.copy()
    tmp = np.empty(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        tmp[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i - 1]), out=tmp[1:])
        # insertions: cur[j] = min_k<=j tmp[k] + (j - k)
        prev = np.minimum.accumulate(tmp - ramp) + ramp
    return int(prev[m])


def _distance_matrix_loops(a_flat, a_off, b_flat, b_off, edit):
    n = a_off.shape[0] - 1
    m = b_off.shape[0] - 1
    out = np.zeros((n, m))
    for i in range(n):
        wa = a_flat[a_off[i] : a_off[i + 1]]
        for j in range(m):
            wb = b_flat[b_off[j] : b_off[j + 1]]
            longest = max(wa.shape[0], wb.shape[0])
            if longest > 0:
                out[i, j] = edit(wa, wb) / longest
    return out


def _align_dp_loops(cost, gap):
    n, m = cost.shape
    total = np.zeros((n + 1, m + 1))
    pairs = np.zeros((n + 1, m + 1), dtype=np.int64)
    for i in range(1, n + 1):
        total[i, 0] = i * gap
    for j in range(1, m + 1):
        total[0, j] = j * gap
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            best = total[i - 1, j - 1] + cost[i - 1, j - 1]
            best_pairs = pairs[i - 1, j - 1] + 1
            for c, p in ((total[i - 1, j] + gap, pairs[i - 1, j]), (total[i, j - 1] + gap, pairs[i, j - 1])):
                if c < best - EPS or (c <= best + EPS and p > best_pairs):
                    best = c
                    best_pairs = p
            total[i, j] = best
            pairs[i, j] = best_pairs

    # traceback: pairing first, then ref word unmatched, then pred word unmatched
    ref_idx = np.empty(n + m, dtype=np.int64)
    pred_idx = np.empty(n + m, dtype=np.int64)
    k = 0
    i, j = n, m
    while i > 0 or j > 0:
        here = total[i, j]
        here_pairs = pairs[i, j]
        if (
            i > 0
            and j > 0
            and abs(total[i - 1, j - 1] + cost[i - 1, j - 1] - here) <= EPS
            and pairs[i - 1, j - 1] + 1 == here_pairs
        ):
            i -= 1
            j -= 1
            ref_idx[k] = i
            pred_idx[k] = j
        elif i > 0 and abs(total[i - 1, j] + gap - here) <= EPS and pairs[i - 1, j] == here_pairs:
            i -= 1
            ref_idx[k] = i
            pred_idx[k] = -1
        else:
            j -= 1
            ref_idx[k] = -1
            pred_idx[k] = j
        k += 1
    return total[n, m], ref_idx[:k][::-1].copy(), pred_idx[:k][::-1].copy()


def distance_matrix_numpy(a_flat, a_off, b_flat, b_off) -> np.ndarray:
    """Normalized edit distance between every word of ``a`` and every word of ``b``."""
    return _distance_matrix_loops(a_flat, a_off, b_flat, b_off, edit_distance_numpy)


def align_dp_numpy(cost: np.ndarray, gap: float):
    return _align_dp_loops(cost, gap)


if HAS_NUMBA:
    edit_distance_numba = njit(cache=True, nogil=True)(_edit_distance_loops)
    _align_dp_nb = njit(cache=True, nogil=True)(_align_dp_loops)

    @njit(cache=True, nogil=True)
    def distance_matrix_numba(a_flat, a_off, b_flat, b_off):
        n = a_off.shape[0] - 1
        m = b_off.shape[0] - 1
        out = np.zeros((n, m))
        for i in range(n):
            wa = a_flat[a_off[i] : a_off[i + 1]]
            for j in range(m):
                wb = b_flat[b_off[j] : b_off[j + 1]]
                longest = max(wa.shape[0], wb.shape[0])
                if longest > 0:
                    out[i, j] = edit_distance_numba(wa, wb) / longest
        return out

    def align_dp_numba(cost: np.ndarray, gap: float):
        return _align_dp_nb(np.ascontiguousarray(cost, dtype=np.float64), float(gap))


if HAS_NUMBA and not _DISABLED:
    BACKEND = "numba"
    _edit = edit_distance_numba
    _matrix = distance_matrix_numba
    _align = align_dp_numba
else:
    BACKEND = "numpy"
    _edit = edit_distance_numpy
    _matrix = distance_matrix_numpy
    _align = align_dp_numpy


def edit_distance(a: np.ndarray, b: np.ndarray) -> int:
    return int(_edit(a, b))


def distance_matrix(a_flat, a_off, b_flat, b_off) -> np.ndarray:
    return _matrix(a_flat, a_off, b_flat, b_off)


def align_dp(cost: np.ndarray, gap: float = 1.0):
    """Minimum-cost monotone alignment over a pairing-cost matrix.

    Returns ``(total_cost, ref_idx, pred_idx)``; -1 marks a gap. Among
    equal-cost alignments the one with the most pairs wins; remaining ties
    prefer pairing while tracing back from the end, which puts gaps as far
    left as possible.
    """
    return _align(cost, gap)
