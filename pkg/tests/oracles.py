"""Independent reference implementations used only by the tests."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


def levenshtein(a, b) -> int:
    """Textbook recursion over the last symbols of each sequence, memoized."""
    a, b = tuple(a), tuple(b)

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return d(len(a), len(b))


def flat(words) -> list[str]:
    out = []
    for i, w in enumerate(words):
        if i:
            out.append("_")
        out.extend(w)
    return out


def per(pred_words, ref_words) -> Fraction:
    r = flat(ref_words)
    return Fraction(levenshtein(flat(pred_words), r), len(r))


def word_cost(a: str, b: str) -> Fraction:
    n = max(len(a), len(b))
    return Fraction(levenshtein(a, b), n) if n else Fraction(0)


def all_alignments(n: int, m: int):
    """Every monotone alignment of n reference and m predicted words."""
    if n == 0 and m == 0:
        yield ()
        return
    if n > 0 and m > 0:
        for rest in all_alignments(n - 1, m - 1):
            yield rest + ((n - 1, m - 1),)
    if n > 0:
        for rest in all_alignments(n - 1, m):
            yield rest + ((n - 1, None),)
    if m > 0:
        for rest in all_alignments(n, m - 1):
            yield rest + ((None, m - 1),)


def alignment_cost(pairs, ref_words, pred_words) -> Fraction:
    total = Fraction(0)
    for r, p in pairs:
        if r is None or p is None:
            total += 1
        else:
            total += word_cost(ref_words[r], pred_words[p])
    return total


def best_alignment_cost(ref_words, pred_words) -> tuple[Fraction, int]:
    """(minimum cost, most pairs among minimum-cost alignments)."""
    best = None
    for pairs in all_alignments(len(ref_words), len(pred_words)):
        c = alignment_cost(pairs, ref_words, pred_words)
        n_pairs = sum(1 for r, p in pairs if r is not None and p is not None)
        key = (c, -n_pairs)
        if best is None or key < best:
            best = key
    return best[0], -best[1]
