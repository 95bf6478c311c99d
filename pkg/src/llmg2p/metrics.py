"""PER, word alignment, polyphone accuracy and Ezafe detection/scoring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .lexicon import DictStore, grapheme_key, grapheme_skeleton
from .phonemes import BOUNDARY, INVENTORY, VOWELS, PhonemeString

GAP = None

_CODES = {sym: i + 1 for i, sym in enumerate(INVENTORY)}
_CODES[BOUNDARY] = 0


class EmptyReference(ValueError):
    pass


class TargetNotFound(ValueError):
    pass


def encode(symbols: Iterable[str]) -> np.ndarray:
    return np.fromiter((_CODES[s] for s in symbols), dtype=np.int32)


def per_counts(pred: PhonemeString, ref: PhonemeString) -> tuple[int, int]:
    """(edit distance, reference length) over flattened symbols; boundaries count as tokens."""
    ref_flat = ref.flatten()
    dist = kernels.edit_distance(encode(pred.flatten()), encode(ref_flat))
    return dist, len(ref_flat)


def per(pred: PhonemeString, ref: PhonemeString) -> float:
    if not ref.words:
        raise EmptyReference("PER is undefined for an empty reference")
    dist, n = per_counts(pred, ref)
    return dist / n


def word_distance(a: str, b: str) -> float:
    """Edit distance between two words divided by the longer length."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return kernels.edit_distance(encode(a), encode(b)) / longest


@dataclass(frozen=True)
class WordAlignment:
    """Monotone pairing of reference and predicted word indices (None = gap)."""

    pairs: tuple[tuple[int | None, int | None], ...]
    cost: float = 0.0

    def __post_init__(self):
        for side in (0, 1):
            idx = [p[side] for p in self.pairs if p[side] is not None]
            if idx != list(range(len(idx))):
                raise ValueError(f"alignment side {side} is not a contiguous increasing run: {idx}")
        for r, p in self.pairs:
            if r is None and p is None:
                raise ValueError("alignment pair with gaps on both sides")

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def n_pairs(self) -> int:
        return sum(1 for r, p in self.pairs if r is not None and p is not None)

    def pred_for_ref(self, ref_index: int) -> int | None:
        for r, p in self.pairs:
            if r == ref_index:
                return p
        raise IndexError(ref_index)


def _flat_words(words: Sequence[str]) -> tuple[np.ndarray, np.ndarray]:
    offsets = np.zeros(len(words) + 1, dtype=np.int64)
    for i, w in enumerate(words):
        offsets[i + 1] = offsets[i] + len(w)
    return encode("".join(words)), offsets


def _align(cost: np.ndarray) -> WordAlignment:
    total, ref_idx, pred_idx = kernels.align_dp(cost, 1.0)
    pairs = tuple(
        (None if r < 0 else int(r), None if p < 0 else int(p)) for r, p in zip(ref_idx, pred_idx)
    )
    return WordAlignment(pairs, float(total))


def word_cost_matrix(ref_words: Sequence[str], pred_words: Sequence[str]) -> np.ndarray:
    if not ref_words or not pred_words:
        return np.zeros((len(ref_words), len(pred_words)))
    a, a_off = _flat_words(ref_words)
    b, b_off = _flat_words(pred_words)
    return kernels.distance_matrix(a, a_off, b, b_off)


def align_words(ref: PhonemeString, pred: PhonemeString) -> WordAlignment:
    """Minimal-cost monotone word alignment.

    Pairing two words costs their normalized edit distance, leaving a word
    unpaired costs 1. Ties prefer more pairs, then gaps further left.
    """
    return _align(word_cost_matrix(ref.words, pred.words))


def align_graphemes(
    graphemes: Sequence[str], ps: PhonemeString, store: DictStore | None = None
) -> list[int | None]:
    """For each phoneme word, the index of the grapheme word it spells (or None).

    Each grapheme is represented by its dictionary pronunciations plus a
    letter-by-letter skeleton; the closest representation sets the pairing cost.
    """
    if len(graphemes) == len(ps.words):
        return list(range(len(graphemes)))
    cand_words: list[str] = []
    owner: list[int] = []
    for gi, g in enumerate(graphemes):
        cands = [p.words[0] for p in store.lookup(g)] if store is not None else []
        cands.append(grapheme_skeleton(g))
        cand_words.extend(cands)
        owner.extend([gi] * len(cands))
    full = word_cost_matrix(cand_words, ps.words)
    cost = np.ones((len(graphemes), len(ps.words)))
    for row, gi in enumerate(owner):
        np.minimum(cost[gi], full[row], out=cost[gi])
    out: list[int | None] = [None] * len(ps.words)
    for g, p in _align(cost):
        if p is not None:
            out[p] = g
    return out


def graphemes_for_words(
    graphemes: Sequence[str], ps: PhonemeString, store: DictStore | None = None
) -> list[str | None]:
    return [None if gi is None else graphemes[gi] for gi in align_graphemes(graphemes, ps, store)]


def _ezafe_stems(word: str) -> list[str]:
    stems = []
    if len(word) >= 4 and word.endswith("je") and word[-3] in VOWELS:
        stems.append(word[:-2])
    if len(word) >= 2 and word.endswith("e"):
        stems.append(word[:-1])
    return stems


def ezafe_label(word: PhonemeString | str, grapheme: str | None, store: DictStore | None) -> bool:
    """Whether a word carries an Ezafe ending.

    The word must end in ``e`` (or ``je`` after a vowel). With dictionary
    candidates for the grapheme, the ending counts only if a stripped form
    is a known pronunciation or no known pronunciation ends in ``e``.
    Without candidates the suffix test alone decides.
    """
    if isinstance(word, PhonemeString):
        if len(word.words) != 1:
            raise ValueError("ezafe_label expects a single word")
        word = word.words[0]
    stems = _ezafe_stems(word)
    if not stems:
        return False
    cands = store.lookup(grapheme) if (store is not None and grapheme) else ()
    if not cands:
        return True
    forms = {p.words[0] for p in cands}
    return any(s in forms for s in stems) or not any(f.endswith("e") for f in forms)


@dataclass(frozen=True)
class EzafeStats:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __add__(self, other: EzafeStats) -> EzafeStats:
        return EzafeStats(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn, self.tn + other.tn)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def precision(self) -> float | None:
        d = self.tp + self.fp
        return self.tp / d if d else None

    @property
    def recall(self) -> float | None:
        d = self.tp + self.fn
        return self.tp / d if d else None

    @property
    def f1(self) -> float | None:
        p, r = self.precision, self.recall
        if p is None or r is None:
            return None
        if p + r == 0:
            return 0.0
        return 2 * p * r / (p + r)

    @property
    def accuracy(self) -> float | None:
        return (self.tp + self.tn) / self.total if self.total else None

    def as_dict(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "accuracy": self.accuracy,
        }


def sentence_ezafe_stats(
    ref: PhonemeString,
    pred: PhonemeString,
    graphemes: Sequence[str],
    store: DictStore | None,
    penalize_gaps: bool = True,
    alignment: WordAlignment | None = None,
) -> EzafeStats:
    alignment = alignment or align_words(ref, pred)
    ref_graphemes = graphemes_for_words(graphemes, ref, store)
    tp = fp = fn = tn = 0
    for r, p in alignment:
        g = ref_graphemes[r] if r is not None else None
        ref_pos = r is not None and ezafe_label(ref.words[r], g, store)
        pred_pos = p is not None and ezafe_label(pred.words[p], g, store)
        if r is not None and p is not None:
            if ref_pos and pred_pos:
                tp += 1
            elif pred_pos:
                fp += 1
            elif ref_pos:
                fn += 1
            else:
                tn += 1
        elif penalize_gaps and ref_pos:
            fn += 1
        elif penalize_gaps and pred_pos:
            fp += 1
        else:
            tn += 1
    return EzafeStats(tp, fp, fn, tn)


def ezafe_stats(
    items: Iterable[tuple[PhonemeString, PhonemeString, Sequence[str]]],
    store: DictStore | None,
    penalize_gaps: bool = True,
) -> EzafeStats:
    """Aggregate Ezafe confusion counts over (ref, pred, graphemes) sentences."""
    total = EzafeStats()
    for ref, pred, graphemes in items:
        total = total + sentence_ezafe_stats(ref, pred, graphemes, store, penalize_gaps)
    return total


def polyphone_correct(
    pred: PhonemeString,
    graphemes: Sequence[str],
    target_word: str,
    target_pron: PhonemeString,
    ref: PhonemeString,
    store: DictStore | None = None,
    alignment: WordAlignment | None = None,
) -> bool:
    keys = [grapheme_key(g) for g in graphemes]
    target = grapheme_key(target_word)
    if target not in keys:
        raise TargetNotFound(f"{target_word!r} does not occur in {' '.join(graphemes)!r}")
    gi = keys.index(target)
    owners = align_graphemes(graphemes, ref, store)
    if gi not in owners:
        return False
    ref_pos = owners.index(gi)
    alignment = alignment or align_words(ref, pred)
    p = alignment.pred_for_ref(ref_pos)
    if p is None:
        return False
    # an Ezafe ending on the predicted word does not change which reading it is
    word, target = pred.words[p], target_pron.words[0]
    return word == target or target in _ezafe_stems(word)
