"""Prompting strategies, LLM round-trips and dictionary-based correction."""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .backends import DecodeParams, LlmBackend
from .finglish import FinglishRules, default_rules, finglish_to_phonemes, phonemes_to_finglish
from .lexicon import DictStore, grapheme_key, grapheme_skeleton, split_graphemes
from .metrics import align_graphemes, word_distance
from .phonemes import NormalizationTable, PhonemeString, normalize_raw

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


class EmptyResponse(ValueError):
    pass


class AlignmentMismatch(ValueError):
    pass


class StrategyKind(str, Enum):
    NAIVE = "naive"
    IN_CONTEXT = "icl"
    FINGLISH = "finglish"
    RULE_CORRECTED = "rule"
    LLM_CORRECTED = "llm-correct"
    HINTS1 = "hints1"
    HINTS2 = "hints2"
    HINTS3 = "hints3"
    COMBINED = "combined"

    @property
    def outputs_ipa(self) -> bool:
        return self in (StrategyKind.NAIVE, StrategyKind.IN_CONTEXT)

    @property
    def round_trips(self) -> int:
        return 2 if self in (StrategyKind.LLM_CORRECTED, StrategyKind.COMBINED) else 1


DEFAULT_STRATEGY = StrategyKind.HINTS2

# first-round template per strategy
_TEMPLATE_FILE = {
    StrategyKind.NAIVE: "naive",
    StrategyKind.IN_CONTEXT: "icl",
    StrategyKind.FINGLISH: "finglish",
    StrategyKind.RULE_CORRECTED: "finglish",
    StrategyKind.LLM_CORRECTED: "finglish",
    StrategyKind.HINTS1: "hints1",
    StrategyKind.HINTS2: "hints2",
    StrategyKind.HINTS3: "hints3",
    StrategyKind.COMBINED: "hints3",
}

# which dictionary words the first prompt carries
_HINT_MODE = {
    StrategyKind.HINTS1: "all",
    StrategyKind.HINTS2: "single",
    StrategyKind.HINTS3: "inline",
    StrategyKind.COMBINED: "inline",
}


def _read_data(name: str, prompt_dir: Path | None) -> str:
    if prompt_dir is not None:
        return (Path(prompt_dir) / name).read_text(encoding="utf-8")
    return resources.files("llmg2p").joinpath(f"data/prompts/{name}").read_text(encoding="utf-8")


def default_shots() -> list[tuple[str, str, str]]:
    text = resources.files("llmg2p").joinpath("data/shots.tsv").read_text(encoding="utf-8")
    rows = [line.split("\t") for line in text.splitlines()[1:] if line.strip()]
    return [(g, f, i) for g, f, i in rows]


@dataclass(frozen=True)
class PromptStrategy:
    """A prompting recipe: template text, few-shot exemplars and, for two-round
    strategies, the correction template."""

    kind: StrategyKind
    template: str
    shots: tuple[tuple[str, str], ...] = ()
    correction_template: str | None = None
    rules_text: str = ""

    def __post_init__(self):
        if self.kind is StrategyKind.NAIVE and self.shots:
            raise ValueError("the naive strategy carries no exemplars")
        if self.kind is not StrategyKind.NAIVE and not self.shots:
            raise ValueError(f"strategy {self.kind.value} needs at least one exemplar")
        if self.kind.round_trips == 2 and not self.correction_template:
            raise ValueError(f"strategy {self.kind.value} needs a correction template")

    @classmethod
    def load(cls, kind: StrategyKind | str, prompt_dir: str | Path | None = None) -> PromptStrategy:
        kind = StrategyKind(kind)
        prompt_dir = Path(prompt_dir) if prompt_dir else None
        template = _read_data(_TEMPLATE_FILE[kind] + ".txt", prompt_dir)
        shots: tuple[tuple[str, str], ...] = ()
        if kind is not StrategyKind.NAIVE:
            col = 2 if kind.outputs_ipa else 1
            shots = tuple((row[0], row[col]) for row in default_shots())
        correction = _read_data("correction.txt", prompt_dir) if kind.round_trips == 2 else None
        rules = "" if kind.outputs_ipa else _read_data("finglish_rules.txt", prompt_dir).strip()
        return cls(kind, template, shots, correction, rules)


@dataclass(frozen=True)
class ConversionResult:
    phonemes: PhonemeString
    raw_responses: tuple[str, ...]
    strategy: StrategyKind
    corrections_applied: int = 0
    dropped_chars: int = 0
    graphemes: tuple[str, ...] = field(default=(), compare=False)


def _unique(words: Iterable[str]) -> list[str]:
    seen = set()
    out = []
    for w in words:
        key = grapheme_key(w)
        if key not in seen:
            seen.add(key)
            out.append(w)
    return out


def hint_pairs(kind: StrategyKind | str, sentence: str, store: DictStore) -> list[tuple[str, PhonemeString]]:
    """The (grapheme, pronunciation) pairs a strategy's first prompt exposes."""
    mode = _HINT_MODE.get(StrategyKind(kind))
    if mode is None:
        return []
    pairs = []
    for w in _unique(store.match(w)[0] for w in split_graphemes(sentence)):
        prons = store.lookup(w)
        if mode == "all" or len(prons) == 1:
            pairs.extend((w, p) for p in prons)
    return pairs


def _format_hints(pairs: Sequence[tuple[str, PhonemeString]], rules: FinglishRules) -> str:
    grouped: dict[str, list[str]] = {}
    for w, p in pairs:
        grouped.setdefault(w, []).append(phonemes_to_finglish(p, rules))
    if not grouped:
        return "(none)"
    return "\n".join(f"{w}: {' / '.join(alts)}" for w, alts in grouped.items())


def _format_shots(strategy: PromptStrategy) -> str:
    label = "IPA" if strategy.kind.outputs_ipa else "Finglish"
    return "\n\n".join(f"Sentence: {g}\n{label}: {out}" for g, out in strategy.shots)


def build_prompt(
    strategy: PromptStrategy, sentence: str, store: DictStore, rules: FinglishRules | None = None
) -> str:
    rules = rules or default_rules()
    kind = strategy.kind
    shown = sentence.strip()
    hints = ""
    if _HINT_MODE.get(kind) == "inline":
        known = {grapheme_key(w): p for w, p in hint_pairs(kind, sentence, store)}
        parts = []
        for token in shown.split():
            words = split_graphemes(token)
            p = known.get(grapheme_key(words[0])) if len(words) == 1 else None
            parts.append(phonemes_to_finglish(p, rules) if p is not None else token)
        shown = " ".join(parts)
    elif kind in _HINT_MODE:
        hints = _format_hints(hint_pairs(kind, sentence, store), rules)
    return strategy.template.format(
        sentence=shown, hints=hints, shots=_format_shots(strategy), rules=strategy.rules_text, draft=""
    )


def build_correction_prompt(
    strategy: PromptStrategy,
    sentence: str,
    draft: str,
    store: DictStore,
    rules: FinglishRules | None = None,
) -> str:
    """Second-round prompt listing every dictionary alternative for every word."""
    rules = rules or default_rules()
    if strategy.correction_template is None:
        raise ValueError(f"strategy {strategy.kind.value} has a single round")
    hints = _format_hints(hint_pairs(StrategyKind.HINTS1, sentence, store), rules)
    return strategy.correction_template.format(
        sentence=sentence.strip(), draft=draft, hints=hints, shots="", rules=strategy.rules_text
    )


_LABEL = re.compile(r"^\s*(?:corrected\s+)?(?:finglish|ipa|output|answer|transcription)\s*:\s*", re.I)
_FENCE = re.compile(r"```[a-zA-Z]*")
_QUOTES = "\"“”«»`*"


def extract_answer(response: str) -> str:
    """Pull the transcription line out of a chatty model reply."""
    text = _FENCE.sub("", response)
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        return ""
    labelled = [ln for ln in lines if _LABEL.match(ln) and _LABEL.sub("", ln).strip()]
    line = _LABEL.sub("", labelled[-1]) if labelled else lines[-1]
    return line.strip().strip(_QUOTES).strip()


def _parse_response(
    response: str, kind: StrategyKind, rules: FinglishRules, table: NormalizationTable | None
) -> tuple[PhonemeString, int]:
    answer = extract_answer(response)
    if kind.outputs_ipa:
        ps = normalize_raw(answer, table)
        dropped = ps.dropped
    else:
        clean, dropped = rules.sanitize(answer)
        ps = finglish_to_phonemes(clean, rules)
    if not ps.words:
        raise EmptyResponse(f"no phonemes in backend response {response[:80]!r}")
    return ps, dropped


def reconcile(
    pred: PhonemeString, graphemes: Sequence[str], store: DictStore | None
) -> tuple[PhonemeString, list[str]]:
    """Make the predicted word count equal the grapheme word count.

    Words the alignment leaves unpaired are glued onto the preceding paired
    word (or the following one at sentence start). Grapheme words with no
    predicted word get their dictionary pronunciation, else a letter
    skeleton; words with neither are dropped from the returned grapheme list.
    """
    if len(pred.words) == len(graphemes):
        return pred, list(graphemes)
    owners = align_graphemes(graphemes, pred, store)
    slots: list[str] = [""] * len(graphemes)
    pending = ""
    last = None
    for word, g in zip(pred.words, owners):
        if g is None:
            if last is None:
                pending += word
            else:
                slots[last] += word
            continue
        slots[g] = pending + word
        pending = ""
        last = g
    words, kept = [], []
    for g, slot in zip(graphemes, slots):
        if not slot:
            prons = store.lookup(g) if store is not None else ()
            slot = prons[0].words[0] if prons else grapheme_skeleton(g)
        if slot:
            words.append(slot)
            kept.append(g)
    if pending and words:
        words[-1] += pending
    return PhonemeString(tuple(words)), kept


def rule_correct(
    predicted: PhonemeString,
    graphemes: Sequence[str],
    store: DictStore,
    threshold: float = DEFAULT_THRESHOLD,
) -> PhonemeString:
    """Snap each predicted word to its most similar dictionary pronunciation.

    similarity = 1 - edit distance / longer length; a candidate replaces the
    word when its similarity reaches ``threshold``. Ties go to the first
    candidate in sorted order.
    """
    if len(predicted.words) != len(graphemes):
        raise AlignmentMismatch(
            f"{len(predicted.words)} predicted words for {len(graphemes)} grapheme words"
        )
    out = []
    for word, g in zip(predicted.words, graphemes):
        best, best_sim = None, -1.0
        for cand in store.lookup(g):
            sim = 1.0 - word_distance(word, cand.words[0])
            if sim > best_sim:
                best, best_sim = cand.words[0], sim
        out.append(best if best is not None and best_sim >= threshold else word)
    return PhonemeString(tuple(out))


def _changed(a: PhonemeString, b: PhonemeString) -> int:
    if len(a.words) != len(b.words):
        return abs(len(a.words) - len(b.words)) + sum(x != y for x, y in zip(a.words, b.words))
    return sum(x != y for x, y in zip(a.words, b.words))


def convert(
    sentence: str,
    strategy: PromptStrategy,
    backend: LlmBackend,
    store: DictStore,
    *,
    threshold: float = DEFAULT_THRESHOLD,
    params: DecodeParams | None = None,
    rules: FinglishRules | None = None,
    table: NormalizationTable | None = None,
) -> ConversionResult:
    rules = rules or default_rules()
    params = params or DecodeParams()
    kind = strategy.kind
    graphemes = split_graphemes(sentence)
    if not graphemes:
        return ConversionResult(PhonemeString(), (), kind)

    prompt = build_prompt(strategy, sentence, store, rules)
    first = backend.complete(prompt, params)
    responses = [first]
    ps, dropped = _parse_response(first, kind, rules, table)
    ps, kept = reconcile(ps, graphemes, store)
    corrections = 0

    if kind is StrategyKind.RULE_CORRECTED:
        fixed = rule_correct(ps, kept, store, threshold)
        corrections = _changed(ps, fixed)
        ps = fixed
    elif kind.round_trips == 2:
        draft = phonemes_to_finglish(ps, rules)
        second = backend.complete(build_correction_prompt(strategy, sentence, draft, store, rules), params)
        responses.append(second)
        fixed, more = _parse_response(second, kind, rules, table)
        fixed, kept = reconcile(fixed, graphemes, store)
        corrections = _changed(ps, fixed)
        dropped += more
        ps = fixed

    return ConversionResult(ps, tuple(responses), kind, corrections, dropped, tuple(kept))


def convert_many(
    sentences: Sequence[str],
    strategy: PromptStrategy,
    backend: LlmBackend,
    store: DictStore,
    parallelism: int = 4,
    return_exceptions: bool = False,
    **kwargs,
) -> list:
    """Convert sentences with at most ``parallelism`` in flight; results keep input order."""
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")

    def one(s: str):
        try:
            return convert(s, strategy, backend, store, **kwargs)
        except Exception as exc:
            if not return_exceptions:
                raise
            logger.warning("conversion failed for %r: %s", s, exc)
            return exc

    if parallelism == 1 or len(sentences) <= 1:
        return [one(s) for s in sentences]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, sentences))
