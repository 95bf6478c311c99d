"""Finglish (Latin-script Persian) to canonical phonemes and back.

Parsing is longest-match over a rule table, digraph first: ``shab`` is
``S a b``. A hyphen or apostrophe splits a word into segments that are
parsed independently, so ``mas-hur`` keeps ``s`` and ``h`` apart.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .phonemes import PhonemeString, is_phoneme

SEPARATORS = frozenset("-'’")
RENDER_SEPARATOR = "-"


class UnknownCluster(ValueError):
    def __init__(self, position: int, char: str = ""):
        self.position = position
        self.char = char
        super().__init__(f"no Finglish rule for {char!r} at position {position}")


class RuleError(ValueError):
    pass


@dataclass(frozen=True)
class FinglishRule:
    pattern: str
    target: str
    priority: int

    def __post_init__(self):
        if not self.pattern:
            raise RuleError("empty pattern")
        for ch in self.target:
            if not is_phoneme(ch):
                raise RuleError(f"rule {self.pattern!r}: non-canonical target {self.target!r}")


class FinglishRules:
    """An immutable, length-sorted Finglish rule table."""

    def __init__(self, rules: Iterable[tuple[str, str]]):
        by_pattern: dict[str, FinglishRule] = {}
        ordered: list[FinglishRule] = []
        for pattern, target in rules:
            pattern = unicodedata.normalize("NFC", pattern)
            if pattern in by_pattern:
                raise RuleError(f"duplicate pattern {pattern!r}")
            rule = FinglishRule(pattern, target, len(pattern))
            by_pattern[pattern] = rule
            ordered.append(rule)
        self._by_pattern = by_pattern
        self.rules = tuple(sorted(ordered, key=lambda r: -r.priority))
        self.max_len = max((r.priority for r in ordered), default=1)

        for rule in ordered:
            for ch in rule.pattern:
                if ch in SEPARATORS or ch.isspace():
                    raise RuleError(f"pattern {rule.pattern!r} contains a separator")
                if len(rule.pattern) > 1 and not self.covers(ch):
                    raise RuleError(f"character {ch!r} of {rule.pattern!r} has no own rule")

        # rendering: first single-phoneme rule in file order, else the symbol itself
        self._render: dict[str, str] = {}
        for rule in ordered:
            if len(rule.target) == 1 and rule.pattern.islower() and rule.target not in self._render:
                self._render[rule.target] = rule.pattern
        for sym, pattern in list(self._render.items()):
            if self._parse_segment(pattern, 0) != sym:
                raise RuleError(f"rendering {pattern!r} of {sym!r} does not parse back")

    def covers(self, char: str) -> bool:
        return char in self._by_pattern or is_phoneme(char)

    def render_symbol(self, sym: str) -> str:
        return self._render.get(sym, sym)

    def _parse_segment(self, seg: str, offset: int) -> str:
        out = []
        i = 0
        while i < len(seg):
            for n in range(min(self.max_len, len(seg) - i), 0, -1):
                rule = self._by_pattern.get(seg[i : i + n])
                if rule is not None:
                    out.append(rule.target)
                    i += n
                    break
            else:
                ch = seg[i]
                if not is_phoneme(ch):
                    raise UnknownCluster(offset + i, ch)
                out.append(ch)
                i += 1
        return "".join(out)

    def parse_word(self, word: str, offset: int = 0) -> str:
        out = []
        start = 0
        for k, ch in enumerate(word + RENDER_SEPARATOR):
            if ch in SEPARATORS:
                out.append(self._parse_segment(word[start:k], offset + start))
                start = k + 1
        return "".join(out)

    def sanitize(self, text: str) -> tuple[str, int]:
        """Drop characters the rules cannot read; returns (clean text, dropped count)."""
        text = unicodedata.normalize("NFC", text)
        kept = []
        dropped = 0
        for ch in text:
            if ch.isspace() or ch in SEPARATORS or self.covers(ch):
                kept.append(ch)
            else:
                dropped += 1
                # punctuation between words still separates them
                kept.append(" ")
        return "".join(kept), dropped

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> FinglishRules:
        pairs = []
        for lineno, line in enumerate(lines, 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise RuleError(f"line {lineno}: expected pattern<TAB>target")
            pairs.append((parts[0], parts[1].strip()))
        return cls(pairs)

    @classmethod
    def from_tsv(cls, path: str | Path) -> FinglishRules:
        return cls.from_lines(Path(path).read_text(encoding="utf-8").splitlines())


@lru_cache(maxsize=1)
def default_rules() -> FinglishRules:
    text = resources.files("llmg2p").joinpath("data/finglish.tsv").read_text(encoding="utf-8")
    return FinglishRules.from_lines(text.splitlines())


def finglish_to_phonemes(text: str, rules: FinglishRules | None = None) -> PhonemeString:
    """Parse a Finglish sentence. Raises :class:`UnknownCluster` on unreadable input."""
    rules = rules or default_rules()
    text = unicodedata.normalize("NFC", text)
    words = []
    pos = 0
    for token in text.split():
        start = text.index(token, pos)
        pos = start + len(token)
        word = rules.parse_word(token, start)
        if word:
            words.append(word)
    return PhonemeString(tuple(words))


def phonemes_to_finglish(ps: PhonemeString, rules: FinglishRules | None = None) -> str:
    """Render canonical phonemes as Finglish that parses back to the same phonemes."""
    rules = rules or default_rules()
    return " ".join(_render_word(word, rules) for word in ps.words)


def _render_word(word: str, rules: FinglishRules) -> str:
    segments: list[str] = []
    seg = ""
    seg_target = ""
    for sym in word:
        piece = rules.render_symbol(sym)
        if seg and rules._parse_segment(seg + piece, 0) != seg_target + sym:
            segments.append(seg)
            seg, seg_target = "", ""
        seg += piece
        seg_target += sym
    if seg:
        segments.append(seg)
    return RENDER_SEPARATOR.join(segments)
