"""Canonical Persian phoneme inventory, phoneme strings and raw-output normalization.

Every phoneme is one character. Words are separated by whitespace in the
rendered form; inside the toolkit a sentence is a tuple of word strings.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

VOWELS = "aAeiou"
CONSONANTS = "bptdkgq?fvszSZxhCJmnlrj"
INVENTORY = VOWELS + CONSONANTS
_INVENTORY_SET = frozenset(INVENTORY)

BOUNDARY = "_"
DELETE = "∅"


class UnknownSymbol(ValueError):
    """A character outside the canonical inventory was found in canonical text."""

    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"unknown phoneme symbol {char!r} at position {position}")


class TableError(ValueError):
    pass


def is_phoneme(char: str) -> bool:
    return char in _INVENTORY_SET


class Phoneme(str):
    """A single canonical phoneme symbol."""

    __slots__ = ()

    def __new__(cls, symbol: str):
        if len(symbol) != 1 or symbol not in _INVENTORY_SET:
            raise UnknownSymbol(0, symbol)
        return super().__new__(cls, symbol)

    @property
    def is_vowel(self) -> bool:
        return self in VOWELS


@dataclass(frozen=True)
class PhonemeString:
    """A word-segmented canonical phoneme sequence.

    ``words`` holds one string per word; each character of a word is one
    phoneme. ``dropped`` is diagnostic metadata filled by :func:`normalize_raw`
    and does not take part in equality.
    """

    words: tuple[str, ...] = ()
    dropped: int = field(default=0, compare=False)

    def __post_init__(self):
        words = tuple(self.words)
        object.__setattr__(self, "words", words)
        offset = 0
        for word in words:
            if not word:
                raise ValueError("empty word token in PhonemeString")
            for k, ch in enumerate(word):
                if ch not in _INVENTORY_SET:
                    raise UnknownSymbol(offset + k, ch)
            offset += len(word) + 1

    @classmethod
    def from_words(cls, words: Iterable[str]) -> PhonemeString:
        return cls(tuple(words))

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def __getitem__(self, idx):
        return self.words[idx]

    def __bool__(self) -> bool:
        return bool(self.words)

    def __str__(self) -> str:
        return render(self)

    def phonemes(self) -> list[list[Phoneme]]:
        return [[Phoneme(c) for c in w] for w in self.words]

    def flatten(self, boundary: str | None = BOUNDARY) -> list[str]:
        """Symbols in order, with ``boundary`` between words (omitted if None)."""
        out: list[str] = []
        for i, word in enumerate(self.words):
            if i and boundary is not None:
                out.append(boundary)
            out.extend(word)
        return out

    @classmethod
    def from_flat(cls, symbols: Sequence[str], boundary: str = BOUNDARY) -> PhonemeString:
        return cls(tuple(w for w in "".join(symbols).split(boundary) if w))

    def word(self, i: int) -> PhonemeString:
        return PhonemeString((self.words[i],))


def parse_canonical(text: str) -> PhonemeString:
    """Parse whitespace-separated canonical text.

    A hyphen inside a word is the dataset's Ezafe joiner (``gol-e``) and is
    dropped, so ``gol-e`` parses as the single word ``gole``.
    """
    words = []
    pos = 0
    for token in text.split():
        start = text.index(token, pos)
        pos = start + len(token)
        chars = []
        for k, ch in enumerate(token):
            if ch == "-":
                continue
            if ch not in _INVENTORY_SET:
                raise UnknownSymbol(start + k, ch)
            chars.append(ch)
        if chars:
            words.append("".join(chars))
    return PhonemeString(tuple(words))


def render(ps: PhonemeString) -> str:
    return " ".join(ps.words)


class NormalizationTable:
    """Many-to-one map from raw phonetic clusters to canonical targets.

    Targets are a canonical symbol, :data:`BOUNDARY` or :data:`DELETE`.
    Lookup is longest-match; canonical symbols without an entry map to
    themselves and whitespace is always a word boundary.
    """

    def __init__(self, entries: dict[str, str], version: str | None = None):
        norm: dict[str, str] = {}
        for src, tgt in entries.items():
            src = unicodedata.normalize("NFC", src)
            if not src:
                raise TableError("empty source cluster")
            if tgt not in _INVENTORY_SET and tgt not in (BOUNDARY, DELETE):
                raise TableError(f"invalid target {tgt!r} for {src!r}")
            if src in norm and norm[src] != tgt:
                raise TableError(f"conflicting targets for {src!r}: {norm[src]!r} / {tgt!r}")
            if len(src) == 1 and src in _INVENTORY_SET and tgt != src:
                # canonical text must stay a fixed point
                raise TableError(f"canonical symbol {src!r} remapped to {tgt!r}")
            if len(src) > 1 and all(ch in _INVENTORY_SET for ch in src):
                raise TableError(f"cluster {src!r} would rewrite canonical text")
            norm[src] = tgt
        self.entries = norm
        self.version = version
        self.max_len = max((len(k) for k in norm), default=1)
        for src in norm:
            if len(src) > 1:
                for ch in src:
                    if not self.covers(ch):
                        raise TableError(
                            f"character {ch!r} of cluster {src!r} has no single-character entry"
                        )

    def covers(self, char: str) -> bool:
        return char in self.entries or char in _INVENTORY_SET or char.isspace()

    @property
    def source_alphabet(self) -> frozenset[str]:
        """Every single character the table handles without dropping."""
        chars = set(_INVENTORY_SET)
        chars.update(k for k in self.entries if len(k) == 1)
        chars.add(" ")
        return frozenset(chars)

    def lookup(self, text: str, i: int) -> tuple[str | None, int]:
        """Longest entry matching at ``i``: (target, consumed length)."""
        for n in range(min(self.max_len, len(text) - i), 0, -1):
            tgt = self.entries.get(text[i : i + n])
            if tgt is not None:
                return tgt, n
        return None, 1

    @classmethod
    def from_tsv(cls, path: str | Path) -> NormalizationTable:
        return cls.from_lines(Path(path).read_text(encoding="utf-8").splitlines())

    @classmethod
    def from_lines(cls, lines: Iterable[str]) -> NormalizationTable:
        entries: dict[str, str] = {}
        version = None
        for lineno, line in enumerate(lines, 1):
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                if key.strip() == "version":
                    version = val.strip()
                continue
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise TableError(f"line {lineno}: expected 2 tab-separated fields")
            src, tgt = parts[0], parts[1].strip()
            if src in entries and entries[src] != tgt:
                raise TableError(f"line {lineno}: duplicate source {src!r}")
            entries[src] = tgt
        return cls(entries, version=version)


@lru_cache(maxsize=1)
def default_table() -> NormalizationTable:
    text = resources.files("llmg2p").joinpath("data/normalization.tsv").read_text(encoding="utf-8")
    return NormalizationTable.from_lines(text.splitlines())


def _compose(raw: str, table: NormalizationTable) -> str:
    # NFC, except that a precomposed character the table lacks is split back
    # into base + marks when those are covered (e.g. "a" + combining tilde).
    out = []
    for ch in unicodedata.normalize("NFC", raw):
        if not table.covers(ch):
            parts = unicodedata.normalize("NFD", ch)
            if len(parts) > 1 and all(table.covers(c) for c in parts):
                out.append(parts)
                continue
        out.append(ch)
    return "".join(out)


def normalize_raw(raw: str, table: NormalizationTable | None = None) -> PhonemeString:
    """Map free-form phonetic text (IPA variants etc.) onto canonical phonemes.

    Never raises. Characters neither in the table nor canonical are dropped;
    their number is stored in ``result.dropped``.
    """
    if table is None:
        table = default_table()
    text = _compose(raw, table)
    words: list[str] = []
    current: list[str] = []
    dropped = 0
    i = 0
    while i < len(text):
        tgt, n = table.lookup(text, i)
        ch = text[i]
        if tgt is None:
            if ch.isspace():
                tgt = BOUNDARY
            elif ch in _INVENTORY_SET:
                tgt = ch
            else:
                dropped += 1
                tgt = DELETE
        if tgt == BOUNDARY:
            if current:
                words.append("".join(current))
                current = []
        elif tgt != DELETE:
            current.append(tgt)
        i += n
    if current:
        words.append("".join(current))
    if dropped:
        logger.debug("normalize_raw dropped %d character(s) from %r", dropped, raw)
    return PhonemeString(tuple(words), dropped=dropped)
