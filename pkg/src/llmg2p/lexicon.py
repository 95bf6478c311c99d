"""Pronunciation dictionaries: ingest, unify, merge, look up.

Every source is normalized into canonical phonemes at ingest, so entries
from differently-notated dictionaries compare equal. Grapheme keys are
folded (NFC, Arabic yeh/kaf to Persian forms, tatweel and ZWNJ removed).
"""

from __future__ import annotations

import csv
import logging
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping

from .phonemes import NormalizationTable, PhonemeString, UnknownSymbol, normalize_raw, parse_canonical

logger = logging.getLogger(__name__)

_KEY_FOLD = str.maketrans(
    {
        "ي": "ی",  # Arabic yeh
        "ى": "ی",  # alef maksura
        "ك": "ک",  # Arabic kaf
        "ـ": None,  # tatweel
        "‌": None,  # ZWNJ
        "‍": None,  # ZWJ
    }
)

# Rough consonant/long-vowel reading of Persian letters; only used to align
# grapheme words with phoneme words when no dictionary entry exists.
_SKELETON = {
    "ا": "A", "آ": "A", "أ": "?", "إ": "?", "ئ": "?", "ؤ": "?", "ء": "?",
    "ب": "b", "پ": "p", "ت": "t", "ث": "s", "ج": "J", "چ": "C", "ح": "h",
    "خ": "x", "د": "d", "ذ": "z", "ر": "r", "ز": "z", "ژ": "Z", "س": "s",
    "ش": "S", "ص": "s", "ض": "z", "ط": "t", "ظ": "z", "ع": "?", "غ": "q",
    "ف": "f", "ق": "q", "ک": "k", "گ": "g", "ل": "l", "م": "m", "ن": "n",
    "و": "u", "ه": "h", "ی": "i", "ة": "e",
    "َ": "a", "ِ": "e", "ُ": "o",
}


# contracted copula and common enclitics; longer ones first
CLITICS = ("\u200cهایی", "\u200cها", "\u200cاست", "\u200cام", "\u200cای", "\u200cاش", "ست")


class UnreadableFile(OSError):
    pass


class FormatUnknown(ValueError):
    pass


def grapheme_key(word: str) -> str:
    return unicodedata.normalize("NFC", word).translate(_KEY_FOLD).strip()


def split_graphemes(sentence: str) -> list[str]:
    """Whitespace tokens of a grapheme sentence with edge punctuation removed."""
    words = []
    for token in sentence.split():
        start, end = 0, len(token)
        while start < end and unicodedata.category(token[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(token[end - 1]).startswith("P"):
            end -= 1
        if start < end:
            words.append(token[start:end])
    return words


def grapheme_skeleton(word: str) -> str:
    return "".join(_SKELETON.get(ch, "") for ch in grapheme_key(word))


def _pron_sort_key(ps: PhonemeString) -> str:
    return " ".join(ps.words)


@dataclass(frozen=True)
class DictEntry:
    grapheme: str
    pronunciations: tuple[PhonemeString, ...]
    sources: frozenset[str]

    def __post_init__(self):
        if not self.pronunciations:
            raise ValueError(f"entry {self.grapheme!r} has no pronunciation")
        if not self.sources:
            raise ValueError(f"entry {self.grapheme!r} has no source")
        for p in self.pronunciations:
            if len(p.words) != 1:
                raise ValueError(f"entry {self.grapheme!r}: pronunciation {p} is not one word")
        uniq = tuple(sorted(set(self.pronunciations), key=_pron_sort_key))
        object.__setattr__(self, "grapheme", grapheme_key(self.grapheme))
        object.__setattr__(self, "pronunciations", uniq)
        object.__setattr__(self, "sources", frozenset(self.sources))

    def union(self, other: DictEntry) -> DictEntry:
        return DictEntry(
            self.grapheme,
            self.pronunciations + other.pronunciations,
            self.sources | other.sources,
        )


@dataclass(frozen=True)
class DictStore:
    entries: Mapping[str, DictEntry] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, grapheme: str) -> bool:
        return grapheme_key(grapheme) in self.entries

    def __iter__(self):
        return iter(sorted(self.entries))

    def lookup(self, grapheme: str) -> tuple[PhonemeString, ...]:
        entry = self.entries.get(grapheme_key(grapheme))
        return entry.pronunciations if entry else ()

    def match(self, word: str) -> tuple[str, tuple[PhonemeString, ...]]:
        """Like :meth:`lookup`, but falls back to the word minus an enclitic.

        Returns the form that matched (the word itself or its host) and its
        pronunciations; ``(word, ())`` when neither is known.
        """
        prons = self.lookup(word)
        if prons:
            return word, prons
        for clitic in CLITICS:
            if word.endswith(clitic) and len(word) > len(clitic) + 1:
                host = word[: -len(clitic)].rstrip("\u200c")
                prons = self.lookup(host)
                if prons:
                    return host, prons
        return word, ()

    def is_polyphone(self, grapheme: str) -> bool:
        return len(self.lookup(grapheme)) >= 2

    def rows(self) -> list[tuple[str, str, str]]:
        out = []
        for key in sorted(self.entries):
            entry = self.entries[key]
            for p in entry.pronunciations:
                out.append((key, str(p), ",".join(sorted(entry.sources))))
        return out


class Ingested(list):
    """List of entries that also remembers how many rows were skipped."""

    def __init__(self, entries: Iterable[DictEntry] = (), skipped: int = 0):
        super().__init__(entries)
        self.skipped = skipped


def _group(pairs: Iterable[tuple[str, PhonemeString, str]]) -> Ingested:
    by_key: dict[str, tuple[list[PhonemeString], set[str]]] = {}
    for grapheme, pron, source in pairs:
        prons, sources = by_key.setdefault(grapheme_key(grapheme), ([], set()))
        prons.append(pron)
        sources.add(source)
    return Ingested(DictEntry(k, tuple(p), frozenset(s)) for k, (p, s) in by_key.items())


def _read_rows(path: Path) -> list[list[str]]:
    try:
        with open(path, encoding="utf-8", newline="") as f:
            return [row for row in csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE)]
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableFile(f"cannot read dictionary {path}: {exc}") from exc


def _ingest_raw_tsv(path: Path, table: NormalizationTable | None, source: str) -> Ingested:
    pairs = []
    skipped = 0
    for lineno, row in enumerate(_read_rows(path), 1):
        if not row or (len(row) == 1 and not row[0].strip()) or row[0].startswith("#"):
            continue
        if len(row) < 2 or not row[0].strip() or not row[1].strip():
            skipped += 1
            logger.warning("%s:%d: malformed row skipped", path, lineno)
            continue
        pron = normalize_raw(row[1], table)
        if len(pron.words) != 1:
            skipped += 1
            logger.warning("%s:%d: pronunciation %r is not a single word", path, lineno, row[1])
            continue
        pairs.append((row[0], PhonemeString(pron.words), source))
    out = _group(pairs)
    out.skipped = skipped
    return out


def _ingest_merged_tsv(path: Path, table: NormalizationTable | None, source: str) -> Ingested:
    pairs = []
    skipped = 0
    for lineno, row in enumerate(_read_rows(path), 1):
        if not row or row[0].startswith("#"):
            continue
        try:
            pron = parse_canonical(row[1])
        except (IndexError, UnknownSymbol):
            pron = None
        if pron is None or len(pron.words) != 1:
            skipped += 1
            logger.warning("%s:%d: malformed merged row skipped", path, lineno)
            continue
        srcs = [s for s in row[2].split(",") if s] if len(row) > 2 else []
        for s in srcs or [source]:
            pairs.append((row[0], pron, s))
    out = _group(pairs)
    out.skipped = skipped
    return out


ADAPTERS: dict[str, Callable[[Path, NormalizationTable | None, str], Ingested]] = {
    "tsv": _ingest_raw_tsv,
    "merged": _ingest_merged_tsv,
}


def ingest(
    source_file: str | Path,
    format_id: str = "tsv",
    table: NormalizationTable | None = None,
    source: str | None = None,
) -> Ingested:
    """Read one dictionary file into canonical entries.

    ``tsv`` rows are ``grapheme<TAB>raw pronunciation``; ``merged`` reads the
    output of :func:`save_store`. ``source`` defaults to the file stem.
    """
    if format_id not in ADAPTERS:
        raise FormatUnknown(f"unknown dictionary format {format_id!r}; known: {sorted(ADAPTERS)}")
    path = Path(source_file)
    return ADAPTERS[format_id](path, table, source or path.stem)


def merge(stores: Iterable[Iterable[DictEntry] | DictStore]) -> DictStore:
    merged: dict[str, DictEntry] = {}
    for store in stores:
        entries = store.entries.values() if isinstance(store, DictStore) else store
        for entry in entries:
            prev = merged.get(entry.grapheme)
            merged[entry.grapheme] = entry if prev is None else prev.union(entry)
    return DictStore({k: merged[k] for k in sorted(merged)})


def lookup(store: DictStore, grapheme: str) -> tuple[PhonemeString, ...]:
    return store.lookup(grapheme)


def save_store(store: DictStore, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        for row in store.rows():
            f.write("\t".join(row) + "\n")


def load_store(path: str | Path) -> DictStore:
    return merge([ingest(path, "merged")])
