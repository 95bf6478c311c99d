"""LLM-driven grapheme-to-phoneme conversion and sentence-level benchmarking for Persian."""

from .finglish import FinglishRules, finglish_to_phonemes, phonemes_to_finglish
from .lexicon import DictEntry, DictStore, ingest, load_store, lookup, merge, save_store
from .metrics import (
    EzafeStats,
    WordAlignment,
    align_words,
    ezafe_label,
    ezafe_stats,
    per,
    polyphone_correct,
)
from .phonemes import (
    INVENTORY,
    NormalizationTable,
    Phoneme,
    PhonemeString,
    UnknownSymbol,
    normalize_raw,
    parse_canonical,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "INVENTORY",
    "DictEntry",
    "DictStore",
    "EzafeStats",
    "FinglishRules",
    "NormalizationTable",
    "Phoneme",
    "PhonemeString",
    "UnknownSymbol",
    "WordAlignment",
    "align_words",
    "ezafe_label",
    "ezafe_stats",
    "finglish_to_phonemes",
    "ingest",
    "load_store",
    "lookup",
    "merge",
    "normalize_raw",
    "parse_canonical",
    "per",
    "phonemes_to_finglish",
    "polyphone_correct",
    "render",
    "save_store",
]
