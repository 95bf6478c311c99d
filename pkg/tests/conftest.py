from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from llmg2p.lexicon import DictEntry, load_store, merge
from llmg2p.phonemes import PhonemeString

# numba compiles on first call, which trips per-example deadlines
settings.register_profile("default", deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def ps(text: str) -> PhonemeString:
    return PhonemeString(tuple(text.split()))


def entry(grapheme: str, *prons: str, source: str = "test") -> DictEntry:
    return DictEntry(grapheme, tuple(ps(p) for p in prons), frozenset([source]))


@pytest.fixture
def small_store():
    return merge([[entry("گل", "gol", "gel"), entry("زیبا", "zibA"), entry("خانه", "xAne"), entry("این", "in")]])


@pytest.fixture(scope="session")
def fixture_store():
    return load_store(FIXTURES / "merged_lexicon.tsv")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
