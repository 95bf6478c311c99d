from __future__ import annotations

import random

import pytest

from llmg2p.lexicon import (
    DictEntry,
    DictStore,
    FormatUnknown,
    UnreadableFile,
    grapheme_key,
    ingest,
    load_store,
    lookup,
    merge,
    save_store,
    split_graphemes,
)
from llmg2p.phonemes import INVENTORY, render

from conftest import FIXTURES, entry


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_ingest_normalizes_rows(tmp_path):
    entries = ingest(_write(tmp_path, "a.tsv", "گل\tɡol\nزیبا\tzibā\n"))
    got = {e.grapheme: [render(p) for p in e.pronunciations] for e in entries}
    assert got == {"گل": ["gol"], "زیبا": ["zibA"]}
    assert entries[0].sources == frozenset(["a"])


def test_ingest_canonical_row(tmp_path):
    (e,) = ingest(_write(tmp_path, "b.tsv", "گل\tgel\n"))
    assert [render(p) for p in e.pronunciations] == ["gel"]


def test_ingest_empty_file(tmp_path):
    assert ingest(_write(tmp_path, "empty.tsv", "")) == []


def test_ingest_skips_malformed_rows(tmp_path):
    entries = ingest(_write(tmp_path, "c.tsv", "گل\tgol\nonly-one-field\nزن\t☃\n"))
    assert [e.grapheme for e in entries] == ["گل"]
    assert entries.skipped == 2


def test_ingest_errors(tmp_path):
    with pytest.raises(FormatUnknown):
        ingest(_write(tmp_path, "d.tsv", "گل\tgol\n"), "xml")
    with pytest.raises(UnreadableFile):
        ingest(tmp_path / "missing.tsv")


def test_merge_polyphone():
    store = merge([[entry("گل", "gol")], [entry("گل", "gel")]])
    assert store.is_polyphone("گل")
    assert {render(p) for p in lookup(store, "گل")} == {"gol", "gel"}


def test_merge_sizes_and_lookup():
    a = [entry("آب", "Ab"), entry("نان", "nAn")]
    b = [entry("زن", "zan"), entry("مرد", "mard"), entry("زیبا", "zibA")]
    store = merge([a, b])
    assert len(store) == 5
    assert lookup(store, "کامپیوتر") == ()
    assert [render(p) for p in lookup(store, "زیبا")] == ["zibA"]


def test_key_folding_merges_arabic_letters():
    store = merge([[entry("کی", "kej")], [entry("كي", "ki")]])
    assert len(store) == 1
    assert {render(p) for p in store.lookup("كی")} == {"kej", "ki"}
    assert grapheme_key("می‌روم") == grapheme_key("میروم")


def test_split_graphemes_strips_punctuation():
    assert split_graphemes("این گل، زیباست!") == ["این", "گل", "زیباست"]


def test_entry_rejects_multiword_pronunciation():
    with pytest.raises(ValueError):
        entry("گل", "go l")


def _random_entries(rng, n):
    graphemes = ["گل", "در", "زن", "مرد", "آب"]
    out = []
    for _ in range(n):
        word = "".join(rng.choice(INVENTORY[:8]) for _ in range(rng.randint(1, 3)))
        out.append(entry(rng.choice(graphemes), word, source=rng.choice("xyz")))
    return out


def test_merge_algebra_small():
    rng = random.Random(0)
    for _ in range(200):
        a, b, c = (_random_entries(rng, rng.randint(0, 4)) for _ in range(3))
        assert merge([a, b]) == merge([b, a])
        assert merge([merge([a, b]), c]) == merge([a, merge([b, c])])
        assert merge([a, a]) == merge([a])


def test_save_load_round_trip(tmp_path):
    store = merge([[entry("گل", "gol", source="s1")], [entry("گل", "gel", source="s2"), entry("آب", "Ab")]])
    path = tmp_path / "m.tsv"
    save_store(store, path)
    assert load_store(path) == store
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines == sorted(lines, key=lambda ln: ln.split("\t")[:2])


def test_fixture_lexicon_merges_sources():
    paths = sorted((FIXTURES / "lexicon").glob("*.tsv"))
    store = merge(ingest(p) for p in paths)
    assert store == load_store(FIXTURES / "merged_lexicon.tsv")
    assert {render(p) for p in store.lookup("گل")} == {"gol", "gel"}
    assert len(store.entries["گل"].sources) == 2
