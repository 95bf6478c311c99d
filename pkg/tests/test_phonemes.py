from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from llmg2p.phonemes import (
    INVENTORY,
    Phoneme,
    PhonemeString,
    NormalizationTable,
    TableError,
    UnknownSymbol,
    default_table,
    normalize_raw,
    parse_canonical,
    render,
)

words = st.text(alphabet=INVENTORY, min_size=1, max_size=8)
phoneme_strings = st.lists(words, max_size=6).map(lambda ws: PhonemeString(tuple(ws)))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("gol", ("gol",)),
        ("", ()),
        ("in gol-e zibA ast", ("in", "gole", "zibA", "ast")),
        ("  in \t gole  ", ("in", "gole")),
    ],
)
def test_parse_canonical(text, expected):
    assert parse_canonical(text).words == expected


def test_parse_rejects_unknown_symbol_with_position():
    with pytest.raises(UnknownSymbol) as err:
        parse_canonical("gol zyb")
    assert err.value.char == "y"
    assert err.value.position == 5


@pytest.mark.parametrize(
    "ps, text",
    [(("gol",), "gol"), ((), ""), (("in", "gole"), "in gole")],
)
def test_render(ps, text):
    assert render(PhonemeString(ps)) == text


@given(phoneme_strings)
def test_parse_render_round_trip(ps):
    assert parse_canonical(render(ps)) == ps


@given(phoneme_strings)
def test_canonical_text_is_a_fixed_point(ps):
    out = normalize_raw(render(ps))
    assert out == ps
    assert out.dropped == 0


def test_phoneme_string_validation():
    with pytest.raises(ValueError):
        PhonemeString(("gol", ""))
    with pytest.raises(UnknownSymbol):
        PhonemeString(("gøl",))
    assert Phoneme("A").is_vowel and not Phoneme("S").is_vowel
    with pytest.raises(UnknownSymbol):
        Phoneme("y")


def test_flatten_counts_boundaries():
    ps = parse_canonical("in gol")
    assert ps.flatten() == ["i", "n", "_", "g", "o", "l"]
    assert PhonemeString.from_flat(ps.flatten()) == ps


# Expected values below come from reading normalization.tsv by hand.
@pytest.mark.parametrize(
    "raw, expected",
    [
        ("ɡol", "gol"),
        ("zibā", "zibA"),
        ("æ", "a"),
        ("ʔin ɡole zibɑst", "?in gole zibAst"),
        ("ˈʃæb", "Sab"),
        ("tʃeʃm", "CeSm"),
        ("dʒæŋgæl", "Jangal"),
        ("xɒːne", "xAne"),
        ("ketāb, man", "ketAb man"),
    ],
)
def test_normalize_examples(raw, expected):
    out = normalize_raw(raw)
    assert render(out) == expected
    assert out.dropped == 0


def test_unknown_characters_are_dropped_and_counted():
    out = normalize_raw("gol☃ ab")
    assert render(out) == "gol ab"
    assert out.dropped == 1


def test_totality_over_source_alphabet():
    table = default_table()
    for ch in sorted(table.source_alphabet):
        assert normalize_raw(f"a{ch}a", table).dropped == 0, ch


def test_table_rejects_remapping_canonical_symbol():
    with pytest.raises(TableError):
        NormalizationTable({"a": "A"})


def test_table_rejects_uncovered_multichar_key():
    with pytest.raises(TableError):
        NormalizationTable({"tʃ": "C"})  # ʃ alone is not covered


def test_table_from_lines_reads_version():
    t = NormalizationTable.from_lines(["# version: 7", "ā\tA", "ʃ\tS", "tʃ\tC"])
    assert t.version == "7"
    assert render(normalize_raw("tʃā", t)) == "CA"
