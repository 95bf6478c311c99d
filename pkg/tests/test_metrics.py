from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from llmg2p.metrics import (
    EmptyReference,
    EzafeStats,
    TargetNotFound,
    align_words,
    ezafe_label,
    ezafe_stats,
    per,
    per_counts,
    polyphone_correct,
    sentence_ezafe_stats,
)
from llmg2p.phonemes import PhonemeString

import oracles
from conftest import ps

small_words = st.text(alphabet="aeoglbz", min_size=1, max_size=4)
sentences = st.lists(small_words, max_size=4).map(lambda ws: PhonemeString(tuple(ws)))


@pytest.mark.parametrize(
    "pred, ref, expected",
    [("gol", "gol", Fraction(0)), ("gel", "gol", Fraction(1, 3)), ("", "gol", Fraction(1))],
)
def test_per_examples(pred, ref, expected):
    assert oracles.per(ps(pred).words, ps(ref).words) == expected
    assert per(ps(pred), ps(ref)) == pytest.approx(float(expected), abs=0)


def test_per_counts_word_boundaries():
    # merging two words removes one boundary symbol
    assert per_counts(ps("ingol"), ps("in gol")) == (1, 6)


def test_per_empty_reference():
    with pytest.raises(EmptyReference):
        per(ps("gol"), ps(""))


@settings(max_examples=400)
@given(sentences, sentences.filter(lambda s: len(s.words) > 0))
def test_per_matches_oracle(pred, ref):
    dist, n = per_counts(pred, ref)
    assert Fraction(dist, n) == oracles.per(pred.words, ref.words)


def test_align_identical():
    a = align_words(ps("in gole zibA ast"), ps("in gole zibA ast"))
    assert a.pairs == ((0, 0), (1, 1), (2, 2), (3, 3))
    assert a.cost == 0.0


def test_align_dropped_word():
    a = align_words(ps("in gole zibA ast"), ps("in zibA ast"))
    assert a.pairs == ((0, 0), (1, None), (2, 1), (3, 2))
    assert a.n_pairs == 3


def test_align_empty():
    assert align_words(ps(""), ps("")).pairs == ()


@settings(max_examples=300)
@given(sentences, sentences)
def test_align_matches_brute_force(ref, pred):
    a = align_words(ref, pred)
    cost, n_pairs = oracles.best_alignment_cost(ref.words, pred.words)
    assert a.cost == pytest.approx(float(cost), abs=1e-9)
    assert float(oracles.alignment_cost(a.pairs, ref.words, pred.words)) == pytest.approx(float(cost), abs=1e-9)
    assert a.n_pairs == n_pairs


def test_ezafe_label_examples(small_store):
    assert ezafe_label(ps("gole"), "گل", small_store) is True
    assert ezafe_label(ps("gol"), "گل", small_store) is False
    assert ezafe_label(ps("xAne"), "خانه", small_store) is False
    assert ezafe_label(ps("xAneje"), "خانه", small_store) is True
    # no dictionary entry: suffix test alone
    assert ezafe_label(ps("ketAbe"), "کتاب", None) is True


def test_ezafe_stats_examples(small_store):
    g = ["این", "گل", "زیبا", "است"]
    ref = ps("in gole zibA ast")
    assert sentence_ezafe_stats(ref, ref, g, small_store) == EzafeStats(tp=1, tn=3)
    assert sentence_ezafe_stats(ref, ps("in gol zibA ast"), g, small_store) == EzafeStats(fn=1, tn=3)
    plain = ps("in gol zibA ast")
    assert ezafe_stats([(plain, plain, g)], small_store) == EzafeStats(tn=4)


def test_ezafe_gap_policy(small_store):
    g = ["این", "گل", "زیبا", "است"]
    ref, pred = ps("in gole zibA ast"), ps("in zibA ast")
    assert sentence_ezafe_stats(ref, pred, g, small_store, penalize_gaps=True) == EzafeStats(fn=1, tn=3)
    assert sentence_ezafe_stats(ref, pred, g, small_store, penalize_gaps=False) == EzafeStats(tn=4)


def test_undefined_ratios_are_none():
    s = EzafeStats(tn=5)
    assert s.precision is None and s.recall is None and s.f1 is None
    assert s.accuracy == 1.0
    assert EzafeStats().accuracy is None
    s = EzafeStats(tp=2, fp=1, fn=1, tn=6)
    assert (s.precision, s.recall, s.f1, s.accuracy) == (2 / 3, 2 / 3, pytest.approx(2 / 3), 0.8)


def test_polyphone_examples(small_store):
    g = ["این", "گل", "زیبا", "است"]
    ref = ps("in gel zibA ast")
    target = ps("gel")
    assert polyphone_correct(ps("in gel zibA ast"), g, "گل", target, ref, small_store)
    assert not polyphone_correct(ps("in gol zibA ast"), g, "گل", target, ref, small_store)
    assert not polyphone_correct(ps("in zibA ast"), g, "گل", target, ref, small_store)
    with pytest.raises(TargetNotFound):
        polyphone_correct(ref, g, "در", ps("dar"), ref, small_store)


def test_identity_properties_random():
    rng = random.Random(1)
    for _ in range(200):
        words = ["".join(rng.choice("aeiougolbzt") for _ in range(rng.randint(1, 6))) for _ in range(rng.randint(1, 6))]
        s = PhonemeString(tuple(words))
        assert per(s, s) == 0.0
        assert per(PhonemeString(), s) == 1.0
        st_ = sentence_ezafe_stats(s, s, ["x"] * len(words), None)
        assert st_.fp == 0 and st_.fn == 0


def test_polyphone_ignores_ezafe_ending(small_store):
    g = ["این", "گل", "زیبا", "است"]
    ref = ps("in gole zibA ast")
    assert polyphone_correct(ps("in gole zibA ast"), g, "گل", ps("gol"), ref, small_store)
    assert not polyphone_correct(ps("in gele zibA ast"), g, "گل", ps("gol"), ref, small_store)
