import random

import pytest
from hypothesis import given, settings, strategies as st

from almt.corpus import Corpus, Sentence
from almt.ngrams import (extract_ngrams, is_strict_substring, semi_maximal_set,
                         semi_order, semi_order_witness, OccurrenceIndex)


def corpus_of(*lines):
    return Corpus([Sentence(i, tuple(l.split())) for i, l in enumerate(lines)])


def brute_force_semi_maximal(index):
    """O(|P|^2) oracle: test the semi-order inequality on every phrase pair."""
    def contains(small, big):
        n = len(small)
        return len(big) > n and any(big[i:i + n] == small for i in range(len(big) - n + 1))

    phrases = list(index.phrases())
    keep = set()
    for p in phrases:
        dominated = any(contains(p, q) and 2 * index.occ(q) > index.occ(p) for q in phrases)
        if not dominated:
            keep.add(p)
    return keep


def random_corpus(rng, max_sentences=50, vocab=10):
    words = [f"w{i}" for i in range(rng.randint(2, vocab))]
    lines = []
    for i in range(rng.randint(1, max_sentences)):
        lines.append(Sentence(i, tuple(rng.choice(words) for _ in range(rng.randint(1, 8)))))
    return Corpus(lines)


def test_extract_two_tokens():
    index = extract_ngrams(corpus_of("a b"), 2)
    assert index.counts == {("a",): 1, ("b",): 1, ("a", "b"): 1}


def test_extract_overlapping_counts():
    index = extract_ngrams(corpus_of("a a a"), 2)
    assert index.occ(("a",)) == 3
    assert index.occ(("a", "a")) == 2


def test_extract_empty_corpus():
    assert len(extract_ngrams(Corpus([]), 3)) == 0


def test_extract_rejects_bad_maxn():
    with pytest.raises(ValueError):
        OccurrenceIndex(0)


def test_occ_absent_is_zero():
    index = extract_ngrams(corpus_of("a b"), 2)
    assert index.occ(("z",)) == 0
    assert index.occ(("a", "b")) == 1


def test_positions_reproduce_counts():
    index = extract_ngrams(corpus_of("a b a", "b a"), 3)
    for p, c in index.counts.items():
        assert len(index.positions[p]) == c


def test_length_n_count_identity():
    corpus = corpus_of("a b c", "a", "b c d e")
    index = extract_ngrams(corpus, 4)
    for n in range(1, 5):
        total = sum(c for p, c in index.counts.items() if len(p) == n)
        expected = sum(max(0, len(s.tokens) - n + 1) for s in corpus)
        assert total == expected


def test_semi_order_inequality():
    index = OccurrenceIndex(3)
    index.counts = {("a", "b"): 4, ("a", "b", "c"): 3}
    assert semi_order(("a", "b"), ("a", "b", "c"), index)


def test_semi_order_boundary_strict():
    index = OccurrenceIndex(3)
    index.counts = {("a", "b"): 4, ("a", "b", "c"): 2}
    assert not semi_order(("a", "b"), ("a", "b", "c"), index)  # 2*2 > 4 fails


def test_semi_order_requires_strict_substring():
    index = OccurrenceIndex(2)
    index.counts = {("a", "b"): 4}
    assert not semi_order(("a", "b"), ("a", "b"), index)
    assert not is_strict_substring(("a", "b"), ("a", "b"))


def test_semi_order_always_cooccurring_superstring():
    # "eines der" always next to "eines der besten" style co-occurrence
    corpus = corpus_of(*(["eines der besten"] * 4))
    index = extract_ngrams(corpus, 3)
    assert semi_order(("eines", "der"), ("eines", "der", "besten"), index)
    assert ("eines", "der") not in semi_maximal_set(index)


def test_semi_maximal_hand_example():
    index = extract_ngrams(corpus_of("a a a"), 2)
    assert index.occ(("a",)) == 3 and index.occ(("a", "a")) == 2
    assert semi_maximal_set(index) == {("a", "a")}


def test_semi_maximal_all_unigrams_when_no_superstrings():
    index = extract_ngrams(corpus_of("a", "b", "c"), 1)
    assert semi_maximal_set(index) == {("a",), ("b",), ("c",)}


def test_semi_maximal_subset_of_index():
    index = extract_ngrams(corpus_of("a b c a b", "c c a"), 3)
    assert semi_maximal_set(index) <= set(index.phrases())


def test_semi_maximal_matches_brute_force_random():
    rng = random.Random(31)
    for _ in range(25):
        index = extract_ngrams(random_corpus(rng), 4)
        assert semi_maximal_set(index) == brute_force_semi_maximal(index)


def test_excluded_phrases_have_witness():
    rng = random.Random(5)
    index = extract_ngrams(random_corpus(rng), 4)
    smp = semi_maximal_set(index)
    for p in set(index.phrases()) - smp:
        w = semi_order_witness(p, index)
        assert w is not None and semi_order(p, w, index)


@given(st.lists(st.lists(st.sampled_from("ab"), min_size=1, max_size=6), min_size=1, max_size=10))
@settings(max_examples=50, deadline=None)
def test_occ_superstring_never_exceeds_substring(lines):
    corpus = Corpus([Sentence(i, tuple(l)) for i, l in enumerate(lines)])
    index = extract_ngrams(corpus, 3)
    for p in index.phrases():
        for q in index.phrases():
            if is_strict_substring(p, q):
                assert index.occ(p) >= index.occ(q)


def test_export_tsv_deterministic_order(tmp_path):
    index = extract_ngrams(corpus_of("b a", "a b", "a"), 2)
    out = tmp_path / "index.tsv"
    index.export_tsv(out)
    lines = out.read_text().splitlines()
    counts = [int(l.split("\t")[1]) for l in lines]
    assert counts == sorted(counts, reverse=True)
    assert lines[0].startswith("a\t")  # lexicographic tie-break among count-3... highest count first
