import random

import pytest

from almt.align import (NULL_TOKEN, align_pair, aligned_target_span, parse_pharaoh,
                        span_has_outside_links, train_ibm1, TranslationTable)
from almt.corpus import ParallelCorpus, Sentence
from almt.errors import ParseError


def parallel_of(*pairs):
    return ParallelCorpus([(Sentence(i, tuple(s.split())), Sentence(i, tuple(t.split())))
                           for i, (s, t) in enumerate(pairs)])


def test_single_pair_converges():
    corpus = parallel_of(*([("hund", "dog")] * 3))
    table = train_ibm1(corpus, iterations=5)
    assert table.prob("dog", "hund") == pytest.approx(1.0, abs=1e-6)


def test_disambiguation_two_pairs():
    # ("a b" <-> "x y", "a" <-> "x"): EM should prefer t(x|a) over t(y|a)
    corpus = parallel_of(("a b", "x y"), ("a", "x"))
    table = train_ibm1(corpus, iterations=10)
    assert table.prob("x", "a") > table.prob("y", "a")
    assert table.prob("y", "b") > table.prob("x", "b")


def test_loglik_non_decreasing():
    rng = random.Random(17)
    words_s = [f"s{i}" for i in range(6)]
    words_t = [f"t{i}" for i in range(6)]
    pairs = []
    for i in range(20):
        n = rng.randint(1, 5)
        pairs.append((" ".join(rng.choice(words_s) for _ in range(n)),
                      " ".join(rng.choice(words_t) for _ in range(n))))
    table = train_ibm1(parallel_of(*pairs), iterations=10)
    lls = table.log_likelihoods
    assert all(b - a >= -1e-9 for a, b in zip(lls, lls[1:]))


def test_row_normalization():
    corpus = parallel_of(("a b", "x y"), ("b c", "y z"), ("a", "x"))
    table = train_ibm1(corpus, iterations=3)
    for src, row in table.probs.items():
        assert sum(row.values()) == pytest.approx(1.0, abs=1e-9)
        assert all(0.0 <= p <= 1.0 + 1e-12 for p in row.values())


def test_empty_corpus_rejected():
    with pytest.raises(ValueError):
        train_ibm1(ParallelCorpus([]), 5)


def test_align_identical_token():
    corpus = parallel_of(*([("hund", "dog")] * 3))
    table = train_ibm1(corpus, iterations=5)
    assert align_pair(("hund",), ("dog",), table) == {(0, 0)}


def test_align_oov_target_unlinked():
    corpus = parallel_of(("hund", "dog"))
    table = train_ibm1(corpus, iterations=3)
    assert align_pair(("hund",), ("unseen",), table) == set()


def test_align_hand_built_table():
    table = TranslationTable({
        "a": {"x": 0.9, "y": 0.1},
        "b": {"x": 0.2, "y": 0.8},
        NULL_TOKEN: {"x": 0.05, "y": 0.05},
    })
    assert align_pair(("a", "b"), ("x", "y"), table) == {(0, 0), (1, 1)}


def test_align_tie_breaks_lowest_source_index():
    table = TranslationTable({"a": {"x": 0.5}, "b": {"x": 0.5}})
    assert align_pair(("a", "b"), ("x",), table) == {(0, 0)}


def test_align_null_needs_strict_win():
    table = TranslationTable({"a": {"x": 0.5}, NULL_TOKEN: {"x": 0.5}})
    assert align_pair(("a",), ("x",), table) == {(0, 0)}
    table = TranslationTable({"a": {"x": 0.4}, NULL_TOKEN: {"x": 0.5}})
    assert align_pair(("a",), ("x",), table) == set()


def test_parse_pharaoh():
    assert parse_pharaoh("0-0 1-2", 2, 3) == {(0, 0), (1, 2)}
    assert parse_pharaoh("", 2, 3) == set()


def test_parse_pharaoh_bounds():
    with pytest.raises(ParseError):
        parse_pharaoh("3-0", 2, 2)
    with pytest.raises(ParseError):
        parse_pharaoh("0-0 junk", 2, 2)


def test_aligned_target_span_direct():
    assert aligned_target_span({(1, 2), (2, 3)}, 1, 3) == (2, 3)


def test_aligned_target_span_convex_hull():
    assert aligned_target_span({(1, 4), (2, 1)}, 1, 3) == (1, 4)


def test_aligned_target_span_none():
    assert aligned_target_span({(0, 0)}, 1, 3) is None


def test_span_outside_links_detection():
    links = {(1, 2), (2, 3), (5, 3)}
    assert span_has_outside_links(links, 1, 3, 2, 3)
    assert not span_has_outside_links({(1, 2), (2, 3)}, 1, 3, 2, 3)


def test_reverse_direction():
    corpus = parallel_of(*([("hund", "dog")] * 3))
    table = train_ibm1(corpus, iterations=5, reverse=True)
    assert table.prob("hund", "dog") == pytest.approx(1.0, abs=1e-6)


def test_table_export(tmp_path):
    corpus = parallel_of(("hund", "dog"))
    table = train_ibm1(corpus, iterations=2)
    out = tmp_path / "table.tsv"
    table.export_tsv(out)
    rows = [l.split("\t") for l in out.read_text().splitlines()]
    assert all(len(r) == 3 for r in rows)
