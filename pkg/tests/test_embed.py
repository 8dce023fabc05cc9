import math

import numpy as np
import pytest

from almt.embed import (EmbeddingStore, RatioScorer, cosine, dist_to_labeled, knn,
                        nearest_similarity, ratio_score)
from almt.errors import DegenerateVectorError, ParseError


def store(vectors, tag="s"):
    return EmbeddingStore(list(range(len(vectors))), np.array(vectors, dtype=float), tag)


def test_cosine_identical():
    assert cosine([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0)


def test_cosine_orthogonal():
    assert cosine([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)


def test_cosine_scale_invariant():
    assert cosine([1.0, 2.0], [3.0, 6.0]) == pytest.approx(1.0)


def test_cosine_zero_vector_raises():
    with pytest.raises(DegenerateVectorError):
        cosine([0.0, 0.0], [1.0, 0.0])


def test_knn_single_point():
    pool = store([[1, 0], [0, 1]])
    assert knn(0, pool, k=5) == [(1, pytest.approx(0.0))]


def test_knn_full_pool_when_k_large():
    pool = store([[1, 0], [0.6, 0.8], [0, 1], [1, 0.1]])
    result = knn(0, pool, k=10)
    assert [sid for sid, _ in result] == [3, 1, 2]


def test_knn_hand_computed_order():
    # cosines to query (1,0): id1=0.6, id2=0.0, id3=0.994.., id4=0.8
    pool = store([[1, 0], [0.6, 0.8], [0, 1], [0.995, 0.1], [0.8, 0.6]])
    result = knn(0, pool, k=3)
    assert [sid for sid, _ in result] == [3, 4, 1]
    cosines = [c for _, c in result]
    assert cosines == sorted(cosines, reverse=True)


def test_knn_excludes_query_only_in_own_pool():
    pool = store([[1, 0], [1, 0], [0, 1]])
    ids = [sid for sid, _ in knn(0, pool, k=3)]
    assert 0 not in ids and 1 in ids  # exact duplicate vector stays


def test_ratio_uniform_cosines_is_one():
    a = store([[2, 0], [1, 0]], "a")
    b = store([[3, 0], [5, 0]], "b")
    assert ratio_score(0, 0, a, b, k=1) == pytest.approx(1.0, abs=1e-9)


def test_ratio_hand_computed():
    # pool_a: a=(1,0), d=(0.8,0.6); pool_b: b=(0.6,0.8), c=(0,1)
    a = store([[1, 0], [0.8, 0.6]], "a")
    b = store([[0.6, 0.8], [0, 1]], "b")
    # NN_1(a) in b: cos(a,b)=0.6; NN_1(b) in a: cos(b,d)=0.96
    # ratio = 0.6 / ((0.6 + 0.96)/2) = 0.76923...
    assert ratio_score(0, 0, a, b, k=1) == pytest.approx(0.6 / 0.78)


def test_ratio_scale_invariant():
    a = store([[1, 0], [0.8, 0.6]], "a")
    b = store([[0.6, 0.8], [0, 1]], "b")
    a2 = store([[7, 0], [5.6, 4.2]], "a")
    b2 = store([[1.2, 1.6], [0, 0.25]], "b")
    assert ratio_score(0, 0, a, b, k=1) == pytest.approx(ratio_score(0, 0, a2, b2, k=1))


def test_ratio_symmetric():
    a = store([[1, 0], [0.8, 0.6]], "a")
    b = store([[0.6, 0.8], [0, 1]], "b")
    assert ratio_score(0, 1, a, b, k=1) == pytest.approx(ratio_score(1, 0, b, a, k=1))


def _all_ratios(a, b, k):
    return {(i, j): ratio_score(i, j, a, b, k) for i in range(len(a)) for j in range(len(b))}


def test_dist_to_labeled_singleton():
    a = store([[1, 0]], "a")
    b = store([[0.6, 0.8]], "b")
    assert dist_to_labeled(0, a, b, k=1) == pytest.approx(ratio_score(0, 0, a, b, k=1))


def test_dist_to_labeled_literal_and_nn_modes():
    a = store([[1, 0], [0.9, 0.3]], "a")
    b = store([[0.6, 0.8], [0, 1], [0.9, 0.1]], "b")
    ratios = [_all_ratios(a, b, 2)[(0, j)] for j in range(3)]
    assert dist_to_labeled(0, a, b, k=2, mode="literal") == pytest.approx(min(ratios))
    assert dist_to_labeled(0, a, b, k=2, mode="nn") == pytest.approx(max(ratios))


def test_nearest_similarity_duplicate_vector():
    a = store([[2, 0]], "a")
    pool = store([[1, 0], [1, 0]], "b")  # uniform neighborhoods, duplicate of query direction
    assert nearest_similarity(0, a, pool, k=1) == pytest.approx(1.0)


def test_nearest_similarity_is_max_of_ratios():
    a = store([[1, 0], [0.5, 0.5]], "a")
    pool = store([[0.6, 0.8], [0, 1], [1, 0.2]], "b")
    expected = max(_all_ratios(a, pool, 1)[(0, j)] for j in range(3))
    assert nearest_similarity(0, a, pool, k=1) == pytest.approx(expected)


def test_ratio_scorer_matches_pairwise():
    rng = np.random.default_rng(3)
    a = store(rng.normal(size=(6, 4)), "a")
    b = store(rng.normal(size=(5, 4)), "b")
    scorer = RatioScorer(a, b, k=2)
    for i in range(6):
        for j in range(5):
            assert scorer.ratios[i, j] == pytest.approx(ratio_score(i, j, a, b, k=2))
    mins, skipped = scorer.min_over_b()
    assert not skipped
    assert mins[0] == pytest.approx(dist_to_labeled(0, a, b, k=2))


def test_ratio_scorer_worker_count_is_bit_identical():
    rng = np.random.default_rng(11)
    a = store(rng.normal(size=(40, 6)), "a")
    b = store(rng.normal(size=(30, 6)), "b")
    r1 = RatioScorer(a, b, k=3, workers=1).ratios
    r4 = RatioScorer(a, b, k=3, workers=4).ratios
    assert np.array_equal(r1, r4)


def test_degenerate_rows_skipped():
    a = store([[1, 0], [0, 0]], "a")
    b = store([[0.5, 0.5], [1, 0]], "b")
    scores, skipped = RatioScorer(a, b, k=1).min_over_b()
    assert skipped == [1] and 0 in scores


def test_store_roundtrip(tmp_path):
    s = store([[1.25, -0.5], [0.0, 3.0]], "t")
    path = tmp_path / "emb.tsv"
    s.save(path)
    loaded = EmbeddingStore.load(path, "t")
    assert loaded.ids == s.ids
    assert np.array_equal(loaded.matrix, s.matrix)


def test_store_bad_header(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("hello\n")
    with pytest.raises(ParseError):
        EmbeddingStore.load(p)


def test_store_rejects_nan():
    with pytest.raises(ValueError):
        store([[float("nan"), 1.0]])
