"""Deterministic toy fixture: a small in-domain corpus with frequent domain
phrases, an out-of-domain parallel corpus that never mentions them, synthetic
embeddings, and a simulated-oracle reference.

Everything is generated from one seed so pipeline runs are byte-reproducible.
The "translation" of a token w is simply T_w, which lets IBM Model 1 recover
a near-perfect table on a corpus this small.
"""

import json
import random
from pathlib import Path

import numpy as np

GENERAL_VOCAB = [f"g{i:02d}" for i in range(40)]
DOMAIN_VOCAB = [f"d{i:02d}" for i in range(15)]
DOMAIN_PHRASES = [
    ("d00", "d01"), ("d02", "d03", "d04"), ("d05",), ("d06", "d07"),
    ("d08", "d09", "d10"), ("d11", "d12"), ("d13",), ("d14", "d00"),
]


def translate_token(tok: str) -> str:
    return "T_" + tok


def _general_sentence(rng, lo=4, hi=9):
    return [rng.choice(GENERAL_VOCAB) for _ in range(rng.randint(lo, hi))]


def _domain_sentence(rng):
    tokens = _general_sentence(rng, 3, 6)
    for _ in range(rng.randint(1, 2)):
        phrase = rng.choice(DOMAIN_PHRASES)
        pos = rng.randint(0, len(tokens))
        tokens[pos:pos] = list(phrase)
    return tokens


def _token_vectors(dim, seed):
    rng = np.random.default_rng(seed)
    vecs = {}
    for tok in GENERAL_VOCAB + DOMAIN_VOCAB:
        vecs[tok] = rng.normal(size=dim)
    # push domain tokens into their own half-space so U clusters away from L
    shift = rng.normal(size=dim) * 3.0
    for tok in DOMAIN_VOCAB:
        vecs[tok] = vecs[tok] + shift
    return vecs


def _sentence_vector(tokens, vecs):
    return np.mean([vecs[t] for t in tokens], axis=0)


def _write_embeddings(path, rows, dim):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim={dim}\n")
        for sid, vec in rows:
            fh.write(f"{sid}\t{' '.join(f'{v:.8f}' for v in vec)}\n")


def generate(out_dir, seed: int = 7, n_unlabeled: int = 200, n_labeled: int = 500,
             n_test: int = 30, dim: int = 8) -> dict:
    """Write the fixture files and a ready-to-run pipeline config.

    Returns the config dict (also saved as config.json).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)
    vecs = _token_vectors(dim, seed)

    u_sentences = [_domain_sentence(rng) for _ in range(n_unlabeled)]
    l_pairs = []
    for _ in range(n_labeled):
        src = _general_sentence(rng)
        l_pairs.append((src, [translate_token(t) for t in src]))
    test_pairs = []
    for _ in range(n_test):
        src = _domain_sentence(rng)
        test_pairs.append((src, [translate_token(t) for t in src]))

    with (out / "U.txt").open("w", encoding="utf-8") as fh:
        for tokens in u_sentences:
            fh.write(" ".join(tokens) + "\n")
    with (out / "L.tsv").open("w", encoding="utf-8") as fh:
        for src, tgt in l_pairs:
            fh.write(" ".join(src) + "\t" + " ".join(tgt) + "\n")
    # oracle reference: the "professional translator" answer for every U sentence
    with (out / "reference.tsv").open("w", encoding="utf-8") as fh:
        for tokens in u_sentences:
            fh.write(" ".join(tokens) + "\t" + " ".join(translate_token(t) for t in tokens) + "\n")
    with (out / "test.tsv").open("w", encoding="utf-8") as fh:
        for src, tgt in test_pairs:
            fh.write(" ".join(src) + "\t" + " ".join(tgt) + "\n")

    _write_embeddings(out / "emb_U.tsv",
                      [(i, _sentence_vector(t, vecs)) for i, t in enumerate(u_sentences)], dim)
    _write_embeddings(out / "emb_L.tsv",
                      [(i, _sentence_vector(src, vecs)) for i, (src, _) in enumerate(l_pairs)], dim)
    with (out / "rttl_scores.tsv").open("w", encoding="utf-8") as fh:
        for i in range(n_unlabeled):
            fh.write(f"{i}\t{-rng.uniform(0.5, 12.0):.6f}\n")

    config = {
        "unlabeled": str(out / "U.txt"),
        "labeled": str(out / "L.tsv"),
        "oracle_reference": str(out / "reference.tsv"),
        "embeddings_unlabeled": str(out / "emb_U.tsv"),
        "embeddings_labeled": str(out / "emb_L.tsv"),
        "test": str(out / "test.tsv"),
        "rttl_scores": str(out / "rttl_scores.tsv"),
        "strategy": "hybrid",
        "sentence_strategy": "csse",
        "phrase_strategy": "ngf-smp",
        "budgets": [200],
        "seed": seed,
        "k": 4,
        "max_n": 4,
        "labeled_subset_size": 100,
        "mix_policy": "retrieve",
        "augment_recipe": "switch",
        "ibm1_iterations": 5,
        "lm_order": 3,
        "output_dir": str(out / "runs"),
        "workers": 1,
    }
    with (out / "config.json").open("w", encoding="utf-8") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return config
