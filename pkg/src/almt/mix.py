"""Assemble the mixed fine-tuning manifest: annotated sentences, annotated
phrases, sampled or retrieved out-of-domain pairs, and optional synthetic
pairs."""

import json
import random
from dataclasses import dataclass, field

from .corpus import Corpus, ParallelCorpus
from .embed import EmbeddingStore, RatioScorer
from .errors import ConfigError


@dataclass
class ManifestEntry:
    source: tuple[str, ...]
    target: tuple[str, ...]
    origin: str  # annotated-sentence | annotated-phrase | retrieved | sampled | synthetic-switch | synthetic-context
    provenance: object


@dataclass
class MixManifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    M: int = 0
    removed_duplicates: int = 0

    def write_jsonl(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for e in self.entries:
                fh.write(json.dumps({"source": list(e.source), "target": list(e.target),
                                     "origin": e.origin, "provenance": e.provenance}) + "\n")

    def write_tsv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for e in self.entries:
                fh.write(f"{' '.join(e.source)}\t{' '.join(e.target)}\n")


def sample_random(parallel: ParallelCorpus, M: int, seed: int):
    """Uniform draws without replacement; returns (pair id, src, tgt) tuples."""
    if M > len(parallel):
        raise ValueError(f"M={M} exceeds corpus size {len(parallel)}")
    rng = random.Random(seed)
    ids = parallel.ids()
    rng.shuffle(ids)
    return [(sid, parallel.get(sid)[0].tokens, parallel.get(sid)[1].tokens) for sid in ids[:M]]


def retrieve_similar(parallel: ParallelCorpus, store_L: EmbeddingStore, store_U: EmbeddingStore,
                     k: int, M: int, workers: int = 1):
    """Top-M out-of-domain pairs by corpus-level ratio similarity to U.

    Ranking is by max ratio against any U sentence, descending, ties by
    ascending id. Pairs with degenerate embeddings are skipped and reported.
    """
    scorer = RatioScorer(store_L, store_U, k, workers=workers)
    scores, skipped = scorer.max_over_b()
    usable = [sid for sid in parallel.ids() if sid in scores]
    if M > len(usable):
        raise ConfigError(f"M={M} exceeds usable pool of {len(usable)} pairs "
                          f"({len(skipped)} skipped as degenerate)")
    ranked = sorted(usable, key=lambda sid: (-scores[sid], sid))[:M]
    rows = [(sid, parallel.get(sid)[0].tokens, parallel.get(sid)[1].tokens) for sid in ranked]
    return rows, skipped


def write_freeze(rows, path):
    with open(path, "w", encoding="utf-8") as fh:
        for sid, _, _ in rows:
            fh.write(json.dumps({"id": sid}) + "\n")


def load_freeze(path, parallel: ParallelCorpus):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            sid = json.loads(line)["id"]
            src, tgt = parallel.get(sid)
            rows.append((sid, src.tokens, tgt.tokens))
    return rows


def assemble(l_s, l_p, l_r, synthetic=None, dedupe: bool = False,
             retrieved: bool = True) -> MixManifest:
    """Concatenate the pools in fixed order: L_s, L_p, L_r, synthetic.

    l_s / l_p are OracleResponse lists (l_s sources resolved upstream to
    (tokens, id)); l_r is a list of (pair id, src, tgt).
    """
    manifest = MixManifest()

    def add(source, target, origin, provenance):
        manifest.entries.append(ManifestEntry(tuple(source), tuple(target), origin, provenance))

    for tokens, target, sid in l_s:
        add(tokens, target, "annotated-sentence", sid)
    for resp in l_p:
        add(resp.source, resp.target, "annotated-phrase", list(resp.provenance))
    r_origin = "retrieved" if retrieved else "sampled"
    for sid, src, tgt in l_r:
        add(src, tgt, r_origin, sid)
    for pair in synthetic or []:
        add(pair.source, pair.target, f"synthetic-{'switch' if pair.recipe == 'switch' else 'context'}",
            pair.origin_id)

    if not manifest.entries:
        raise ValueError("all manifest inputs are empty")
    if dedupe:
        seen = set()
        kept = []
        for e in manifest.entries:
            key = (e.source, e.target)
            if key in seen:
                manifest.removed_duplicates += 1
                continue
            seen.add(key)
            kept.append(e)
        manifest.entries = kept

    manifest.M = len(l_r)
    for e in manifest.entries:
        manifest.counts[e.origin] = manifest.counts.get(e.origin, 0) + 1
    for origin in ("annotated-sentence", "annotated-phrase", "retrieved", "sampled",
                   "synthetic-switch", "synthetic-context"):
        manifest.counts.setdefault(origin, 0)
    return manifest
