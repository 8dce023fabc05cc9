"""Synthetic parallel pairs from annotated phrases.

Two recipes: switch an annotated phrase into a retrieved out-of-domain pair
(target side substituted via word alignment), or append the phrase to the
retrieved pair. An in-domain n-gram LM ranks the candidates.
"""

import json
from dataclasses import dataclass

from .align import TranslationTable, align_pair, aligned_target_span, span_has_outside_links
from .corpus import ParallelCorpus, Phrase
from .embed import EmbeddingStore, RatioScorer
from .lm import NGramLM


@dataclass
class SyntheticPair:
    source: tuple[str, ...]
    target: tuple[str, ...]
    recipe: str  # "switch" | "contextualize"
    origin_id: int  # retrieved L' pair id
    phrase_src: Phrase
    phrase_tgt: Phrase
    position: int | None  # source switch position; None for contextualize
    target_span: tuple[int, int] | None
    lm_score: float

    def to_json(self):
        return json.dumps({
            "source": list(self.source), "target": list(self.target),
            "recipe": self.recipe, "origin_id": self.origin_id,
            "phrase_src": list(self.phrase_src), "phrase_tgt": list(self.phrase_tgt),
            "position": self.position,
            "target_span": list(self.target_span) if self.target_span else None,
            "lm_score": self.lm_score,
        })


def switch(x_star, p, i: int):
    """Replace the length-|p| window of x_star at position i with p."""
    x_star, p = tuple(x_star), tuple(p)
    if i < 0 or i + len(p) > len(x_star):
        raise ValueError(f"switch window [{i}, {i + len(p)}) out of bounds for length {len(x_star)}")
    return x_star[:i] + p + x_star[i + len(p):]


def contextualize(x_star, p):
    """Append the phrase to the retrieved sentence."""
    p = tuple(p)
    if not p:
        raise ValueError("phrase is empty")
    return tuple(x_star) + p


def phrases_in_sentence(tokens, phrase_pairs):
    """Annotated (p_x, p_y) pairs whose source side occurs in tokens."""
    tokens = tuple(tokens)
    found = []
    for p_x, p_y in phrase_pairs:
        p_x = tuple(p_x)
        n = len(p_x)
        if any(tokens[s:s + n] == p_x for s in range(len(tokens) - n + 1)):
            found.append((p_x, tuple(p_y)))
    return found


def retrieve_context(x_id, store_U: EmbeddingStore, parallel: ParallelCorpus,
                     store_L: EmbeddingStore, k: int, scorer: RatioScorer = None):
    """Most ratio-similar L' pair for a U sentence, ties by ascending id."""
    if scorer is None:
        scorer = RatioScorer(store_U, store_L, k)
    pair_id, score = scorer.argmax_over_b(x_id)
    src, tgt = parallel.get(pair_id)
    return pair_id, src.tokens, tgt.tokens, score


def best_switch(annotated, x_star, y_star, lm: NGramLM, table: TranslationTable,
                origin_id: int = -1):
    """LM-argmax over all (annotated phrase, position) switch candidates.

    Candidates whose target span cannot be resolved (no links, or links from
    outside the replaced window intruding into the span) are skipped.
    Returns (SyntheticPair or None, reason counts).
    """
    x_star, y_star = tuple(x_star), tuple(y_star)
    links = align_pair(x_star, y_star, table)
    reasons = {"no-aligned-span": 0, "span-overlap": 0, "no-position": 0}
    best = None
    for p_x, p_y in annotated:
        n = len(p_x)
        positions = range(0, len(x_star) - n)  # final window excluded per the position bound
        if len(x_star) - n <= 0:
            reasons["no-position"] += 1
            continue
        for i in positions:
            span = aligned_target_span(links, i, i + n)
            if span is None:
                reasons["no-aligned-span"] += 1
                continue
            j_min, j_max = span
            if span_has_outside_links(links, i, i + n, j_min, j_max):
                reasons["span-overlap"] += 1
                continue
            x_hat = switch(x_star, p_x, i)
            score = lm.logprob(x_hat)
            if best is None or score > best.lm_score:
                y_hat = y_star[:j_min] + p_y + y_star[j_max + 1:]
                best = SyntheticPair(x_hat, y_hat, "switch", origin_id, p_x, p_y,
                                     i, (j_min, j_max), score)
    return best, reasons


def best_contextualize(annotated, x_star, y_star, lm: NGramLM, origin_id: int = -1):
    """LM-argmax over annotated phrases appended to the retrieved pair."""
    if not annotated:
        raise ValueError("no annotated phrase pairs to contextualize")
    x_star, y_star = tuple(x_star), tuple(y_star)
    best = None
    for p_x, p_y in annotated:
        x_hat = contextualize(x_star, p_x)
        score = lm.logprob(x_hat)
        if best is None or score > best.lm_score:
            best = SyntheticPair(x_hat, contextualize(y_star, p_y), "contextualize",
                                 origin_id, p_x, p_y, None, None, score)
    return best


def augment_corpus(U, phrase_pairs, store_U: EmbeddingStore, parallel: ParallelCorpus,
                   store_L: EmbeddingStore, lm: NGramLM, table: TranslationTable,
                   k: int = 4, recipe: str = "switch", workers: int = 1):
    """Produce one synthetic pair per U sentence containing an annotated phrase.

    Returns (pairs, report) where report counts sentences dropped per reason.
    """
    scorer = RatioScorer(store_U, store_L, k, workers=workers)
    report = {"no-annotated-phrase": 0, "retrieval-degenerate": 0,
              "no-aligned-span": 0, "span-overlap": 0, "no-position": 0}
    pairs = []
    for sent in U:
        annotated = phrases_in_sentence(sent.tokens, phrase_pairs)
        if not annotated:
            report["no-annotated-phrase"] += 1
            continue
        try:
            pair_id, x_star, y_star, _ = retrieve_context(sent.id, store_U, parallel,
                                                          store_L, k, scorer)
        except Exception:
            report["retrieval-degenerate"] += 1
            continue
        if recipe == "switch":
            best, reasons = best_switch(annotated, x_star, y_star, lm, table, origin_id=pair_id)
            if best is None:
                dominant = max(reasons, key=reasons.get)
                report[dominant] += 1
                continue
            pairs.append(best)
        elif recipe == "contextualize":
            pairs.append(best_contextualize(annotated, x_star, y_star, lm, origin_id=pair_id))
        else:
            raise ValueError(f"unknown recipe {recipe!r}")
    return pairs, report


def write_synthetic(pairs, tsv_path, recipe_path):
    with open(tsv_path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(f"{' '.join(p.source)}\t{' '.join(p.target)}\n")
    with open(recipe_path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(p.to_json() + "\n")
