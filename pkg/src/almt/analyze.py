"""Diagnostics: n-gram coverage, Pearson correlation, smoothed sentence BLEU,
in-domain word statistics, in-domain translation accuracy, length ratio."""

import math
from collections import Counter
from dataclasses import dataclass, field

from .corpus import Corpus, ParallelCorpus


@dataclass
class CoverageReport:
    per_n: dict  # n -> percentage of test n-gram types covered
    covering_label: str = ""

    def as_row(self):
        return [self.per_n[n] for n in sorted(self.per_n)]


@dataclass
class InDomainWordStats:
    idwt: int
    wt: int
    idwc: int
    wc: int

    @property
    def type_ratio(self):
        return 100.0 * self.idwt / self.wt if self.wt else 0.0

    @property
    def count_ratio(self):
        return 100.0 * self.idwc / self.wc if self.wc else 0.0


def _ngram_types(sentences, n):
    types = set()
    for tokens in sentences:
        for s in range(len(tokens) - n + 1):
            types.add(tuple(tokens[s:s + n]))
    return types


def ngram_coverage(covering, test, max_n: int, token_level: bool = False,
                   label: str = "") -> CoverageReport:
    """Percentage of test n-grams present in the covering text, per n.

    covering/test are iterables of token sequences. Default counts n-gram
    types (set intersection); token_level weights by test occurrences.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    covering = [tuple(t) for t in covering]
    test = [tuple(t) for t in test]
    if not test:
        raise ValueError("test corpus is empty")
    per_n = {}
    for n in range(1, max_n + 1):
        cover_types = _ngram_types(covering, n)
        if token_level:
            counts = Counter()
            for tokens in test:
                for s in range(len(tokens) - n + 1):
                    counts[tuple(tokens[s:s + n])] += 1
            total = sum(counts.values())
            hit = sum(c for g, c in counts.items() if g in cover_types)
        else:
            test_types = _ngram_types(test, n)
            total = len(test_types)
            hit = len(test_types & cover_types)
        per_n[n] = 100.0 * hit / total if total else 0.0
    return CoverageReport(per_n, label)


def corpus_tokens(corpus: Corpus):
    return [s.tokens for s in corpus]


def pearson(xs, ys) -> float:
    """Standard sample Pearson correlation coefficient."""
    xs, ys = list(map(float, xs)), list(map(float, ys))
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ValueError("need at least 2 points")
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("zero variance: correlation undefined")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))


def _modified_precision(hyp, ref, n):
    hyp_counts = Counter(tuple(hyp[s:s + n]) for s in range(len(hyp) - n + 1))
    ref_counts = Counter(tuple(ref[s:s + n]) for s in range(len(ref) - n + 1))
    match = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    total = sum(hyp_counts.values())
    return match, total


def sentence_bleu(hypothesis, reference, max_n: int = 4) -> float:
    """Smoothed sentence BLEU in [0, 100].

    Unigram precision is unsmoothed; for n >= 2 one is added to both the
    match and total counts (add-one smoothing), so identical sentences score
    exactly 100 and zero unigram overlap scores 0.
    """
    hyp, ref = tuple(hypothesis), tuple(reference)
    if not ref:
        raise ValueError("reference is empty")
    if not hyp:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        match, total = _modified_precision(hyp, ref, n)
        if n >= 2:
            match, total = match + 1, total + 1
        if match == 0:
            return 0.0
        log_sum += math.log(match / total)
    bp = 1.0 if len(hyp) >= len(ref) else math.exp(1.0 - len(ref) / len(hyp))
    return 100.0 * bp * math.exp(log_sum / max_n)


def in_domain_vocab(test, ood) -> set:
    """Test-set word types absent from the out-of-domain text."""
    ood_vocab = set()
    for tokens in ood:
        ood_vocab.update(tokens)
    test_vocab = set()
    for tokens in test:
        test_vocab.update(tokens)
    return test_vocab - ood_vocab


def in_domain_word_stats(selected, ood, test) -> InDomainWordStats:
    """Word type/count statistics of selected text restricted to in-domain words.

    All arguments are iterables of token sequences.
    """
    id_vocab = in_domain_vocab(test, ood)
    wt_set, wc, idwc = set(), 0, 0
    for tokens in selected:
        for tok in tokens:
            wt_set.add(tok)
            wc += 1
            if tok in id_vocab:
                idwc += 1
    idwt = len(wt_set & id_vocab)
    return InDomainWordStats(idwt, len(wt_set), idwc, wc)


def _hyp_tokens(hypotheses, sid):
    if isinstance(hypotheses, Corpus):
        return hypotheses.get(sid).tokens
    return tuple(hypotheses[sid])


def _hyp_has(hypotheses, sid):
    return sid in hypotheses


def in_domain_translation_accuracy(test: ParallelCorpus, hypotheses,
                                   alignments: dict, ood_vocab: set) -> float:
    """Fraction of in-domain source tokens whose aligned reference targets all
    appear in the hypothesis (bag-of-words containment).

    hypotheses is a Corpus or a dict id -> tokens (empty hypotheses allowed);
    alignments maps pair id -> link set over (source idx, target idx).
    """
    total, correct = 0, 0
    for src, ref in test:
        if not _hyp_has(hypotheses, src.id):
            raise ValueError(f"hypotheses missing id {src.id}")
        hyp_bag = Counter(_hyp_tokens(hypotheses, src.id))
        links = alignments.get(src.id, set())
        for i, tok in enumerate(src.tokens):
            if tok in ood_vocab:
                continue
            targets = [ref.tokens[j] for si, j in links if si == i]
            if not targets:
                continue
            total += 1
            if all(hyp_bag[t] > 0 for t in targets):
                correct += 1
    return correct / total if total else 0.0


def in_domain_translation_accuracy_lexical(test: ParallelCorpus, hypotheses,
                                           table, ood_vocab: set) -> float:
    """Alignment-free fallback: an in-domain source token counts as correct
    when its top-1 table translation appears in the hypothesis."""
    total, correct = 0, 0
    for src, _ in test:
        if not _hyp_has(hypotheses, src.id):
            raise ValueError(f"hypotheses missing id {src.id}")
        hyp_bag = Counter(_hyp_tokens(hypotheses, src.id))
        for tok in src.tokens:
            if tok in ood_vocab:
                continue
            row = table.probs.get(tok)
            if not row:
                continue
            top = min(row.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            total += 1
            if hyp_bag[top] > 0:
                correct += 1
    return correct / total if total else 0.0


def length_ratio(hypotheses, references: Corpus) -> float:
    """Total hypothesis tokens over total reference tokens, id-aligned."""
    hyp_total = ref_total = 0
    for ref in references:
        if not _hyp_has(hypotheses, ref.id):
            raise ValueError(f"hypotheses missing id {ref.id}")
        hyp_total += len(_hyp_tokens(hypotheses, ref.id))
        ref_total += len(ref.tokens)
    if ref_total == 0:
        raise ValueError("reference corpus is empty")
    return hyp_total / ref_total
