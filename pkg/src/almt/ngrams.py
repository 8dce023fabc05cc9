"""Phrase extraction/indexing, the semi-order relation, and semi-maximal sets.

Occurrence counting includes overlapping matches ("a a a" contains "a a"
twice). All count comparisons are exact integer arithmetic.
"""

from collections import defaultdict

from .corpus import Corpus, Phrase


class OccurrenceIndex:
    """Counts and positions of every n-gram (1 <= n <= max_n) in a corpus."""

    def __init__(self, max_n: int):
        if max_n < 1:
            raise ValueError(f"max_n must be >= 1, got {max_n}")
        self.max_n = max_n
        self.counts: dict[Phrase, int] = {}
        self.positions: dict[Phrase, list[tuple[int, int]]] = {}

    def add_sentence(self, sid: int, tokens):
        tokens = tuple(tokens)
        for n in range(1, self.max_n + 1):
            for start in range(len(tokens) - n + 1):
                p = tokens[start:start + n]
                self.counts[p] = self.counts.get(p, 0) + 1
                self.positions.setdefault(p, []).append((sid, start))

    def occ(self, p: Phrase) -> int:
        return self.counts.get(tuple(p), 0)

    def __contains__(self, p):
        return tuple(p) in self.counts

    def __len__(self):
        return len(self.counts)

    def phrases(self):
        return self.counts.keys()

    def export_tsv(self, path):
        """Write "phrase TAB count", count descending then lexicographic."""
        rows = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))
        with open(path, "w", encoding="utf-8") as fh:
            for p, c in rows:
                fh.write(f"{' '.join(p)}\t{c}\n")


def extract_ngrams(corpus: Corpus, max_n: int) -> OccurrenceIndex:
    index = OccurrenceIndex(max_n)
    for sent in corpus:
        index.add_sentence(sent.id, sent.tokens)
    return index


def is_strict_substring(p: Phrase, p_prime: Phrase) -> bool:
    """True iff p is a contiguous substring of p_prime and p != p_prime."""
    p, p_prime = tuple(p), tuple(p_prime)
    if len(p) >= len(p_prime):
        return False
    n = len(p)
    return any(p_prime[i:i + n] == p for i in range(len(p_prime) - n + 1))


def semi_order(p: Phrase, p_prime: Phrase, index: OccurrenceIndex) -> bool:
    """p precedes p_prime iff p is a strict substring and p_prime occurs more
    than half as often as p (2*occ(p') > occ(p), exact integers)."""
    if not is_strict_substring(p, p_prime):
        return False
    return 2 * index.occ(p_prime) > index.occ(p)


def semi_maximal_set(index: OccurrenceIndex) -> set[Phrase]:
    """Phrases with no semi-order superstring in the index.

    Instead of testing all phrase pairs, walk every stored phrase p' and mark
    each of its strict substrings p excluded when 2*occ(p') > occ(p). Every
    substring of a stored phrase is itself stored, so this covers all pairs.
    """
    excluded = set()
    for p_prime, c_prime in index.counts.items():
        length = len(p_prime)
        if length < 2:
            continue
        threshold = 2 * c_prime
        seen = set()
        for n in range(1, length):
            for start in range(length - n + 1):
                p = p_prime[start:start + n]
                if p in seen or p in excluded:
                    continue
                seen.add(p)
                if threshold > index.counts[p]:
                    excluded.add(p)
    return {p for p in index.counts if p not in excluded}


def semi_order_witness(p: Phrase, index: OccurrenceIndex):
    """A superstring excluding p from the semi-maximal set, or None."""
    p = tuple(p)
    by_len = defaultdict(list)
    for q in index.counts:
        by_len[len(q)].append(q)
    for n in range(len(p) + 1, index.max_n + 1):
        for q in sorted(by_len.get(n, ())):
            if semi_order(p, q, index):
                return q
    return None
