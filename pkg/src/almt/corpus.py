"""Corpus data model, tokenization, IO, and the word-count cost model.

All budgets are charged in whitespace tokens; punctuation counts (corpora are
assumed pre-tokenized upstream). Token identity is case-sensitive.
"""

from dataclasses import dataclass
from pathlib import Path

from .errors import ParseError

# A phrase is just a contiguous token sequence, kept as a hashable tuple.
Phrase = tuple[str, ...]


class BlankLineError(ValueError):
    """Raised by tokenize() for lines that are empty after trimming."""


@dataclass(frozen=True)
class Sentence:
    id: int
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError(f"sentence {self.id} has no tokens")

    def __len__(self):
        return len(self.tokens)


def tokenize(raw_line: str) -> tuple[str, ...]:
    """Split a line into maximal non-whitespace runs."""
    tokens = raw_line.split()
    if not tokens:
        raise BlankLineError("line is empty after trimming")
    return tuple(tokens)


def cost(unit) -> int:
    """Annotation cost of a Sentence or Phrase, in words."""
    if isinstance(unit, Sentence):
        return len(unit.tokens)
    return len(unit)


class Corpus:
    """Ordered, id-addressable collection of monolingual sentences.

    Immutable after construction; ids are unique and iteration order is the
    insertion order.
    """

    def __init__(self, sentences, name=""):
        self.name = name
        self.sentences = list(sentences)
        self._by_id = {}
        for s in self.sentences:
            if s.id in self._by_id:
                raise ValueError(f"duplicate sentence id {s.id} in corpus {name!r}")
            self._by_id[s.id] = s

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)

    def __contains__(self, sid):
        return sid in self._by_id

    def get(self, sid) -> Sentence:
        return self._by_id[sid]

    def ids(self):
        return [s.id for s in self.sentences]

    def total_words(self) -> int:
        return sum(len(s.tokens) for s in self.sentences)


class ParallelCorpus:
    """Ordered collection of id-aligned (source, target) sentence pairs."""

    def __init__(self, pairs, name=""):
        self.name = name
        self.pairs = list(pairs)
        self._by_id = {}
        for src, tgt in self.pairs:
            if src.id != tgt.id:
                raise ValueError(f"pair ids differ: {src.id} vs {tgt.id}")
            if src.id in self._by_id:
                raise ValueError(f"duplicate pair id {src.id} in corpus {name!r}")
            self._by_id[src.id] = (src, tgt)

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, sid):
        return sid in self._by_id

    def get(self, sid):
        return self._by_id[sid]

    def ids(self):
        return [src.id for src, _ in self.pairs]

    def source_corpus(self, name=None) -> Corpus:
        return Corpus([src for src, _ in self.pairs], name or f"{self.name}-src")

    def target_corpus(self, name=None) -> Corpus:
        return Corpus([tgt for _, tgt in self.pairs], name or f"{self.name}-tgt")


def load_corpus(path, name="") -> Corpus:
    """Load a one-sentence-per-line UTF-8 file; ids are 0-based line indices.

    Blank lines are skipped but their line numbers stay reserved, so ids always
    match the original file.
    """
    path = Path(path)
    sentences = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            try:
                tokens = tokenize(line)
            except BlankLineError:
                continue
            sentences.append(Sentence(lineno, tokens))
    return Corpus(sentences, name or path.stem)


def load_parallel(path, name="") -> ParallelCorpus:
    """Load a two-column TSV (source TAB target), one pair per line."""
    path = Path(path)
    pairs = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            if not line.strip():
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) != 2:
                raise ParseError(f"{path}:{lineno + 1}: expected 2 TSV columns, got {len(cols)}")
            try:
                src = tokenize(cols[0])
                tgt = tokenize(cols[1])
            except BlankLineError:
                raise ParseError(f"{path}:{lineno + 1}: empty source or target column")
            pairs.append((Sentence(lineno, src), Sentence(lineno, tgt)))
    return ParallelCorpus(pairs, name or path.stem)
