"""Simulated translator: resolves selected sentences and phrases to targets
using a held-out reference parallel corpus.

Sentence translations are verbatim reference lookups. Phrase translations are
extracted from aligned reference occurrences and decided by majority vote.
"""

import json
from dataclasses import dataclass

from .align import TranslationTable, align_pair, aligned_target_span, span_has_outside_links
from .corpus import ParallelCorpus, Phrase
from .errors import OracleGapError
from .ngrams import extract_ngrams


@dataclass
class OracleResponse:
    source: object  # sentence id or phrase tuple
    target: tuple[str, ...]
    provenance: tuple[int, ...]  # reference pair ids used
    votes: int = 1


def translate_sentences(selected_ids, reference: ParallelCorpus) -> list[OracleResponse]:
    ids = list(selected_ids)
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate sentence ids in selection (upstream invariant violated)")
    missing = [sid for sid in ids if sid not in reference]
    if missing:
        raise OracleGapError(missing)
    out = []
    for sid in ids:
        _, tgt = reference.get(sid)
        out.append(OracleResponse(sid, tgt.tokens, (sid,)))
    return out


def translate_phrases(phrases, reference: ParallelCorpus, table: TranslationTable):
    """Alignment-based phrase translation with majority vote over occurrences.

    Returns (responses, drops) where drops maps phrase -> reason
    ("not-in-reference" or "no-aligned-span").
    """
    phrases = [tuple(p) for p in phrases]
    if len(set(phrases)) != len(phrases):
        raise ValueError("duplicate phrases in selection (upstream invariant violated)")
    max_n = max((len(p) for p in phrases), default=1)
    index = extract_ngrams(reference.source_corpus(), max_n)

    align_cache = {}
    responses, drops = [], {}
    for p in phrases:
        occurrences = index.positions.get(p, [])
        if not occurrences:
            drops[p] = "not-in-reference"
            continue
        votes = {}
        for sid, start in occurrences:
            src, tgt = reference.get(sid)
            if sid not in align_cache:
                align_cache[sid] = align_pair(src.tokens, tgt.tokens, table)
            links = align_cache[sid]
            span = aligned_target_span(links, start, start + len(p))
            if span is None:
                continue
            j_min, j_max = span
            if span_has_outside_links(links, start, start + len(p), j_min, j_max):
                continue
            target = tgt.tokens[j_min:j_max + 1]
            count, prov = votes.get(target, (0, []))
            prov.append(sid)
            votes[target] = (count + 1, prov)
        if not votes:
            drops[p] = "no-aligned-span"
            continue
        target, (count, prov) = min(votes.items(), key=lambda kv: (-kv[1][0], len(kv[0]), kv[0]))
        responses.append(OracleResponse(p, target, tuple(sorted(set(prov))), votes=count))
    return responses, drops


def write_responses(responses, tsv_path, provenance_path, reference: ParallelCorpus = None):
    """TSV "source TAB target" plus a JSONL provenance sidecar.

    Sentence responses carry an id as their source unit; pass the reference
    corpus to resolve it to text for the TSV.
    """
    with open(tsv_path, "w", encoding="utf-8") as fh:
        for r in responses:
            if isinstance(r.source, tuple):
                src = " ".join(r.source)
            elif reference is not None:
                src = " ".join(reference.get(r.source)[0].tokens)
            else:
                src = str(r.source)
            fh.write(f"{src}\t{' '.join(r.target)}\n")
    with open(provenance_path, "w", encoding="utf-8") as fh:
        for r in responses:
            fh.write(json.dumps({
                "source": list(r.source) if isinstance(r.source, tuple) else r.source,
                "target": list(r.target),
                "provenance": list(r.provenance),
                "votes": r.votes,
            }) + "\n")
