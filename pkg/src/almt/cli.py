"""Command-line interface.

Exit codes: 0 success, 2 validation failure, 3 stage failure.
"""

import argparse
import json
import sys

from . import align, analyze, mix, oracle, select, toy
from .corpus import load_corpus, load_parallel, tokenize
from .embed import EmbeddingStore
from .errors import AlmtError, ConfigError
from .ngrams import extract_ngrams
from .pipeline import RunConfig, run_pipeline, validate_config


def _cmd_extract(args):
    corpus = load_corpus(args.input)
    index = extract_ngrams(corpus, args.max_n)
    index.export_tsv(args.output)
    print(f"{len(index)} phrases (max_n={args.max_n}) -> {args.output}")
    return 0


def _cmd_select(args):
    U = load_corpus(args.unlabeled, "U")
    if args.strategy == "random-sent":
        result = select.select_random_sentences(U, args.budget_words, args.seed)
    elif args.strategy == "csse":
        store_U = EmbeddingStore.load(args.embeddings_unlabeled, "U")
        store_L = EmbeddingStore.load(args.embeddings_labeled, "L")
        result = select.select_csse(U, store_U, store_L, args.budget_words,
                                    args.k, args.dist_mode)
    elif args.strategy == "rttl":
        if not args.rttl_scores:
            raise ConfigError("--rttl-scores is required for strategy rttl")
        result = select.select_rttl(U, select.load_rttl_scores(args.rttl_scores),
                                    args.budget_words)
    else:
        index_U = extract_ngrams(U, args.max_n)
        L = load_parallel(args.labeled, "L")
        index_L = extract_ngrams(L.source_corpus(), args.max_n)
        if args.strategy == "random-phrase":
            result = select.select_random_phrases(index_U, index_L, args.budget_words, args.seed)
        elif args.strategy == "ngf":
            result = select.select_ngf(index_U, index_L, args.budget_words)
        else:
            result = select.select_ngf_smp(index_U, index_L, args.budget_words)
    result.write_jsonl(args.output)
    print(json.dumps(result.summary()))
    return 0


def _load_selection(path):
    sentence_ids, phrases = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            rec = json.loads(line)
            if rec["kind"] == "sentence":
                sentence_ids.append(rec["id"])
            else:
                phrases.append(tuple(rec["tokens"]))
    return sentence_ids, phrases


def _cmd_oracle(args):
    reference = load_parallel(args.reference, "ref")
    L = load_parallel(args.labeled, "L")
    table = align.train_ibm1(L, args.iterations)
    sentence_ids, phrases = _load_selection(args.selection)
    l_s = oracle.translate_sentences(sentence_ids, reference)
    l_p, drops = oracle.translate_phrases(phrases, reference, table)
    oracle.write_responses(l_s, f"{args.output_prefix}.sentences.tsv",
                           f"{args.output_prefix}.sentences.provenance.jsonl", reference)
    oracle.write_responses(l_p, f"{args.output_prefix}.phrases.tsv",
                           f"{args.output_prefix}.phrases.provenance.jsonl")
    print(json.dumps({"sentences": len(l_s), "phrases": len(l_p),
                      "dropped": {" ".join(p): r for p, r in drops.items()}}))
    return 0


def _cmd_mix(args):
    L = load_parallel(args.labeled, "L")
    if args.policy == "sample":
        rows = mix.sample_random(L, args.size, args.seed)
    else:
        store_L = EmbeddingStore.load(args.embeddings_labeled, "L")
        store_U = EmbeddingStore.load(args.embeddings_unlabeled, "U")
        rows, skipped = mix.retrieve_similar(L, store_L, store_U, args.k, args.size)
        if skipped:
            print(f"skipped {len(skipped)} degenerate pairs", file=sys.stderr)
    mix.write_freeze(rows, args.output)
    with open(args.output + ".tsv", "w", encoding="utf-8") as fh:
        for _, src, tgt in rows:
            fh.write(" ".join(src) + "\t" + " ".join(tgt) + "\n")
    print(f"{len(rows)} pairs -> {args.output}")
    return 0


def _cmd_analyze(args):
    if args.mode == "correlation":
        columns = []
        with open(args.input, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                vals = [float(v) for v in line.rstrip("\n").split("\t")]
                if not columns:
                    columns = [[] for _ in vals]
                for col, v in zip(columns, vals):
                    col.append(v)
        *coverage_cols, score_col = columns
        rs = [analyze.pearson(col, score_col) for col in coverage_cols]
        print("\t".join(f"{r:.6f}" for r in rs))
    elif args.mode == "coverage":
        covering = [s.tokens for s in load_corpus(args.covering)]
        test = [s.tokens for s in load_corpus(args.test)]
        report = analyze.ngram_coverage(covering, test, args.max_n,
                                        token_level=args.token_level)
        print(json.dumps({str(n): round(v, 4) for n, v in report.per_n.items()}))
    elif args.mode == "bleu":
        hyp = load_corpus(args.hypotheses)
        ref = load_corpus(args.references)
        for r in ref:
            score = analyze.sentence_bleu(hyp.get(r.id).tokens, r.tokens) if r.id in hyp else 0.0
            print(f"{r.id}\t{score:.4f}")
    elif args.mode == "wordstats":
        stats = analyze.in_domain_word_stats(
            [s.tokens for s in load_corpus(args.selected)],
            [s.tokens for s in load_corpus(args.ood)],
            [s.tokens for s in load_corpus(args.test)])
        print(json.dumps({"IDWT": stats.idwt, "WT": stats.wt, "IDWC": stats.idwc,
                          "WC": stats.wc, "IDWT/WT": round(stats.type_ratio, 2),
                          "IDWC/WC": round(stats.count_ratio, 2)}))
    elif args.mode == "length-ratio":
        hyp = load_corpus(args.hypotheses)
        ref = load_corpus(args.references)
        print(f"{analyze.length_ratio(hyp, ref):.6f}")
    return 0


def _cmd_validate(args):
    config = RunConfig.load(args.config)
    failures = validate_config(config)
    for f in failures:
        print(f"FAIL: {f}")
    if failures:
        return 2
    print("config valid")
    return 0


def _cmd_pipeline(args):
    config = RunConfig.load(args.config)
    if args.simulate_only:
        config.simulate_only = True
    failures = validate_config(config)
    if failures:
        for f in failures:
            print(f"FAIL: {f}", file=sys.stderr)
        return 2
    try:
        reports = run_pipeline(config, budget=args.budget)
    except ConfigError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return 3
    for report in reports:
        print(json.dumps({"budget": report.budget, "counts": report.counts,
                          "ledger": report.ledger}))
    return 0


def _cmd_make_toy(args):
    config = toy.generate(args.output_dir, seed=args.seed)
    print(json.dumps(config, indent=2))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="almt",
                                     description="Budgeted active-learning data selection for MT domain adaptation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="build and export an n-gram index")
    p.add_argument("--input", required=True)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("select", help="run one selection strategy")
    p.add_argument("--strategy", required=True,
                   choices=["random-sent", "csse", "rttl", "random-phrase", "ngf", "ngf-smp"])
    p.add_argument("--unlabeled", required=True)
    p.add_argument("--labeled")
    p.add_argument("--budget-words", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--rttl-scores")
    p.add_argument("--dist-mode", choices=["literal", "nn"], default="literal")
    p.add_argument("--embeddings-unlabeled")
    p.add_argument("--embeddings-labeled")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("oracle", help="simulate translation of a selection")
    p.add_argument("--selection", required=True)
    p.add_argument("--reference", required=True)
    p.add_argument("--labeled", required=True)
    p.add_argument("--iterations", type=int, default=5)
    p.add_argument("--output-prefix", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("mix", help="sample or retrieve out-of-domain pairs")
    p.add_argument("--labeled", required=True)
    p.add_argument("--policy", choices=["sample", "retrieve"], default="retrieve")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--embeddings-labeled")
    p.add_argument("--embeddings-unlabeled")
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_mix)

    p = sub.add_parser("analyze", help="diagnostic metrics")
    p.add_argument("mode", choices=["coverage", "correlation", "bleu", "wordstats", "length-ratio"])
    p.add_argument("--input", help="TSV of coverage columns + score column (correlation)")
    p.add_argument("--covering")
    p.add_argument("--test")
    p.add_argument("--max-n", type=int, default=4)
    p.add_argument("--token-level", action="store_true")
    p.add_argument("--hypotheses")
    p.add_argument("--references")
    p.add_argument("--selected")
    p.add_argument("--ood")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("pipeline", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--budget", type=int, help="override the config's budget list with one budget")
    p.add_argument("--simulate-only", action="store_true")
    p.set_defaults(func=_cmd_pipeline)

    p = sub.add_parser("validate", help="validate a config file without running")
    p.add_argument("--config", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("make-toy", help="generate the bundled toy fixture")
    p.add_argument("--output-dir", required=True)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=_cmd_make_toy)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return 2
    except AlmtError as exc:
        print(f"stage failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
