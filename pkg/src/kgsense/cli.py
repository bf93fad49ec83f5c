"""Command-line front end: enrich sentences, train the toy LM, run the
evaluators, and inspect knowledge-graph neighbourhoods.

Diagnostics go to stderr and force a nonzero exit; data goes to stdout (or
``--output``) so the subcommands compose in pipelines.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import lm
from .embeddings import cosine, load_embeddings
from .enrich import Enricher
from .evaluate import analogy_accuracy, load_analogies, load_similarity, similarity_eval
from .extract import load_lexicon
from .graph import load_triples, top_k_extensions


def _require_file(path: str, flag: str) -> str:
    if not os.path.isfile(path):
        raise FileNotFoundError(f"{flag}: no such file: {path}")
    return path


def _read_lines(path: str | None):
    if path is None:
        return [line.rstrip("\n") for line in sys.stdin]
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\n") for line in fh]


def _write_lines(lines, path: str | None) -> None:
    if path is None:
        for line in lines:
            sys.stdout.write(line + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line + "\n")


def cmd_enrich(args: argparse.Namespace) -> int:
    store = load_embeddings(_require_file(args.embeddings, "--embeddings"))
    kg = load_triples(_require_file(args.kg, "--kg"))
    lexicon = load_lexicon(_require_file(args.lexicon, "--lexicon"))
    enricher = Enricher(store, kg, lexicon,
                               top_k=args.top_k, min_score=args.min_score)
    if args.input is not None:
        _require_file(args.input, "--input")
    sentences = _read_lines(args.input)
    enriched = enricher.enrich_batch(sentences, workers=args.workers)
    _write_lines([e.rendered for e in enriched], args.output)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    _require_file(args.input, "--input")
    raw = [line.split() for line in _read_lines(args.input)]
    raw = [sentence for sentence in raw if sentence]
    if not raw:
        raise ValueError("--input: corpus has no sentences")
    vocab = lm.build_vocab(raw)
    config = lm.LmConfig(
        vocab_size=len(vocab),
        embed_dim=args.embed_dim,
        hidden_dim=args.hidden_dim,
        kernel_width=args.kernel_width,
        stride=args.stride,
        learning_rate=args.lr,
        seed=args.seed,
        epochs=args.epochs,
    )
    params, trace = lm.train(lm.encode_corpus(raw, vocab), config)
    os.makedirs(args.output, exist_ok=True)
    vocab_path = os.path.join(args.output, "vocab.tsv")
    trace_path = os.path.join(args.output, "trace.tsv")
    params_path = os.path.join(args.output, "params.txt")
    lm.save_vocab(vocab, vocab_path)
    lm.save_trace(trace, trace_path)
    lm.save_parameters(params, params_path)
    print(f"vocab\t{len(vocab)}")
    print(f"sentences\t{len(raw)}")
    print(f"skipped\t{trace.skipped_sentences}")
    print(f"objective\t{trace.objectives[-1]!r}")
    print(f"perplexity\t{trace.final_perplexity!r}")
    print(f"written\t{vocab_path} {trace_path} {params_path}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    if args.analogies is None and args.similarity is None:
        raise ValueError("supply --analogies and/or --similarity")
    store = load_embeddings(_require_file(args.embeddings, "--embeddings"))
    rows: list[str] = []
    if args.analogies is not None:
        questions = load_analogies(_require_file(args.analogies, "--analogies"))
        scores = analogy_accuracy(questions, store)
        for name, value in (("semantic", scores.semantic),
                            ("syntactic", scores.syntactic),
                            ("average", scores.average)):
            if value is not None:
                rows.append(f"{name}\t{value}")
        rows.append(f"answered\t{scores.answered}")
    if args.similarity is not None:
        pairs = load_similarity(_require_file(args.similarity, "--similarity"))
        rho, covered = similarity_eval(pairs, store)
        rows.append(f"spearman\t{rho}")
        rows.append(f"covered\t{covered}")
    _write_lines(rows, args.output)
    return 0


def cmd_kg_neighbors(args: argparse.Namespace) -> int:
    kg = load_triples(_require_file(args.kg, "--kg"))
    store = load_embeddings(_require_file(args.embeddings, "--embeddings"))
    rows = [f"neighbor\t{n}" for n in sorted(kg.one_hop_neighbors(args.entity))]
    for candidate in top_k_extensions(kg, store, args.entity, k=args.top_k):
        vec = store.lookup(candidate)
        score = cosine(vec, store.lookup(args.entity))
        rows.append(f"candidate\t{candidate}\t{score}")
    _write_lines(rows, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgsense",
        description="Knowledge-graph sense annotation and a toy bidirectional LM.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enrich", help="annotate noun entities with graph senses")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--kg", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--input", default=None, help="sentence-per-line file (default stdin)")
    p.add_argument("--output", default=None, help="output file (default stdout)")
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--min-score", type=float, default=None)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--seed", type=int, default=0, help="unused; enrichment is deterministic")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("train", help="train the toy bidirectional LM")
    p.add_argument("--input", required=True, help="corpus, one sentence per line")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--embed-dim", type=int, default=16)
    p.add_argument("--hidden-dim", type=int, default=16)
    p.add_argument("--kernel-width", type=int, default=3)
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="word analogy and similarity benchmarks")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--analogies", default=None)
    p.add_argument("--similarity", default=None)
    p.add_argument("--output", default=None)
    p.add_argument("--seed", type=int, default=0, help="unused; evaluation is deterministic")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("kg-neighbors", help="inspect one-hop set and top-k candidates")
    p.add_argument("entity")
    p.add_argument("--kg", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--top-k", type=int, default=3)
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_kg_neighbors)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"kgsense: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
