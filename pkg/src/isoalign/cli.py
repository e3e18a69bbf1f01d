"""Command line front end.

One executable, ``isoalign``, with a subcommand per pipeline stage: corpus
sampling, embedding training, alignment, retrieval evaluation, the isometry
metrics, full experiment grids and reporting over the collected records.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import align as align_mod
from . import bli as bli_mod
from . import isometry
from .corpus import (
    read_doc_alignment,
    read_doc_corpus,
    shuffle_sample,
    topic_adjusted_sample,
    write_doc_corpus,
)
from .dictionaries import read_dictionary
from .experiment import ExperimentConfig, run_experiment
from .plotting import emit_plot
from .preprocess import apply_chain, chain_label
from .results import format_gap_table, gap_report, read_records
from .sgns import TrainConfig, train
from .spaces import load_embeddings, save_embeddings


def _add_train_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=15)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--min-count", type=int, default=5)
    p.add_argument("--subsample", type=float, default=1e-4)
    p.add_argument("--no-subwords", action="store_true")
    p.add_argument("--seed", type=int, default=1)


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        dim=args.dim,
        window=args.window,
        negatives=args.negatives,
        learning_rate=args.lr,
        epochs=args.epochs,
        min_count=args.min_count,
        subsample_t=args.subsample,
        subwords=not args.no_subwords,
        seed=args.seed,
    )


def cmd_train(args: argparse.Namespace) -> int:
    plan = sorted(args.budgets) if args.budgets else None
    result = train(args.corpus, _train_config(args), snapshot_plan=plan)
    prefix = Path(args.out)
    for snap in result.snapshots:
        path = prefix.with_name(f"{prefix.name}.{snap.budget}.vec")
        save_embeddings(snap.space, path)
        print(f"{path}  budget={snap.budget} consumed={snap.consumed}")
    final_path = prefix.with_name(prefix.name + ".final.vec")
    save_embeddings(result.final, final_path)
    print(f"{final_path}  consumed={result.consumed_tokens}")
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    lines = [
        ln for ln in Path(args.corpus).read_text(encoding="utf-8").splitlines()
        if ln.strip()
    ]
    for size, sampled in shuffle_sample(lines, args.sizes, seed=args.seed):
        path = Path(f"{args.out}.{size}.txt")
        path.write_text("".join(s + "\n" for s in sampled), encoding="utf-8")
        print(f"{path}  sentences={len(sampled)}")
    return 0


def cmd_topic_sample(args: argparse.Namespace) -> int:
    corpus = read_doc_corpus(args.corpus)
    partner = read_doc_corpus(args.aligned)
    alignment = read_doc_alignment(args.alignment)
    sampled, report = topic_adjusted_sample(
        corpus, partner, alignment, seed=args.seed
    )
    write_doc_corpus(sampled, args.out)
    print(
        f"{args.out}  docs={len(sampled.documents)} "
        f"tokens={report.total_selected}/{report.total_budget}"
    )
    for d in report.per_doc:
        if d.shortfall:
            print(f"shortfall {d.doc_id}: budget {d.budget}, selected {d.selected_tokens}")
    return 0


def cmd_align(args: argparse.Namespace) -> int:
    src = apply_chain(load_embeddings(args.source), args.preproc)
    tgt = apply_chain(load_embeddings(args.target), args.preproc)
    pairs = read_dictionary(args.dict)
    if args.dict_size:
        pairs = pairs.head(args.dict_size)
    if args.selflearn:
        mapping = align_mod.self_learn(
            src, tgt, pairs, top_f=args.topf, max_rounds=args.rounds
        )
        sizes = ",".join(str(s) for s in mapping.induced_sizes)
        print(f"self-learning: {mapping.iterations} rounds, induced sizes [{sizes}]")
    else:
        mapping = align_mod.procrustes(src, tgt, pairs)
    print(f"rotation solved on {mapping.trained_on} dictionary pairs")
    save_embeddings(align_mod.apply_map(src, mapping), args.out)
    print(args.out)
    if args.save_map:
        np.savetxt(args.save_map, mapping.w)
    return 0


def cmd_bli(args: argparse.Namespace) -> int:
    src = load_embeddings(args.source)
    tgt = load_embeddings(args.target)
    test = read_dictionary(args.dict)
    report = bli_mod.evaluate_mrr(src, tgt, test, cutoff=args.cutoff)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        out.write("query,gold,rank,rr\n")
        for r in report.results:
            out.write(f"{r.query},{';'.join(r.gold)},{r.rank},{r.rr:.10g}\n")
    finally:
        if args.out:
            out.close()
    print(
        f"mrr={report.mrr:.10g} coverage={report.coverage.fraction:.10g} "
        f"n={report.n_queries}"
    )
    for label in sorted(report.bin_mrr):
        print(f"bin {label}: mrr={report.bin_mrr[label]:.10g}")
    return 0


def cmd_iso(args: argparse.Namespace) -> int:
    src = apply_chain(load_embeddings(args.source), args.preproc)
    tgt = apply_chain(load_embeddings(args.target), args.preproc)
    label = chain_label(args.preproc)
    n_top = min(args.topn, len(src), len(tgt))
    print("metric,n_top,k,preproc,value")
    for metric in args.metrics.split(","):
        if metric == "evs":
            res = isometry.evs(src, tgt, n_top=n_top, k=args.knn)
            print(f"evs,{n_top},{res.k},{label},{res.delta:.10g}")
        elif metric == "gh":
            value = isometry.gh(src, tgt, n_top=n_top)
            print(f"gh,{n_top},,{label},{value:.10g}")
        elif metric == "rsim":
            pairs = read_dictionary(args.dict)
            value = isometry.rsim(
                src, tgt, pairs, m_pairs=args.pairs, seed=args.seed
            )
            print(f"rsim,{args.pairs},,{label},{value:.10g}")
        else:
            raise SystemExit(f"unknown metric {metric!r}")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    summary = run_experiment(config, log=lambda msg: print(msg, flush=True))
    print(
        f"done={summary.done} skipped={summary.skipped} failed={summary.failed}"
    )
    print(f"records: {summary.records_path}")
    return summary.exit_code


def cmd_gap(args: argparse.Namespace) -> int:
    records = read_records(args.records)
    report = gap_report(records, args.pair_a, args.pair_b, metric=args.metric)
    print(format_gap_table(report, args.pair_a, args.pair_b))
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    records = read_records(args.records)
    _, stats = emit_plot(
        records,
        x=args.x,
        y=args.y,
        series=tuple(args.series.split(",")),
        log_x=args.log_x,
        fit=args.fit,
        out=args.out,
        title=args.title,
    )
    print(args.out)
    if stats is not None:
        print(
            f"slope={stats['slope']:.10g} intercept={stats['intercept']:.10g} "
            f"spearman={stats['spearman']:.4f} pearson={stats['pearson']:.4f}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isoalign",
        description="Train, align and compare monolingual embedding spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train embeddings, optionally with token-budget snapshots")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="output prefix for .vec files")
    p.add_argument("--budgets", type=int, nargs="+", default=None,
                   help="raw-token budgets to snapshot at")
    _add_train_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="nested random sentence samples of a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--sizes", type=int, nargs="+", required=True)
    p.add_argument("--out", required=True, help="output prefix")
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("topic-sample", help="sample keeping per-document token budgets of an aligned corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--aligned", required=True, help="partner corpus providing budgets")
    p.add_argument("--alignment", required=True, help="TSV of doc-id pairs")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=cmd_topic_sample)

    p = sub.add_parser("align", help="map a source space onto a target space")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--dict", required=True)
    p.add_argument("--dict-size", type=int, default=0, help="0 keeps every pair")
    p.add_argument("--out", required=True, help="mapped source .vec")
    p.add_argument("--save-map", default=None, help="also write the rotation matrix")
    p.add_argument("--preproc", default="l2+mc+l2")
    p.add_argument("--selflearn", action="store_true")
    p.add_argument("--topf", type=int, default=10_000)
    p.add_argument("--rounds", type=int, default=10)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("bli", help="dictionary induction scores for a mapped space")
    p.add_argument("--source", required=True, help="mapped source .vec")
    p.add_argument("--target", required=True)
    p.add_argument("--dict", required=True, help="test dictionary")
    p.add_argument("--cutoff", type=int, default=10)
    p.add_argument("--out", default=None, help="per-query CSV (default stdout)")
    p.set_defaults(func=cmd_bli)

    p = sub.add_parser("iso", help="isometry metrics between two spaces")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--metrics", default="evs,gh", help="comma list: evs,gh,rsim")
    p.add_argument("--dict", default=None, help="translations, needed for rsim")
    p.add_argument("--preproc", default="unnorm")
    p.add_argument("--topn", type=int, default=1000)
    p.add_argument("--knn", type=int, default=10)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_iso)

    p = sub.add_parser("experiment", help="run a config-driven grid")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("gap", help="seed-averaged score gaps between two pairs")
    p.add_argument("--records", required=True)
    p.add_argument("--pair-a", required=True)
    p.add_argument("--pair-b", required=True)
    p.add_argument("--metric", default="mrr")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("plot", help="deterministic SVG of records, optional fit")
    p.add_argument("--records", required=True)
    p.add_argument("--x", default="value")
    p.add_argument("--y", default="mrr")
    p.add_argument("--series", default="pair")
    p.add_argument("--log-x", action="store_true")
    p.add_argument("--fit", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--title", default="")
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
