"""Command-line front end: stats, train, evaluate, sweep, elbow, predict, serve.

Exit codes: 0 success, 1 runtime failure (missing files, bad data),
2 usage error (bad flags or invalid parameter values).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import artifact as _artifact
from . import cluster_semantifier as cs
from . import evaluation as _evaluation
from . import kmeans as _kmeans
from . import label_semantifier as ls
from .corpus import (
    Corpus,
    CorpusError,
    corpus_stats,
    load_blocklist,
    load_corpus,
    prune_partially_ontologized,
    split_folds,
    top_predicate_subset,
)
from .vectorizer import TfidfVectorizer

__all__ = ["main", "parse_range"]


def parse_range(spec: str) -> list[int]:
    """``start:stop:step`` (inclusive stop when aligned), ``start:stop``,
    or a single integer."""
    parts = spec.split(":")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer range: {spec!r}") from None
    if len(values) == 1:
        return values
    if len(values) == 2:
        start, stop = values
        step = 1
    elif len(values) == 3:
        start, stop, step = values
    else:
        raise argparse.ArgumentTypeError(f"too many ':' in range: {spec!r}")
    if step < 1:
        raise argparse.ArgumentTypeError(f"range step must be >= 1: {spec!r}")
    if stop < start:
        raise argparse.ArgumentTypeError(f"range stop is below start: {spec!r}")
    return list(range(start, stop + 1, step))


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def _load(args) -> Corpus:
    corpus = load_corpus(args.corpus)
    blocklist = load_blocklist(args.blocklist) if getattr(args, "blocklist", None) else frozenset()
    if getattr(args, "pruned", False) or blocklist:
        corpus = prune_partially_ontologized(corpus, blocklist)
    return corpus


def _cmd_stats(args) -> int:
    corpus = _load(args)
    stats = corpus_stats(corpus)
    payload = {
        "assays": len(corpus),
        "statements_per_assay": {
            "avg": stats.avg_rounded,
            "avg_exact": float(stats.avg),
            "min": stats.min,
            "max": stats.max,
        },
        "unique_statements": stats.total_unique,
    }
    if args.top_n is not None:
        subset = top_predicate_subset(corpus, args.top_n)
        count = len(subset.statement_universe)
        payload["top_n"] = {
            "n": args.top_n,
            "unique_statements": count,
            "pct_of_corpus": round(100.0 * count / stats.total_unique, 1),
        }
    if args.format == "json":
        _print_json(payload)
    else:
        print(f"{'assays':<22}{len(corpus)}")
        print(
            f"{'stmts/assay':<22}avg {stats.avg_rounded}  min {stats.min}  max {stats.max}"
        )
        print(f"{'unique statements':<22}{stats.total_unique}")
        if args.top_n is not None:
            top = payload["top_n"]
            print(
                f"{f'top {args.top_n} predicates':<22}"
                f"{top['unique_statements']} ({top['pct_of_corpus']})"
            )
    return 0


def _cmd_train(args) -> int:
    corpus = _load(args)
    assays = list(corpus.assays)
    if args.method == "cluster":
        model = cs.fit_semantifier(
            assays,
            k=args.k,
            seed=args.seed,
            max_iter=args.max_iter,
            tol=args.tol,
            restarts=args.restarts,
            default_threshold=args.threshold,
        )
        config = _evaluation.ClusterConfig(
            k=args.k,
            threshold=args.threshold,
            seed=args.seed,
            max_iter=args.max_iter,
            tol=args.tol,
            restarts=args.restarts,
        ).to_dict()
    else:
        model = ls.train_labeler(
            assays,
            rf_count=args.rf,
            seed=args.seed,
            epochs=args.epochs,
            lr=args.lr,
            decision_threshold=args.decision_threshold,
        )
        config = _evaluation.LabelerConfig(
            rf_count=args.rf,
            epochs=args.epochs,
            lr=args.lr,
            decision_threshold=args.decision_threshold,
            seed=args.seed,
        ).to_dict()
    _artifact.save_artifact(
        model,
        args.out,
        corpus_fingerprint=_artifact.fingerprint_corpus(corpus),
        config=config,
    )
    print(f"wrote {args.out}")
    return 0


def _method_config(args):
    if args.method == "cluster":
        return _evaluation.ClusterConfig(
            k=args.k,
            threshold=args.threshold,
            seed=args.seed,
            max_iter=args.max_iter,
            tol=args.tol,
            restarts=args.restarts,
        )
    return _evaluation.LabelerConfig(
        rf_count=args.rf,
        epochs=args.epochs,
        lr=args.lr,
        decision_threshold=args.decision_threshold,
        seed=args.seed,
    )


def _cmd_evaluate(args) -> int:
    corpus = _load(args)
    folds = split_folds(corpus, args.train_size, args.test_size, args.folds_seed)
    report = _evaluation.cross_validate(corpus, _method_config(args), folds)
    if args.format == "json":
        _print_json(report.to_dict())
    else:
        print(_evaluation.render_eval_table(report))
    return 0


def _cmd_sweep(args) -> int:
    corpus = _load(args)
    folds = split_folds(corpus, args.train_size, args.test_size, args.folds_seed)
    per_fold = []
    for fold in folds.folds:
        train = corpus.subset(fold.train_ids)
        test = corpus.subset(fold.test_ids)
        per_fold.append(
            cs.sweep(
                train,
                test,
                k_grid=args.k,
                thresholds=args.thresholds,
                seed=args.seed,
                max_iter=args.max_iter,
                tol=args.tol,
                restarts=args.restarts,
            )
        )
    n_folds = len(per_fold)
    cells = tuple(
        tuple(
            tuple(
                sum(fold.cells[i][j][m] for fold in per_fold) / n_folds for m in range(3)
            )
            for j in range(len(args.thresholds))
        )
        for i in range(len(args.k))
    )
    payload = {
        "k_grid": list(args.k),
        "thresholds": list(args.thresholds),
        "aggregation": "micro per fold, arithmetic mean over folds",
        "rows": [
            {
                "k": k,
                "cells": [
                    {
                        "threshold": t,
                        "precision": cells[i][j][0],
                        "recall": cells[i][j][1],
                        "f1": cells[i][j][2],
                    }
                    for j, t in enumerate(args.thresholds)
                ],
            }
            for i, k in enumerate(args.k)
        ],
        "config": {
            "seed": args.seed,
            "folds_seed": args.folds_seed,
            "train_size": args.train_size,
            "test_size": args.test_size,
            "max_iter": args.max_iter,
            "tol": args.tol,
            "restarts": args.restarts,
        },
    }
    if args.format == "json":
        _print_json(payload)
    else:
        print(_evaluation.render_sweep_table(args.k, args.thresholds, cells))
    return 0


def _curve_svg(curve: list[tuple[int, float]], selected: int) -> str:
    width, height, margin = 640, 400, 50
    ks = [float(k) for k, _ in curve]
    ys = [float(v) for _, v in curve]
    k_span = max(ks) - min(ks) or 1.0
    y_span = max(ys) - min(ys) or 1.0

    def sx(k: float) -> float:
        return margin + (k - min(ks)) / k_span * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - min(ys)) / y_span * (height - 2 * margin)

    points = " ".join(f"{sx(k):.1f},{sy(y):.1f}" for k, y in zip(ks, ys))
    dots = "\n".join(
        f'<circle cx="{sx(k):.1f}" cy="{sy(y):.1f}" r="4" '
        f'fill="{"#d62728" if int(k) == selected else "#1f77b4"}"/>'
        for k, y in zip(ks, ys)
    )
    labels = "\n".join(
        f'<text x="{sx(k):.1f}" y="{height - margin + 20}" font-size="12" '
        f'text-anchor="middle">{int(k)}</text>'
        for k in ks
    )
    return f"""<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">
<rect width="{width}" height="{height}" fill="white"/>
<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>
<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>
<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="2"/>
{dots}
{labels}
<text x="{width / 2:.0f}" y="{height - 10}" font-size="13" text-anchor="middle">k</text>
<text x="15" y="{height / 2:.0f}" font-size="13" text-anchor="middle" transform="rotate(-90 15 {height / 2:.0f})">inertia</text>
<text x="{width / 2:.0f}" y="25" font-size="14" text-anchor="middle">inertia curve (selected k = {selected})</text>
</svg>
"""


def _cmd_elbow(args) -> int:
    if len(args.k) < 3:
        raise ValueError("elbow selection needs at least 3 grid points")
    corpus = _load(args)
    vectors = TfidfVectorizer().fit_transform([a.text for a in corpus.assays])
    curve = _kmeans.inertia_curve(
        vectors,
        args.k,
        seed=args.seed,
        max_iter=args.max_iter,
        tol=args.tol,
        restarts=args.restarts,
    )
    selected = _kmeans.elbow_select(curve)
    if args.plot:
        Path(args.plot).write_text(_curve_svg(curve, selected), encoding="utf-8")
    if args.format == "json":
        _print_json(
            {
                "selected_k": selected,
                "curve": [{"k": k, "inertia": v} for k, v in curve],
                "seed": args.seed,
                "restarts": args.restarts,
            }
        )
    else:
        print(f"selected k = {selected}")
        for k, v in curve:
            marker = " <-- selected" if k == selected else ""
            print(f"{k:>5}  {v:>14.6f}{marker}")
    return 0


def _cmd_predict(args) -> int:
    model = _artifact.load_artifact(args.model)
    text = Path(args.text_file).read_text(encoding="utf-8")
    if isinstance(model, cs.ClusterSemantifier):
        threshold = int(args.threshold) if args.threshold is not None else None
        statements = cs.predict(model, text, threshold)
    else:
        threshold = float(args.threshold) if args.threshold is not None else None
        statements = ls.predict_set(model, text, decision_threshold=threshold)
    for stmt in sorted(statements, key=lambda s: s.key):
        print(
            json.dumps(
                {"predicate": stmt.predicate, "value": stmt.value, "ontologized": stmt.ontologized},
                sort_keys=True,
                ensure_ascii=False,
            )
        )
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"--bind must look like addr:port, got {args.bind!r}")
    app = create_app(args.data_dir, model_path=args.model, static_dir=args.static_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
    return 0


def _add_corpus_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--corpus", required=True, help="corpus JSONL path")
    sub.add_argument("--pruned", action="store_true", help="drop non-ontologized statements")
    sub.add_argument("--blocklist", help="predicate blocklist file (implies --pruned)")


def _add_method_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--method", required=True, choices=["cluster", "labeler"])
    sub.add_argument("--k", type=int, default=8, help="cluster count (cluster method)")
    sub.add_argument("--threshold", type=int, default=1, help="statement frequency threshold")
    sub.add_argument("--max-iter", type=int, default=300)
    sub.add_argument("--tol", type=float, default=1e-4)
    sub.add_argument("--restarts", type=int, default=1)
    sub.add_argument("--rf", type=int, default=170, help="negatives per assay (labeler method)")
    sub.add_argument("--epochs", type=int, default=200)
    sub.add_argument("--lr", type=float, default=0.5)
    sub.add_argument("--decision-threshold", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semassay",
        description="Bioassay semantification: train, evaluate, and serve statement predictors",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("stats", help="corpus statistics")
    _add_corpus_flags(p)
    p.add_argument("--top-n", type=int, default=None, help="report the top-N predicate subset")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=_cmd_stats)

    p = subparsers.add_parser("train", help="fit a model and write the artifact")
    _add_corpus_flags(p)
    _add_method_flags(p)
    p.add_argument("--out", required=True, help="artifact output path")
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=_cmd_train)

    p = subparsers.add_parser("evaluate", help="3-fold cross-validation")
    _add_corpus_flags(p)
    _add_method_flags(p)
    p.add_argument("--folds-seed", type=int, default=7)
    p.add_argument("--train-size", type=int, default=600)
    p.add_argument("--test-size", type=int, default=300)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=_cmd_evaluate)

    p = subparsers.add_parser("sweep", help="P/R/F1 grid over k and thresholds")
    _add_corpus_flags(p)
    p.add_argument("--k", type=parse_range, default=parse_range("50:600:50"))
    p.add_argument("--thresholds", type=parse_range, default=parse_range("1:5"))
    p.add_argument("--folds-seed", type=int, default=7)
    p.add_argument("--train-size", type=int, default=600)
    p.add_argument("--test-size", type=int, default=300)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=_cmd_sweep)

    p = subparsers.add_parser("elbow", help="inertia curve and knee-point k")
    _add_corpus_flags(p)
    p.add_argument("--k", type=parse_range, default=parse_range("1:8"))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--plot", help="write the curve as an SVG file")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=_cmd_elbow)

    p = subparsers.add_parser("predict", help="semantify a text file with a trained artifact")
    p.add_argument("--model", required=True, help="artifact path")
    p.add_argument("--text-file", required=True)
    p.add_argument("--threshold", default=None)
    p.set_defaults(func=_cmd_predict)

    p = subparsers.add_parser("serve", help="run the REST curation service")
    p.add_argument("--model", default=None, help="artifact to activate at startup")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--bind", default="127.0.0.1:8000")
    p.add_argument("--static-dir", default=None, help="directory with the curation UI build")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, CorpusError, _artifact.ArtifactError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
