"""Set-prediction scoring, 3-fold cross-validation, and prediction timing.

Scores are micro-aggregated within a fold (tp/fp/fn summed over test assays
before computing P/R/F1) and fold metrics are then averaged arithmetically.
Empty predictions score P = 0 so F1 is total.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .corpus import Bioassay, Corpus, FoldSplit

__all__ = [
    "SetScore",
    "EvalReport",
    "TimingStats",
    "ClusterConfig",
    "LabelerConfig",
    "score_sets",
    "aggregate_micro",
    "cross_validate",
    "timing_report",
    "render_eval_table",
    "render_sweep_table",
]


@dataclass(frozen=True)
class SetScore:
    tp: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        if self.tp < 0 or self.fp < 0 or self.fn < 0:
            raise ValueError("counts must be nonnegative")


def score_sets(pred: set[str] | frozenset[str], gold: set[str] | frozenset[str]) -> SetScore:
    """tp = |pred ∩ gold|, fp = |pred \\ gold|, fn = |gold \\ pred|."""
    tp = len(pred & gold)
    return SetScore(tp=tp, fp=len(pred) - tp, fn=len(gold) - tp)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def aggregate_micro(scores: Sequence[SetScore]) -> tuple[float, float, float]:
    """Sum tp/fp/fn across assays, then compute P/R/F1 once."""
    if not scores:
        raise ValueError("no scores to aggregate")
    tp = sum(s.tp for s in scores)
    fp = sum(s.fp for s in scores)
    fn = sum(s.fn for s in scores)
    return _prf(tp, fp, fn)


@dataclass(frozen=True)
class TimingStats:
    """Per-assay prediction latency on a warm model (fitting excluded)."""

    n_assays: int
    median_ms: float
    mean_ms: float
    assays_per_sec: float
    evaluations_per_assay: int | None = None

    def to_dict(self) -> dict:
        payload = {
            "n_assays": self.n_assays,
            "median_ms": self.median_ms,
            "mean_ms": self.mean_ms,
            "assays_per_sec": self.assays_per_sec,
        }
        if self.evaluations_per_assay is not None:
            payload["evaluations_per_assay"] = self.evaluations_per_assay
        return payload


@dataclass(frozen=True)
class EvalReport:
    per_fold: tuple[tuple[float, float, float], ...]
    mean: tuple[float, float, float]
    timing: TimingStats
    config: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = True) -> dict:
        payload = {
            "config": dict(self.config),
            "aggregation": "micro per fold, arithmetic mean over folds",
            "per_fold": [
                {"precision": p, "recall": r, "f1": f} for p, r, f in self.per_fold
            ],
            "mean": {
                "precision": self.mean[0],
                "recall": self.mean[1],
                "f1": self.mean[2],
            },
        }
        if include_timing:
            payload["timing"] = self.timing.to_dict()
        return payload


@dataclass(frozen=True)
class ClusterConfig:
    k: int
    threshold: int = 1
    seed: int = 42
    max_iter: int = 300
    tol: float = 1e-4
    restarts: int = 1

    method = "cluster"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "threshold": self.threshold,
            "seed": self.seed,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "restarts": self.restarts,
        }


@dataclass(frozen=True)
class LabelerConfig:
    rf_count: int = 170
    epochs: int = 200
    lr: float = 0.5
    decision_threshold: float = 0.5
    seed: int = 42

    method = "labeler"

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "rf_count": self.rf_count,
            "epochs": self.epochs,
            "lr": self.lr,
            "decision_threshold": self.decision_threshold,
            "seed": self.seed,
        }


def _fold_runner(
    config: ClusterConfig | LabelerConfig,
) -> Callable[[Sequence[Bioassay]], Callable[[str], set[str]]]:
    """Returns fit(train) -> predict(text) -> key set, per method."""
    if isinstance(config, ClusterConfig):
        from . import cluster_semantifier as cs

        def fit_cluster(train: Sequence[Bioassay]) -> Callable[[str], set[str]]:
            model = cs.fit_semantifier(
                train,
                k=config.k,
                seed=config.seed,
                max_iter=config.max_iter,
                tol=config.tol,
                restarts=config.restarts,
            )
            return lambda text: cs.predict_keys(model, text, config.threshold)

        return fit_cluster
    if isinstance(config, LabelerConfig):
        from . import label_semantifier as ls

        def fit_labeler(train: Sequence[Bioassay]) -> Callable[[str], set[str]]:
            model = ls.train_labeler(
                train,
                rf_count=config.rf_count,
                seed=config.seed,
                epochs=config.epochs,
                lr=config.lr,
                decision_threshold=config.decision_threshold,
            )
            stmt_matrix = model.statement_matrix()
            return lambda text: {
                s.key for s in ls.predict_set(model, text, stmt_matrix=stmt_matrix)
            }

        return fit_labeler
    raise TypeError(f"unsupported config type {type(config).__name__}")


def cross_validate(
    corpus: Corpus, config: ClusterConfig | LabelerConfig, folds: FoldSplit
) -> EvalReport:
    """Fit on each fold's train ids, score its test ids, micro-aggregate.

    Fitting sees only the fold's training assays (vocabulary, centroids,
    weights, tables); test assays are vectorized with the trained model.
    """
    fit = _fold_runner(config)
    per_fold = []
    latencies: list[float] = []
    for fold in folds.folds:
        train = corpus.subset(fold.train_ids)
        test = corpus.subset(fold.test_ids)
        predict = fit(train)
        scores = []
        for assay in test:
            start = time.perf_counter()
            pred = predict(assay.text)
            latencies.append(time.perf_counter() - start)
            scores.append(score_sets(pred, assay.statement_keys))
        per_fold.append(aggregate_micro(scores))
    mean = tuple(sum(values) / len(values) for values in zip(*per_fold))
    mean_s = statistics.fmean(latencies)
    timing = TimingStats(
        n_assays=len(latencies),
        median_ms=statistics.median(latencies) * 1e3,
        mean_ms=mean_s * 1e3,
        assays_per_sec=1.0 / mean_s if mean_s > 0 else float("inf"),
    )
    return EvalReport(
        per_fold=tuple(per_fold),
        mean=mean,  # type: ignore[arg-type]
        timing=timing,
        config={**config.to_dict(), "folds_seed": folds.seed},
    )


def timing_report(model, test_assays: Sequence[Bioassay], threshold: int | None = None) -> TimingStats:
    """Median/mean per-assay prediction latency on a warm model.

    For the labeler the classifier-evaluation count per assay (= |LS|) is
    reported as well.
    """
    from . import cluster_semantifier as cs
    from . import label_semantifier as ls

    if not test_assays:
        raise ValueError("no assays to time")
    latencies: list[float] = []
    evaluations: int | None = None
    if isinstance(model, cs.ClusterSemantifier):
        for assay in test_assays:
            start = time.perf_counter()
            cs.predict_keys(model, assay.text, threshold)
            latencies.append(time.perf_counter() - start)
    elif isinstance(model, ls.LabelSemantifier):
        stmt_matrix = model.statement_matrix()
        counts = set()
        for assay in test_assays:
            start = time.perf_counter()
            scored = ls.scored_statements(model, assay.text, stmt_matrix=stmt_matrix)
            latencies.append(time.perf_counter() - start)
            counts.add(len(scored))
        if len(counts) != 1:
            raise AssertionError(f"evaluation counts differ across assays: {sorted(counts)}")
        evaluations = counts.pop()
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    mean_s = statistics.fmean(latencies)
    return TimingStats(
        n_assays=len(latencies),
        median_ms=statistics.median(latencies) * 1e3,
        mean_ms=mean_s * 1e3,
        assays_per_sec=1.0 / mean_s if mean_s > 0 else float("inf"),
        evaluations_per_assay=evaluations,
    )


def render_eval_table(report: EvalReport) -> str:
    """Aligned text table: one row per fold plus the mean row."""
    lines = [f"{'fold':>6}  {'P':>8}  {'R':>8}  {'F1':>8}"]
    for i, (p, r, f) in enumerate(report.per_fold, start=1):
        lines.append(f"{i:>6}  {p:>8.4f}  {r:>8.4f}  {f:>8.4f}")
    p, r, f = report.mean
    lines.append(f"{'mean':>6}  {p:>8.4f}  {r:>8.4f}  {f:>8.4f}")
    t = report.timing
    lines.append(
        f"timing: median {t.median_ms:.3f} ms/assay, mean {t.mean_ms:.3f} ms/assay "
        f"over {t.n_assays} predictions"
    )
    return "\n".join(lines)


def render_sweep_table(k_grid, thresholds, cells) -> str:
    """Table layout: rows = k grid, column groups = thresholds, P R F1 each."""
    header1 = f"{'':>5}"
    header2 = f"{'k':>5}"
    for t in thresholds:
        header1 += f"  {f'freq>={t}':^20}"
        header2 += f"  {'P':>6} {'R':>6} {'F1':>6}"
    lines = [header1, header2]
    for k, row in zip(k_grid, cells):
        line = f"{k:>5}"
        for p, r, f in row:
            line += f"  {p:>6.2f} {r:>6.2f} {f:>6.2f}"
        lines.append(line)
    return "\n".join(lines)
