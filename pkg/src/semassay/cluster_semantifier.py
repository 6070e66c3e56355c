"""Cluster-copy semantification.

Fit TF-IDF + K-means on training assays, tabulate how many member assays of
each cluster carry each statement, and semantify a new text by copying its
nearest cluster's statements that meet a frequency threshold.  Threshold 1
is the cluster union; threshold = member count is the intersection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import kmeans as _kmeans
from .corpus import Bioassay, Statement
from .kmeans import KMeansModel
from .vectorizer import TfidfVectorizer

__all__ = ["ClusterSemantifier", "fit_semantifier", "predict", "sweep", "SweepResult"]


@dataclass(frozen=True)
class ClusterSemantifier:
    """Fitted cluster-copy model.

    ``cluster_tables[c]`` maps canonical statement key to the number of
    training assays in cluster ``c`` whose statement set contains it, so
    every count is in 1..member_counts[c].
    """

    tfidf: TfidfVectorizer
    kmeans: KMeansModel
    cluster_tables: tuple[dict[str, int], ...]
    member_counts: tuple[int, ...]
    statements: dict[str, Statement]
    default_threshold: int = 1

    def to_dict(self) -> dict:
        return {
            "tfidf": self.tfidf.to_dict(),
            "kmeans": self.kmeans.to_dict(),
            "cluster_tables": {str(c): dict(t) for c, t in enumerate(self.cluster_tables)},
            "member_counts": list(self.member_counts),
            "statements": {
                key: {"predicate": s.predicate, "value": s.value, "ontologized": s.ontologized}
                for key, s in self.statements.items()
            },
            "default_threshold": self.default_threshold,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "ClusterSemantifier":
        tables = payload["cluster_tables"]
        k = len(tables)
        return cls(
            tfidf=TfidfVectorizer.from_dict(payload["tfidf"]),
            kmeans=KMeansModel.from_dict(payload["kmeans"]),
            cluster_tables=tuple(
                {str(key): int(n) for key, n in tables[str(c)].items()} for c in range(k)
            ),
            member_counts=tuple(int(n) for n in payload["member_counts"]),
            statements={
                key: Statement(
                    predicate=s["predicate"], value=s["value"], ontologized=bool(s["ontologized"])
                )
                for key, s in payload["statements"].items()
            },
            default_threshold=int(payload["default_threshold"]),
        )


def fit_semantifier(
    train: Sequence[Bioassay],
    k: int,
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-4,
    restarts: int = 1,
    default_threshold: int = 1,
) -> ClusterSemantifier:
    """Fit TF-IDF on the training texts, cluster them, build count tables."""
    if not train:
        raise ValueError("training set is empty")
    if default_threshold < 1:
        raise ValueError("default_threshold must be >= 1")
    tfidf = TfidfVectorizer()
    vectors = tfidf.fit_transform([a.text for a in train])
    model = _kmeans.fit(vectors, k=k, seed=seed, max_iter=max_iter, tol=tol, restarts=restarts)
    return _build_from_parts(train, tfidf, model, default_threshold)


def _build_from_parts(
    train: Sequence[Bioassay],
    tfidf: TfidfVectorizer,
    model: KMeansModel,
    default_threshold: int,
) -> ClusterSemantifier:
    tables: list[dict[str, int]] = [{} for _ in range(model.k)]
    members = [0] * model.k
    statements: dict[str, Statement] = {}
    for assay, label in zip(train, model.labels):
        members[label] += 1
        table = tables[label]
        for stmt in assay.statements:
            table[stmt.key] = table.get(stmt.key, 0) + 1
            statements.setdefault(stmt.key, stmt)
    return ClusterSemantifier(
        tfidf=tfidf,
        kmeans=model,
        cluster_tables=tuple(tables),
        member_counts=tuple(members),
        statements=statements,
        default_threshold=default_threshold,
    )


def predict(model: ClusterSemantifier, text: str, threshold: int | None = None) -> set[Statement]:
    """Statements of the nearest cluster whose count meets the threshold."""
    keys = predict_keys(model, text, threshold)
    return {model.statements[key] for key in keys}


def predict_keys(model: ClusterSemantifier, text: str, threshold: int | None = None) -> set[str]:
    """Like ``predict`` but returns canonical keys."""
    t = model.default_threshold if threshold is None else threshold
    if t < 1:
        raise ValueError("threshold must be >= 1")
    vector = model.tfidf.transform([text])
    cluster = _kmeans.assign(model.kmeans, vector)
    return {key for key, count in model.cluster_tables[cluster].items() if count >= t}


@dataclass(frozen=True)
class SweepResult:
    """P/R/F1 per (k, threshold) cell on one train/test split."""

    k_grid: tuple[int, ...]
    thresholds: tuple[int, ...]
    cells: tuple[tuple[tuple[float, float, float], ...], ...]  # [row=k][col=threshold]
    seed: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "k_grid": list(self.k_grid),
            "thresholds": list(self.thresholds),
            "cells": [
                [{"precision": p, "recall": r, "f1": f} for p, r, f in row]
                for row in self.cells
            ],
            "seed": self.seed,
            "config": dict(self.config),
        }


def sweep(
    train: Sequence[Bioassay],
    test: Sequence[Bioassay],
    k_grid: Sequence[int],
    thresholds: Sequence[int],
    seed: int,
    max_iter: int = 300,
    tol: float = 1e-4,
    restarts: int = 1,
) -> SweepResult:
    """One K-means fit per k; micro P/R/F1 per (k, threshold) cell.

    TF-IDF is fit once on the training texts (it does not depend on k) and
    test texts are assigned in batch, so threshold cells reuse each fit.
    """
    from .evaluation import SetScore, aggregate_micro

    if not k_grid or not thresholds:
        raise ValueError("k_grid and thresholds must be nonempty")
    tfidf = TfidfVectorizer()
    train_vectors = tfidf.fit_transform([a.text for a in train])
    test_vectors = tfidf.transform([a.text for a in test])
    gold = [a.statement_keys for a in test]
    rows = []
    for k in k_grid:
        model = _kmeans.fit(
            train_vectors, k=int(k), seed=seed, max_iter=max_iter, tol=tol, restarts=restarts
        )
        semantifier = _build_from_parts(train, tfidf, model, default_threshold=1)
        assignments = _kmeans.assign_many(model, test_vectors)
        row = []
        for t in thresholds:
            scores = []
            for cluster, gold_keys in zip(assignments, gold):
                table = semantifier.cluster_tables[int(cluster)]
                pred = {key for key, count in table.items() if count >= int(t)}
                tp = len(pred & gold_keys)
                scores.append(
                    SetScore(tp=tp, fp=len(pred) - tp, fn=len(gold_keys) - tp)
                )
            row.append(aggregate_micro(scores))
        rows.append(tuple(row))
    return SweepResult(
        k_grid=tuple(int(k) for k in k_grid),
        thresholds=tuple(int(t) for t in thresholds),
        cells=tuple(rows),
        seed=seed,
        config={"max_iter": max_iter, "tol": tol, "restarts": restarts},
    )
