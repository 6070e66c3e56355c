"""Per-statement labeling semantification.

Every (assay, statement) pair over a statement universe LS is a binary
instance; training pairs each assay's gold statements with a seeded sample
of random-false negatives.  The classifier is a linear log-odds model over
concatenated [assay | statement] TF-IDF blocks, trained by full-batch
gradient descent on mean logistic loss.  Prediction scores all |LS| pairs,
so its cost grows linearly with the universe.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import sparse

from .corpus import Bioassay, Statement
from .vectorizer import TfidfVectorizer

__all__ = [
    "LabeledInstance",
    "LabelSemantifier",
    "build_instances",
    "featurize_pair",
    "train_labeler",
    "predict_set",
    "scored_statements",
]


@dataclass(frozen=True)
class LabeledInstance:
    assay_id: str
    statement_key: str
    label: bool


@dataclass(frozen=True)
class LabelSemantifier:
    """Linear pair classifier over a fixed statement universe.

    ``weights`` has dim 2|V|: the first block scores the assay text, the
    second the statement text; ``bias`` is separate.
    """

    tfidf: TfidfVectorizer
    weights: np.ndarray
    bias: float
    statement_universe: tuple[Statement, ...]
    rf_count: int
    decision_threshold: float
    epochs: int
    lr: float
    seed: int
    loss_history: tuple[float, ...]

    def statement_matrix(self) -> sparse.csr_matrix:
        """TF-IDF rows for every universe statement, in universe order."""
        return self.tfidf.transform([s.text for s in self.statement_universe])

    def to_dict(self) -> dict:
        return {
            "tfidf": self.tfidf.to_dict(),
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "statements": [
                {"predicate": s.predicate, "value": s.value, "ontologized": s.ontologized}
                for s in self.statement_universe
            ],
            "config": {
                "rf_count": self.rf_count,
                "decision_threshold": self.decision_threshold,
                "epochs": self.epochs,
                "lr": self.lr,
                "seed": self.seed,
            },
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "LabelSemantifier":
        config = payload["config"]
        return cls(
            tfidf=TfidfVectorizer.from_dict(payload["tfidf"]),
            weights=np.asarray(payload["weights"], dtype=np.float64),
            bias=float(payload["bias"]),
            statement_universe=tuple(
                Statement(
                    predicate=s["predicate"], value=s["value"], ontologized=bool(s["ontologized"])
                )
                for s in payload["statements"]
            ),
            rf_count=int(config["rf_count"]),
            decision_threshold=float(config["decision_threshold"]),
            epochs=int(config["epochs"]),
            lr=float(config["lr"]),
            seed=int(config["seed"]),
            loss_history=(),
        )


def _negative_rng(seed: int, assay_id: str) -> random.Random:
    # str seeds hash via sha512 inside random.Random: stable across runs
    return random.Random(f"{seed}:{assay_id}")


def build_instances(
    assay: Bioassay,
    ls_universe: Sequence[Statement],
    rf_count: int,
    seed: int,
) -> list[LabeledInstance]:
    """Positives = the assay's gold statements; negatives = a seeded,
    duplicate-free uniform sample of ``rf_count`` non-gold universe keys.
    """
    if rf_count < 0:
        raise ValueError("rf_count must be >= 0")
    gold = assay.statement_keys
    candidates = sorted({s.key for s in ls_universe} - gold)
    if rf_count > len(candidates):
        raise ValueError(
            f"rf_count {rf_count} exceeds the {len(candidates)} non-gold universe statements"
        )
    instances = [
        LabeledInstance(assay_id=assay.id, statement_key=s.key, label=True)
        for s in assay.statements
    ]
    rng = _negative_rng(seed, assay.id)
    for key in rng.sample(candidates, rf_count):
        instances.append(LabeledInstance(assay_id=assay.id, statement_key=key, label=False))
    return instances


def featurize_pair(tfidf: TfidfVectorizer, assay_text: str, stmt: Statement) -> sparse.csr_matrix:
    """Concatenated [assay | statement] TF-IDF blocks, dim 2|V|."""
    pair = tfidf.transform([assay_text, stmt.text])
    return sparse.csr_matrix(sparse.hstack([pair[0], pair[1]]))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(p: np.ndarray, y: np.ndarray) -> float:
    eps = 1e-12
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


def logistic_gradient(
    x: sparse.csr_matrix, y: np.ndarray, weights: np.ndarray, bias: float
) -> tuple[np.ndarray, float, float]:
    """(grad_w, grad_b, loss) of mean logistic loss at (weights, bias)."""
    z = np.asarray(x @ weights).ravel() + bias
    p = _sigmoid(z)
    residual = p - y
    grad_w = np.asarray(x.T @ residual).ravel() / x.shape[0]
    grad_b = float(residual.mean())
    return grad_w, grad_b, _log_loss(p, y)


def logistic_loss(x: sparse.csr_matrix, y: np.ndarray, weights: np.ndarray, bias: float) -> float:
    z = np.asarray(x @ weights).ravel() + bias
    return _log_loss(_sigmoid(z), y)


def train_labeler(
    train: Sequence[Bioassay],
    rf_count: int,
    seed: int,
    epochs: int = 200,
    lr: float = 0.5,
    decision_threshold: float = 0.5,
    universe: Sequence[Statement] | None = None,
) -> LabelSemantifier:
    """Build LS from the training assays (or take an explicit ``universe``),
    assemble pair instances, and fit the linear model by full-batch descent.
    """
    if not train:
        raise ValueError("training set is empty")
    if not 0.0 < decision_threshold < 1.0:
        raise ValueError("decision_threshold must be in (0, 1)")
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if universe is None:
        seen: dict[str, Statement] = {}
        for assay in train:
            for stmt in assay.statements:
                seen.setdefault(stmt.key, stmt)
        ls = tuple(seen[key] for key in sorted(seen))
    else:
        ls = tuple(universe)
        if len({s.key for s in ls}) != len(ls):
            raise ValueError("universe contains duplicate statement keys")
    tfidf = TfidfVectorizer()
    tfidf.fit([a.text for a in train] + [s.text for s in ls])

    text_vectors = tfidf.transform([a.text for a in train])
    stmt_vectors = tfidf.transform([s.text for s in ls])
    stmt_row = {s.key: i for i, s in enumerate(ls)}

    text_rows: list[int] = []
    stmt_rows: list[int] = []
    labels: list[float] = []
    for row, assay in enumerate(train):
        for inst in build_instances(assay, ls, rf_count, seed):
            if inst.statement_key not in stmt_row:
                continue  # gold statement outside an explicit universe
            text_rows.append(row)
            stmt_rows.append(stmt_row[inst.statement_key])
            labels.append(1.0 if inst.label else 0.0)
    x = sparse.csr_matrix(
        sparse.hstack([text_vectors[text_rows], stmt_vectors[stmt_rows]])
    )
    y = np.asarray(labels, dtype=np.float64)

    weights = np.zeros(x.shape[1], dtype=np.float64)
    bias = 0.0
    history: list[float] = []
    for epoch in range(epochs):
        grad_w, grad_b, loss = logistic_gradient(x, y, weights, bias)
        if not math.isfinite(loss):
            raise ArithmeticError(f"non-finite training loss at epoch {epoch}")
        history.append(loss)
        weights -= lr * grad_w
        bias -= lr * grad_b
    return LabelSemantifier(
        tfidf=tfidf,
        weights=weights,
        bias=bias,
        statement_universe=ls,
        rf_count=rf_count,
        decision_threshold=decision_threshold,
        epochs=epochs,
        lr=lr,
        seed=seed,
        loss_history=tuple(history),
    )


def scored_statements(
    model: LabelSemantifier, text: str, stmt_matrix: sparse.csr_matrix | None = None
) -> list[tuple[Statement, float]]:
    """Classify every (text, statement) pair in the universe, one classifier
    evaluation per statement; returns (statement, probability) pairs in
    universe order.  The returned length is exactly |LS|.
    """
    v = model.tfidf.n_features
    text_vec = model.tfidf.transform([text])
    w_text = model.weights[:v]
    w_stmt = model.weights[v:]
    text_score = float(np.asarray(text_vec @ w_text).ravel()[0]) + model.bias
    s = model.statement_matrix() if stmt_matrix is None else stmt_matrix
    indptr, indices, data = s.indptr, s.indices, s.data
    scored: list[tuple[Statement, float]] = []
    for i, stmt in enumerate(model.statement_universe):
        lo, hi = indptr[i], indptr[i + 1]
        z = text_score + float(data[lo:hi] @ w_stmt[indices[lo:hi]])
        p = 1.0 / (1.0 + math.exp(-z)) if z >= 0 else math.exp(z) / (1.0 + math.exp(z))
        scored.append((stmt, p))
    return scored


def predict_set(
    model: LabelSemantifier,
    text: str,
    decision_threshold: float | None = None,
    stmt_matrix: sparse.csr_matrix | None = None,
) -> set[Statement]:
    """Universe statements whose predicted probability meets the threshold."""
    threshold = model.decision_threshold if decision_threshold is None else decision_threshold
    return {
        stmt for stmt, p in scored_statements(model, text, stmt_matrix) if p >= threshold
    }
