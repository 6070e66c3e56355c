"""TF-IDF vectorization over a fixed, fitted vocabulary.

Tokenization lowercases and splits on non-alphanumeric characters, keeping
tokens of length >= 2.  IDF uses the smoothed form ln((1 + n) / (1 + df)) + 1
and rows are L2-normalized, so cosine similarity is a plain dot product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

__all__ = ["TfidfVectorizer", "tokenize"]

_TOKEN_RE = re.compile(r"[^\W_]+")


def tokenize(text: str, min_token_len: int = 2) -> list[str]:
    """Lowercase alphanumeric tokens of at least ``min_token_len`` chars."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if len(t) >= min_token_len]


@dataclass
class TfidfVectorizer:
    """Fit a vocabulary + IDF weights on a corpus, then embed texts.

    The vocabulary is the sorted set of training tokens, so feature order
    is reproducible.  Unseen tokens at transform time are ignored.
    """

    min_token_len: int = 2
    vocabulary_: dict[str, int] | None = None
    doc_freq_: np.ndarray | None = None
    n_docs_: int = 0
    idf_: np.ndarray | None = None

    def fit(self, texts: Sequence[str]) -> "TfidfVectorizer":
        if len(texts) == 0:
            raise ValueError("cannot fit on an empty text collection")
        doc_tokens = [tokenize(t, self.min_token_len) for t in texts]
        vocab = sorted(set().union(*doc_tokens))
        if not vocab:
            raise ValueError("no tokens survive tokenization; vocabulary is empty")
        self.vocabulary_ = {term: i for i, term in enumerate(vocab)}
        df = np.zeros(len(vocab), dtype=np.int64)
        for tokens in doc_tokens:
            for term in set(tokens):
                df[self.vocabulary_[term]] += 1
        self.doc_freq_ = df
        self.n_docs_ = len(texts)
        self.idf_ = np.log((1.0 + self.n_docs_) / (1.0 + df)) + 1.0
        return self

    def transform(self, texts: Iterable[str]) -> sparse.csr_matrix:
        """Embed texts as L2-normalized tf-idf rows (CSR, float64).

        A text with no in-vocabulary tokens maps to the zero vector.
        """
        if self.vocabulary_ is None or self.idf_ is None:
            raise ValueError("vectorizer is not fitted")
        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for text in texts:
            counts: dict[int, int] = {}
            for term in tokenize(text, self.min_token_len):
                idx = self.vocabulary_.get(term)
                if idx is not None:
                    counts[idx] = counts.get(idx, 0) + 1
            row = sorted(counts.items())
            indices.extend(idx for idx, _ in row)
            data.extend(float(tf) * self.idf_[idx] for idx, tf in row)
            indptr.append(len(indices))
        matrix = sparse.csr_matrix(
            (np.asarray(data, dtype=np.float64), indices, indptr),
            shape=(len(indptr) - 1, len(self.vocabulary_)),
        )
        norms = np.sqrt(matrix.multiply(matrix).sum(axis=1)).A1
        scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
        return sparse.csr_matrix(sparse.diags(scale) @ matrix)

    def fit_transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        return self.fit(texts).transform(texts)

    @property
    def n_features(self) -> int:
        if self.vocabulary_ is None:
            raise ValueError("vectorizer is not fitted")
        return len(self.vocabulary_)

    def to_dict(self) -> dict:
        """JSON-ready form; idf is recomputed on load from doc_freq."""
        if self.vocabulary_ is None or self.doc_freq_ is None:
            raise ValueError("vectorizer is not fitted")
        return {
            "vocabulary": dict(self.vocabulary_),
            "doc_freq": self.doc_freq_.tolist(),
            "n_docs": self.n_docs_,
            "config": {"min_token_len": self.min_token_len, "idf": "smooth+1", "norm": "l2"},
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TfidfVectorizer":
        vec = cls(min_token_len=int(payload["config"]["min_token_len"]))
        vec.vocabulary_ = {str(t): int(i) for t, i in payload["vocabulary"].items()}
        vec.doc_freq_ = np.asarray(payload["doc_freq"], dtype=np.int64)
        vec.n_docs_ = int(payload["n_docs"])
        vec.idf_ = np.log((1.0 + vec.n_docs_) / (1.0 + vec.doc_freq_)) + 1.0
        return vec
