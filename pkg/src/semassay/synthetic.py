"""Seeded synthetic data: planted-structure corpora and Gaussian blobs.

The planted corpus has vocabulary-disjoint assay groups with identical
statement sets inside each group, so a clusterer that recovers the groups
semantifies test assays exactly; it is the package's main benchmark input.
"""

from __future__ import annotations

import numpy as np

from .corpus import Bioassay, Corpus, Statement

__all__ = ["planted_corpus", "statement_universe", "gaussian_blobs"]


def statement_universe(size: int = 1900, n_predicates: int = 80) -> tuple[Statement, ...]:
    """Fixed ontologized statement universe; predicates assigned round-robin."""
    if size < 1 or n_predicates < 1:
        raise ValueError("size and n_predicates must be >= 1")
    return tuple(
        Statement(predicate=f"p{j % n_predicates:02d}", value=f"v{j:04d}", ontologized=True)
        for j in range(size)
    )


def planted_corpus(
    groups: int = 8,
    per_group: int = 100,
    universe_size: int = 1900,
    n_predicates: int = 80,
    min_statements: int = 30,
    max_statements: int = 50,
    vocab_per_group: int = 25,
    tokens_per_text: int = 150,
    seed: int = 42,
) -> Corpus:
    """Corpus of ``groups`` vocabulary-disjoint groups of ``per_group`` assays.

    Every assay in a group carries the group's statement set (a seeded
    sample of 30..50 universe statements); texts are seeded token draws
    from the group's private vocabulary, so groups are orthogonal under
    TF-IDF while within-group texts are highly similar.
    """
    if groups < 1 or per_group < 1:
        raise ValueError("groups and per_group must be >= 1")
    if not 1 <= min_statements <= max_statements <= universe_size:
        raise ValueError("statement range must satisfy 1 <= min <= max <= universe size")
    rng = np.random.default_rng(seed)
    universe = statement_universe(universe_size, n_predicates)
    assays: list[Bioassay] = []
    for g in range(groups):
        vocab = [f"g{g}w{t:02d}" for t in range(vocab_per_group)]
        n_statements = int(rng.integers(min_statements, max_statements + 1))
        chosen = sorted(rng.choice(universe_size, size=n_statements, replace=False).tolist())
        group_statements = tuple(universe[j] for j in chosen)
        for i in range(per_group):
            words = rng.choice(len(vocab), size=tokens_per_text)
            text = " ".join(vocab[w] for w in words)
            assays.append(
                Bioassay(id=f"g{g}a{i:03d}", text=text, statements=group_statements)
            )
    return Corpus(assays=tuple(assays))


def gaussian_blobs(
    n_blobs: int = 4,
    per_blob: int = 60,
    radius: float = 10.0,
    std: float = 0.4,
    seed: int = 42,
) -> np.ndarray:
    """2-D points in ``n_blobs`` isotropic Gaussian clumps on a circle."""
    if n_blobs < 1 or per_blob < 1:
        raise ValueError("n_blobs and per_blob must be >= 1")
    rng = np.random.default_rng(seed)
    angles = 2.0 * np.pi * np.arange(n_blobs) / n_blobs
    centers = radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    points = [
        center + std * rng.standard_normal((per_blob, 2)) for center in centers
    ]
    return np.vstack(points)
