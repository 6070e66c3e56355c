"""Semantified-bioassay corpora: loading, validation, pruning, subsetting, splits.

A corpus is an ordered collection of bioassays, each carrying a free-text
description and a set of logical statements (predicate/value pairs).  The
on-disk format is JSONL, one assay per line; see ``load_corpus``.
"""

from __future__ import annotations

import json
import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable

logger = logging.getLogger(__name__)

__all__ = [
    "Statement",
    "Bioassay",
    "Corpus",
    "CorpusStats",
    "Fold",
    "FoldSplit",
    "CorpusError",
    "CorpusFormatError",
    "CorpusValidationError",
    "load_corpus",
    "load_blocklist",
    "prune_partially_ontologized",
    "corpus_stats",
    "top_predicate_subset",
    "split_folds",
]


class CorpusError(Exception):
    """Base class for corpus loading and validation failures."""


class CorpusFormatError(CorpusError):
    """A record in the corpus file is malformed."""


class CorpusValidationError(CorpusError):
    """The corpus content violates an integrity constraint."""


@dataclass(frozen=True)
class Statement:
    """One logical annotation: a predicate/value pair.

    Identity (equality and hashing) is the canonical key, i.e. the exact
    predicate and value strings; the ``ontologized`` flag is metadata and
    does not participate in comparison.
    """

    predicate: str
    value: str
    ontologized: bool = field(default=True, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "predicate", self.predicate.strip())
        object.__setattr__(self, "value", self.value.strip())
        if not self.predicate:
            raise ValueError("statement predicate is empty")
        if not self.value:
            raise ValueError("statement value is empty")

    @property
    def key(self) -> str:
        """Canonical key, compared by exact case-sensitive match."""
        return f"{self.predicate} -> {self.value}"

    @property
    def text(self) -> str:
        """Surface form used when a statement is treated as text."""
        return f"{self.predicate} {self.value}"


@dataclass(frozen=True)
class Bioassay:
    """A bioassay: unique id, free-text description, statement set.

    Statements are de-duplicated by canonical key on construction,
    preserving first-occurrence order.
    """

    id: str
    text: str
    statements: tuple[Statement, ...]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("bioassay id is empty")
        if not self.text.strip():
            raise ValueError(f"bioassay {self.id!r} has empty text")
        seen: dict[str, Statement] = {}
        for stmt in self.statements:
            seen.setdefault(stmt.key, stmt)
        object.__setattr__(self, "statements", tuple(seen.values()))

    @cached_property
    def statement_keys(self) -> frozenset[str]:
        return frozenset(s.key for s in self.statements)


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of bioassays with derived indexes."""

    assays: tuple[Bioassay, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assays", tuple(self.assays))
        seen: set[str] = set()
        for assay in self.assays:
            if assay.id in seen:
                raise CorpusValidationError(f"duplicate assay id {assay.id!r}")
            seen.add(assay.id)

    def __len__(self) -> int:
        return len(self.assays)

    @cached_property
    def assay_map(self) -> dict[str, Bioassay]:
        return {a.id: a for a in self.assays}

    @cached_property
    def statement_objects(self) -> dict[str, Statement]:
        """Map canonical key to its first-seen Statement object."""
        objects: dict[str, Statement] = {}
        for assay in self.assays:
            for stmt in assay.statements:
                objects.setdefault(stmt.key, stmt)
        return objects

    @cached_property
    def statement_universe(self) -> frozenset[str]:
        """All distinct canonical keys across the corpus."""
        return frozenset(self.statement_objects)

    @cached_property
    def predicate_frequency(self) -> Counter[str]:
        """Statement occurrences per predicate.

        Each unique statement counts once per assay in which it occurs, so
        a statement shared by five assays contributes five to its predicate.
        """
        counts: Counter[str] = Counter()
        for assay in self.assays:
            counts.update(s.predicate for s in assay.statements)
        return counts

    def distinct_statements(self) -> tuple[Statement, ...]:
        """Distinct statements ordered by canonical key."""
        return tuple(self.statement_objects[k] for k in sorted(self.statement_objects))

    def subset(self, ids: Iterable[str]) -> list[Bioassay]:
        """Assays for the given ids, in the given order."""
        missing = [i for i in ids if i not in self.assay_map]
        if missing:
            raise CorpusValidationError(f"unknown assay ids: {missing[:5]}")
        return [self.assay_map[i] for i in ids]


@dataclass(frozen=True)
class CorpusStats:
    """Statements-per-assay statistics plus the distinct-statement total.

    ``avg`` is kept exact; use ``avg_rounded`` for display.
    """

    avg: Fraction
    min: int
    max: int
    total_unique: int

    @property
    def avg_rounded(self) -> int:
        # round half up, matching the corpus summary presentation
        return int(self.avg + Fraction(1, 2))


@dataclass(frozen=True)
class Fold:
    train_ids: tuple[str, ...]
    test_ids: tuple[str, ...]


@dataclass(frozen=True)
class FoldSplit:
    """Three train/test folds with pairwise-disjoint test sets."""

    folds: tuple[Fold, ...]
    seed: int


def _parse_statement(obj: object, path: str, lineno: int, pos: int) -> Statement:
    if not isinstance(obj, dict):
        raise CorpusFormatError(f"{path}: line {lineno}: statement {pos} is not an object")
    predicate = obj.get("predicate")
    value = obj.get("value")
    ontologized = obj.get("ontologized")
    if not isinstance(predicate, str) or not isinstance(value, str):
        raise CorpusFormatError(
            f"{path}: line {lineno}: statement {pos} needs string 'predicate' and 'value'"
        )
    if not isinstance(ontologized, bool):
        raise CorpusFormatError(
            f"{path}: line {lineno}: statement {pos} needs boolean 'ontologized'"
        )
    try:
        return Statement(predicate=predicate, value=value, ontologized=ontologized)
    except ValueError as exc:
        raise CorpusFormatError(f"{path}: line {lineno}: statement {pos}: {exc}") from exc


def load_corpus(path: str | Path, format: str = "jsonl") -> Corpus:
    """Load and validate a corpus file.

    Each line is a JSON object ``{"id", "text", "statements": [...]}``.
    Duplicate statements within an assay are silently de-duplicated (a
    warning reports the total count); duplicate assay ids are an error.

    Raises:
        CorpusFormatError: malformed line, with its line number.
        CorpusValidationError: duplicate assay id.
    """
    if format != "jsonl":
        raise ValueError(f"unsupported corpus format {format!r}")
    path = Path(path)
    assays: list[Bioassay] = []
    duplicates = 0
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}: line {lineno}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise CorpusFormatError(f"{path}: line {lineno}: record is not an object")
            assay_id = record.get("id")
            text = record.get("text")
            raw_statements = record.get("statements")
            if not isinstance(assay_id, str) or not assay_id:
                raise CorpusFormatError(f"{path}: line {lineno}: missing or invalid 'id'")
            if not isinstance(text, str) or not text.strip():
                raise CorpusFormatError(f"{path}: line {lineno}: missing or empty 'text'")
            if not isinstance(raw_statements, list):
                raise CorpusFormatError(f"{path}: line {lineno}: 'statements' must be a list")
            statements = tuple(
                _parse_statement(s, str(path), lineno, pos)
                for pos, s in enumerate(raw_statements)
            )
            assay = Bioassay(id=assay_id, text=text, statements=statements)
            duplicates += len(statements) - len(assay.statements)
            assays.append(assay)
    if duplicates:
        logger.warning(
            "%s: de-duplicated %d repeated statement(s) within assays", path, duplicates
        )
    return Corpus(assays=tuple(assays))


def load_blocklist(path: str | Path) -> frozenset[str]:
    """Read a predicate blocklist: one predicate per line, ``#`` comments."""
    predicates: set[str] = set()
    with Path(path).open(encoding="utf-8") as handle:
        for line in handle:
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            predicates.add(stripped)
    return frozenset(predicates)


def prune_partially_ontologized(
    corpus: Corpus, blocklist: frozenset[str] | set[str] = frozenset()
) -> Corpus:
    """Drop non-ontologized statements and blocklisted predicates.

    Assays left without statements are dropped.  Returns a new corpus; the
    input is unchanged.
    """
    pruned: list[Bioassay] = []
    for assay in corpus.assays:
        kept = tuple(
            s for s in assay.statements if s.ontologized and s.predicate not in blocklist
        )
        if kept:
            pruned.append(Bioassay(id=assay.id, text=assay.text, statements=kept))
    return Corpus(assays=tuple(pruned))


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Statements-per-assay average (exact), min, max, and distinct total."""
    if not corpus.assays:
        raise ValueError("corpus has no assays")
    counts = [len(a.statements) for a in corpus.assays]
    return CorpusStats(
        avg=Fraction(sum(counts), len(counts)),
        min=min(counts),
        max=max(counts),
        total_unique=len(corpus.statement_universe),
    )


def top_predicate_subset(corpus: Corpus, n: int) -> Corpus:
    """Keep only statements whose predicate is among the ``n`` most frequent.

    Predicate frequency here is the number of distinct statements carrying
    the predicate; ties break lexicographically.  Assays emptied by the
    filter are dropped.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    counts: Counter[str] = Counter(s.predicate for s in corpus.statement_objects.values())
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    keep = {predicate for predicate, _ in ranked[:n]}
    subset: list[Bioassay] = []
    for assay in corpus.assays:
        kept = tuple(s for s in assay.statements if s.predicate in keep)
        if kept:
            subset.append(Bioassay(id=assay.id, text=assay.text, statements=kept))
    return Corpus(assays=tuple(subset))


def split_folds(corpus: Corpus, train_size: int, test_size: int, seed: int) -> FoldSplit:
    """Three-fold split with pairwise-disjoint test sets.

    Assay ids are shuffled with a seeded RNG; the first ``3 * test_size``
    ids become the three test sets.  Each fold's train set is then sampled
    from every id outside its own test set, so the other folds' test assays
    may serve as training material.
    """
    if train_size < 1 or test_size < 1:
        raise ValueError("train_size and test_size must be >= 1")
    n = len(corpus.assays)
    if 3 * test_size > n:
        raise ValueError(f"3 * test_size = {3 * test_size} exceeds corpus size {n}")
    if train_size + test_size > n:
        raise ValueError(f"train_size + test_size = {train_size + test_size} exceeds corpus size {n}")
    rng = random.Random(seed)
    ids = [a.id for a in corpus.assays]
    rng.shuffle(ids)
    test_sets = [ids[i * test_size : (i + 1) * test_size] for i in range(3)]
    folds = []
    for test_ids in test_sets:
        own = set(test_ids)
        pool = [i for i in ids if i not in own]
        train_ids = rng.sample(pool, train_size)
        folds.append(Fold(train_ids=tuple(train_ids), test_ids=tuple(test_ids)))
    return FoldSplit(folds=tuple(folds), seed=seed)
