"""Shared fixtures and the acceptance summary hook."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from semassay.corpus import Bioassay, Corpus, Statement


def make_statement(predicate: str, value: str, ontologized: bool = True) -> Statement:
    return Statement(predicate=predicate, value=value, ontologized=ontologized)


def make_assay(assay_id: str, text: str, keys: list[tuple[str, str]] | None = None,
               statements: tuple[Statement, ...] | None = None) -> Bioassay:
    if statements is None:
        statements = tuple(make_statement(p, v) for p, v in (keys or []))
    return Bioassay(id=assay_id, text=text, statements=statements)


def write_corpus(path: Path, corpus: Corpus) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for assay in corpus.assays:
            handle.write(
                json.dumps(
                    {
                        "id": assay.id,
                        "text": assay.text,
                        "statements": [
                            {
                                "predicate": s.predicate,
                                "value": s.value,
                                "ontologized": s.ontologized,
                            }
                            for s in assay.statements
                        ],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
    return path


@pytest.fixture(scope="session")
def planted():
    """Full-size planted corpus: 8 vocabulary-disjoint groups of 100."""
    from semassay.synthetic import planted_corpus

    return planted_corpus(seed=42)


@pytest.fixture(scope="session")
def planted_small():
    """Small planted corpus for fast unit tests."""
    from semassay.synthetic import planted_corpus

    return planted_corpus(
        groups=4,
        per_group=12,
        universe_size=120,
        n_predicates=10,
        min_statements=6,
        max_statements=10,
        seed=5,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    stats = terminalreporter.stats
    outcomes: dict[str, str] = {}
    for status in ("passed", "failed", "error", "skipped"):
        for report in stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py::" not in nodeid:
                continue
            name = nodeid.split("::")[-1].split("[")[0]
            # a test failing in setup/teardown still counts as failed
            if outcomes.get(name) != "FAIL":
                outcomes[name] = "PASS" if status == "passed" else "FAIL"
    if not outcomes:
        return
    try:
        from tests.test_acceptance import CRITERIA
    except ImportError:
        from test_acceptance import CRITERIA  # rootdir layout fallback
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, description in CRITERIA.items():
        verdict = outcomes.get(name, "NOT RUN")
        terminalreporter.write_line(f"[{verdict}] {description}")
