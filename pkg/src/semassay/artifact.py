"""Model artifacts: versioned JSON save/load with provenance.

Artifacts carry no timestamps and are dumped with sorted keys, so training
twice with the same seed yields byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .cluster_semantifier import ClusterSemantifier
from .corpus import Corpus
from .label_semantifier import LabelSemantifier

__all__ = ["save_artifact", "load_artifact", "fingerprint_corpus", "ArtifactError"]

ARTIFACT_VERSION = "1"


class ArtifactError(Exception):
    """The artifact file is missing, malformed, or of an unknown method."""


def fingerprint_corpus(corpus: Corpus) -> str:
    """sha256 over the corpus's canonical JSONL serialization."""
    digest = hashlib.sha256()
    for assay in corpus.assays:
        record = {
            "id": assay.id,
            "text": assay.text,
            "statements": [
                {"predicate": s.predicate, "value": s.value, "ontologized": s.ontologized}
                for s in assay.statements
            ],
        }
        digest.update(json.dumps(record, sort_keys=True, ensure_ascii=False).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


def save_artifact(
    model: ClusterSemantifier | LabelSemantifier,
    path: str | Path,
    corpus_fingerprint: str | None = None,
    config: dict | None = None,
) -> None:
    if isinstance(model, ClusterSemantifier):
        method = "cluster"
        seed = model.kmeans.seed
    elif isinstance(model, LabelSemantifier):
        method = "labeler"
        seed = model.seed
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    payload = {
        "version": ARTIFACT_VERSION,
        "method": method,
        "model": model.to_dict(),
        "provenance": {
            "seed": seed,
            "corpus_sha256": corpus_fingerprint,
            "config": config or {},
        },
    }
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    Path(path).write_text(text, encoding="utf-8")


def load_artifact(path: str | Path) -> ClusterSemantifier | LabelSemantifier:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"artifact not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: invalid JSON: {exc}") from exc
    version = payload.get("version")
    if version != ARTIFACT_VERSION:
        raise ArtifactError(f"{path}: unsupported artifact version {version!r}")
    method = payload.get("method")
    if method == "cluster":
        return ClusterSemantifier.from_dict(payload["model"])
    if method == "labeler":
        return LabelSemantifier.from_dict(payload["model"])
    raise ArtifactError(f"{path}: unknown method {method!r}")
