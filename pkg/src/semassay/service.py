"""REST curation service: submit texts for semantification, curate results.

State lives in an append-only JSONL log (last record per assay wins on
replay, fsync per write) under a data directory; the active model is an
immutable snapshot swapped atomically; at most one training job runs at a
time.  Errors use the shape {"error": {"code", "message"}}.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import uuid
from datetime import datetime, timezone
from pathlib import Path
from typing import NamedTuple

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import cluster_semantifier as cs
from . import label_semantifier as ls
from .artifact import ArtifactError, fingerprint_corpus, load_artifact, save_artifact
from .corpus import CorpusError, load_corpus

__all__ = ["create_app", "CurationStore", "statement_id"]


def statement_id(key: str) -> str:
    """Stable id for a canonical statement key (survives re-prediction)."""
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class CurationStore:
    """Append-only JSONL record store with last-wins replay."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.path = self.data_dir / "records.jsonl"
        self._lock = threading.Lock()
        self._records: dict[str, dict] = {}
        self._order: list[str] = []
        self._counter = 0
        self._replay()

    def _replay(self) -> None:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                record = json.loads(line)
                uid = record["assay_uid"]
                if uid not in self._records:
                    self._order.append(uid)
                self._records[uid] = record
                suffix = uid.lstrip("a")
                if suffix.isdigit():
                    self._counter = max(self._counter, int(suffix))

    def _append(self, record: dict) -> None:
        line = json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n"
        with self.path.open("a", encoding="utf-8") as handle:
            handle.write(line)
            handle.flush()
            os.fsync(handle.fileno())

    def create(self, text: str, predicted: list[dict]) -> dict:
        with self._lock:
            self._counter += 1
            now = _now()
            record = {
                "assay_uid": f"a{self._counter:08d}",
                "text": text,
                "predicted": predicted,
                "deleted_ids": [],
                "created": now,
                "updated": now,
            }
            self._records[record["assay_uid"]] = record
            self._order.append(record["assay_uid"])
            self._append(record)
            return record

    def get(self, uid: str) -> dict:
        record = self._records.get(uid)
        if record is None:
            raise KeyError(uid)
        return record

    def delete_statement(self, uid: str, sid: str) -> int:
        """Mark sid deleted; idempotent; returns the remaining count."""
        with self._lock:
            record = self.get(uid)
            known = {s["statement_id"] for s in record["predicted"]}
            if sid not in known:
                raise KeyError(sid)
            if sid not in record["deleted_ids"]:
                record = {
                    **record,
                    "deleted_ids": sorted({*record["deleted_ids"], sid}),
                    "updated": _now(),
                }
                self._records[uid] = record
                self._append(record)
            return len(record["predicted"]) - len(record["deleted_ids"])

    def all_records(self) -> list[dict]:
        return [self._records[uid] for uid in self._order]


class ModelSnapshot(NamedTuple):
    model: object
    stmt_matrix: object  # labeler statement rows, precomputed once per swap


class TrainingJobs:
    """At most one running training job; finished jobs stay queryable."""

    def __init__(self):
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._running: str | None = None

    def start(self, runner) -> str | None:
        with self._lock:
            if self._running is not None and self._jobs[self._running]["status"] == "running":
                return None
            job_id = uuid.uuid4().hex[:12]
            self._jobs[job_id] = {"job_id": job_id, "status": "running", "artifact_path": None, "error": None}
            self._running = job_id
        thread = threading.Thread(target=runner, args=(job_id,), daemon=True)
        thread.start()
        return job_id

    def finish(self, job_id: str, artifact_path: str | None, error: str | None) -> None:
        with self._lock:
            job = self._jobs[job_id]
            job["status"] = "error" if error else "done"
            job["artifact_path"] = artifact_path
            job["error"] = error

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job else None


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


def _predict_statements(snapshot: ModelSnapshot, text: str, threshold) -> list[dict] | JSONResponse:
    model = snapshot.model
    if isinstance(model, cs.ClusterSemantifier):
        t = model.default_threshold if threshold is None else threshold
        if not isinstance(t, int) or isinstance(t, bool) or t < 1:
            return _error(422, "invalid_threshold", "cluster threshold must be an integer >= 1")
        vector = model.tfidf.transform([text])
        from . import kmeans as _kmeans

        cluster = _kmeans.assign(model.kmeans, vector)
        table = model.cluster_tables[cluster]
        rows = []
        for key in sorted(k for k, n in table.items() if n >= t):
            stmt = model.statements[key]
            rows.append(
                {
                    "statement_id": statement_id(key),
                    "predicate": stmt.predicate,
                    "value": stmt.value,
                    "ontologized": stmt.ontologized,
                    "source": f"cluster:{cluster}",
                    "score": table[key],
                }
            )
        return rows
    if isinstance(model, ls.LabelSemantifier):
        t = model.decision_threshold if threshold is None else threshold
        if isinstance(t, bool) or not isinstance(t, (int, float)) or not 0.0 < float(t) < 1.0:
            return _error(422, "invalid_threshold", "labeler threshold must be a number in (0, 1)")
        scored = ls.scored_statements(model, text, stmt_matrix=snapshot.stmt_matrix)
        rows = []
        for stmt, p in scored:
            if p >= float(t):
                rows.append(
                    {
                        "statement_id": statement_id(stmt.key),
                        "predicate": stmt.predicate,
                        "value": stmt.value,
                        "ontologized": stmt.ontologized,
                        "source": "labeler",
                        "score": p,
                    }
                )
        return rows
    return _error(500, "bad_model", f"unsupported model type {type(model).__name__}")


def _load_snapshot(path: str | Path) -> ModelSnapshot:
    model = load_artifact(path)
    matrix = model.statement_matrix() if isinstance(model, ls.LabelSemantifier) else None
    return ModelSnapshot(model=model, stmt_matrix=matrix)


_TRAIN_CONFIG_KEYS = {
    "cluster": {"k", "threshold", "seed", "max_iter", "tol", "restarts"},
    "labeler": {"rf_count", "epochs", "lr", "decision_threshold", "seed"},
}


def _validate_train_request(payload: dict) -> str | None:
    if not isinstance(payload.get("corpus_path"), str) or not payload["corpus_path"]:
        return "corpus_path must be a nonempty string"
    if not Path(payload["corpus_path"]).is_file():
        return f"corpus_path not readable: {payload['corpus_path']}"
    method = payload.get("method")
    if method not in ("cluster", "labeler"):
        return "method must be 'cluster' or 'labeler'"
    config = payload.get("config", {})
    if not isinstance(config, dict):
        return "config must be an object"
    unknown = set(config) - _TRAIN_CONFIG_KEYS[method]
    if unknown:
        return f"unknown config keys for {method}: {sorted(unknown)}"
    if method == "cluster":
        k = config.get("k", 8)
        if not isinstance(k, int) or isinstance(k, bool) or k < 1:
            return "config.k must be an integer >= 1"
    else:
        rf = config.get("rf_count", 170)
        if not isinstance(rf, int) or isinstance(rf, bool) or rf < 0:
            return "config.rf_count must be an integer >= 0"
    return None


def create_app(
    data_dir: str | Path,
    model_path: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="bioassay semantification service", docs_url=None, redoc_url=None)
    store = CurationStore(data_dir)
    jobs = TrainingJobs()
    app.state.store = store
    app.state.jobs = jobs
    app.state.snapshot = _load_snapshot(model_path) if model_path else None

    @app.exception_handler(StarletteHTTPException)
    async def http_error(_request, exc: StarletteHTTPException):
        return _error(exc.status_code, str(exc.status_code), str(exc.detail))

    @app.get("/api/v1/health")
    async def health():
        return {"status": "ok", "model_loaded": app.state.snapshot is not None}

    @app.post("/api/v1/assays")
    async def create_assay(request: Request):
        snapshot = app.state.snapshot
        if snapshot is None:
            return _error(409, "no_model", "no model is loaded; activate one first")
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(422, "invalid_body", "request body must be a JSON object")
        if not isinstance(payload, dict):
            return _error(422, "invalid_body", "request body must be a JSON object")
        text = payload.get("text")
        if not isinstance(text, str) or not text.strip():
            return _error(422, "empty_text", "text must be a nonempty string")
        rows = _predict_statements(snapshot, text, payload.get("threshold"))
        if isinstance(rows, JSONResponse):
            return rows
        record = store.create(text, rows)
        return JSONResponse(
            status_code=201,
            content={"assay_uid": record["assay_uid"], "statements": rows},
        )

    @app.get("/api/v1/assays")
    async def list_assays():
        return {
            "assays": [
                {
                    "assay_uid": r["assay_uid"],
                    "created": r["created"],
                    "n_statements": len(r["predicted"]) - len(r["deleted_ids"]),
                }
                for r in store.all_records()
            ]
        }

    @app.get("/api/v1/assays/{uid}")
    async def get_assay(uid: str, include_deleted: bool = False):
        try:
            record = store.get(uid)
        except KeyError:
            return _error(404, "unknown_assay", f"no assay {uid}")
        deleted = set(record["deleted_ids"])
        statements = []
        for row in record["predicted"]:
            is_deleted = row["statement_id"] in deleted
            if is_deleted and not include_deleted:
                continue
            statements.append({**row, "deleted": is_deleted})
        return {
            "assay_uid": record["assay_uid"],
            "text": record["text"],
            "statements": statements,
            "created": record["created"],
            "updated": record["updated"],
        }

    @app.delete("/api/v1/assays/{uid}/statements/{sid}")
    async def delete_statement(uid: str, sid: str):
        try:
            remaining = store.delete_statement(uid, sid)
        except KeyError as exc:
            kind = "unknown_assay" if exc.args and exc.args[0] == uid else "unknown_statement"
            return _error(404, kind, f"no such assay/statement: {uid}/{sid}")
        return {"remaining": remaining}

    @app.post("/api/v1/models/train")
    async def train_model(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(422, "invalid_body", "request body must be a JSON object")
        if not isinstance(payload, dict):
            return _error(422, "invalid_body", "request body must be a JSON object")
        problem = _validate_train_request(payload)
        if problem:
            return _error(422, "invalid_config", problem)
        corpus_path = payload["corpus_path"]
        method = payload["method"]
        config = dict(payload.get("config", {}))
        models_dir = store.data_dir / "models"
        models_dir.mkdir(exist_ok=True)

        def run(job_id: str) -> None:
            try:
                corpus = load_corpus(corpus_path)
                seed = int(config.get("seed", 42))
                if method == "cluster":
                    model = cs.fit_semantifier(
                        list(corpus.assays),
                        k=int(config.get("k", 8)),
                        seed=seed,
                        max_iter=int(config.get("max_iter", 300)),
                        tol=float(config.get("tol", 1e-4)),
                        restarts=int(config.get("restarts", 1)),
                        default_threshold=int(config.get("threshold", 1)),
                    )
                else:
                    model = ls.train_labeler(
                        list(corpus.assays),
                        rf_count=int(config.get("rf_count", 170)),
                        seed=seed,
                        epochs=int(config.get("epochs", 200)),
                        lr=float(config.get("lr", 0.5)),
                        decision_threshold=float(config.get("decision_threshold", 0.5)),
                    )
                out = models_dir / f"{method}-{job_id}.json"
                save_artifact(model, out, corpus_fingerprint=fingerprint_corpus(corpus), config=config)
                jobs.finish(job_id, str(out), None)
            except (CorpusError, ValueError, ArithmeticError, OSError) as exc:
                jobs.finish(job_id, None, f"{type(exc).__name__}: {exc}")

        job_id = jobs.start(run)
        if job_id is None:
            return _error(409, "job_running", "a training job is already running")
        return JSONResponse(status_code=202, content={"job_id": job_id})

    @app.get("/api/v1/models/jobs/{job_id}")
    async def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            return _error(404, "unknown_job", f"no job {job_id}")
        return job

    @app.post("/api/v1/models/activate")
    async def activate_model(request: Request):
        try:
            payload = await request.json()
        except json.JSONDecodeError:
            return _error(422, "invalid_body", "request body must be a JSON object")
        path = payload.get("artifact_path") if isinstance(payload, dict) else None
        if not isinstance(path, str) or not path:
            return _error(422, "invalid_config", "artifact_path must be a nonempty string")
        try:
            snapshot = _load_snapshot(path)
        except FileNotFoundError:
            return _error(404, "missing_artifact", f"artifact not found: {path}")
        except ArtifactError as exc:
            return _error(422, "bad_artifact", str(exc))
        app.state.snapshot = snapshot  # single reference swap: old or new, never both
        return {"activated": path}

    @app.get("/api/v1/export")
    async def export_records():
        lines = []
        for record in store.all_records():
            deleted = set(record["deleted_ids"])
            statements = [
                {"predicate": s["predicate"], "value": s["value"], "ontologized": s["ontologized"]}
                for s in record["predicted"]
                if s["statement_id"] not in deleted
            ]
            lines.append(
                json.dumps(
                    {"id": record["assay_uid"], "text": record["text"], "statements": statements},
                    sort_keys=True,
                    ensure_ascii=False,
                )
            )
        body = "\n".join(lines) + ("\n" if lines else "")
        return PlainTextResponse(content=body, media_type="application/x-ndjson")

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
