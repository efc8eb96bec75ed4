"""HTTP service for the labeling queue, findings list and annotated pages.

Built on the stdlib threading HTTP server. Mutations (label append, model
swap) are serialized behind a single lock; reads work on immutable snapshots.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .banner import KeywordLexicon, load_default_lexicon
from .corpus import CorpusManifest, load_manifest
from .darkpattern import DEFAULT_THRESHOLD
from .pipeline import (
    MissingBanner,
    ScanResult,
    annotate_entry,
    load_entry_tree,
    scan_corpus,
)
from .textml import (
    ButtonClass,
    LabelRecord,
    append_label,
    build_vocabulary,
    default_seed_phrases,
    load_label_store,
    load_model,
    save_model,
    seed_labels,
    select_queries,
    train_svm,
)

DEFAULT_QUEUE_LIMIT = 10


class ServiceError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class _Snapshot:
    model: object
    vocab: object
    scans: list[ScanResult]
    pool: list[str]


class ReviewService:
    """Application state behind the HTTP endpoints; usable without HTTP."""

    def __init__(
        self,
        corpus_dir: str | Path,
        model_path: str | Path,
        labels_path: str | Path,
        lexicon: KeywordLexicon | None = None,
        threshold: float = DEFAULT_THRESHOLD,
        include_seeds: bool = True,
    ):
        self.corpus_dir = Path(corpus_dir)
        self.model_path = Path(model_path)
        self.labels_path = Path(labels_path)
        self.lexicon = lexicon or load_default_lexicon()
        self.threshold = threshold
        self.include_seeds = include_seeds
        self.manifest: CorpusManifest = load_manifest(self.corpus_dir)
        self._write_lock = threading.Lock()
        model, vocab = load_model(self.model_path)
        self._snapshot = self._build_snapshot(model, vocab)

    # -- state construction --

    def _labeled_texts(self) -> set[str]:
        if not self.labels_path.exists():
            return set()
        return {r.text for r in load_label_store(self.labels_path)}

    def _build_snapshot(self, model, vocab) -> _Snapshot:
        scans = scan_corpus(
            self.corpus_dir, self.manifest, self.lexicon, model, vocab, self.threshold
        )
        labeled = self._labeled_texts()
        pool_set = {
            row["label"]
            for scan in scans
            for row in scan.clickables
            if row["label"] not in labeled
        }
        return _Snapshot(model=model, vocab=vocab, scans=scans, pool=sorted(pool_set))

    def _training_records(self) -> list[LabelRecord]:
        records: list[LabelRecord] = []
        if self.include_seeds:
            phrases = default_seed_phrases()
            records.extend(seed_labels([p for ps in phrases.values() for p in ps]))
        if self.labels_path.exists():
            records.extend(load_label_store(self.labels_path))
        deduped: dict[tuple[str, str], LabelRecord] = {}
        for record in records:
            deduped[(record.text, record.source)] = record
        return list(deduped.values())

    # -- endpoint implementations --

    def queue(self, limit: int = DEFAULT_QUEUE_LIMIT) -> list[dict]:
        snap = self._snapshot
        queries = select_queries(snap.model, snap.pool, max(1, limit), snap.vocab)
        return [
            {"text": q.text, "predicted": q.predicted.label,
             "margin": q.margin, "position": i}
            for i, q in enumerate(queries)
        ]

    def submit_label(self, text: str, label: str) -> dict:
        if not isinstance(text, str) or not text.strip():
            raise ServiceError(400, "text must be a non-empty string")
        try:
            cls = ButtonClass.from_label(label)
        except ValueError:
            raise ServiceError(400, "label must be one of accept|reject|settings|other")
        record = LabelRecord(text=text, label=cls, source="active")
        with self._write_lock:
            existing = {
                (r.text, r.source)
                for r in (load_label_store(self.labels_path) if self.labels_path.exists() else [])
            }
            duplicate = (record.text, record.source) in existing
            if not duplicate:
                append_label(self.labels_path, record)
            snap = self._snapshot
            pool = [t for t in snap.pool if t != text]
            self._snapshot = _Snapshot(
                model=snap.model, vocab=snap.vocab, scans=snap.scans, pool=pool
            )
        return {"ok": True, "duplicate": duplicate, "text": text, "label": cls.label}

    def retrain(self) -> dict:
        with self._write_lock:
            records = self._training_records()
            try:
                vocab = build_vocabulary([r.text for r in records], min_df=1)
                hp = self._snapshot.model.hyperparameters
                model = train_svm(
                    records, vocab,
                    lam=hp.get("lambda", 1e-3), epochs=hp.get("epochs", 50),
                    seed=hp.get("seed", 42),
                )
            except ValueError as exc:
                raise ServiceError(409, f"cannot retrain: {exc}")
            tmp = self.model_path.with_suffix(".tmp")
            save_model(tmp, model, vocab)
            os.replace(tmp, self.model_path)
            self._snapshot = self._build_snapshot(model, vocab)
        return {"ok": True, "trained_on": len(records)}

    def findings(self) -> list[dict]:
        out: list[dict] = []
        url_by_id = {e.id: e.url for e in self.manifest.entries}
        for scan in self._snapshot.scans:
            for f in scan.findings:
                out.append({
                    "entry_id": scan.entry_id,
                    "url": url_by_id.get(scan.entry_id, scan.url),
                    "kind": f["kind"],
                    "severity": f["severity"],
                    "score_total": f["score"]["total"] if f["score"] else None,
                    "annotated_url": f"/api/pages/{scan.entry_id}/annotated",
                })
        return out

    def annotated_page(self, entry_id: str) -> str:
        scan = next((s for s in self._snapshot.scans if s.entry_id == entry_id), None)
        if scan is None:
            raise ServiceError(404, f"unknown entry {entry_id}")
        entry = next(e for e in self.manifest.entries if e.id == entry_id)
        tree = load_entry_tree(self.corpus_dir, entry)
        try:
            return annotate_entry(tree, scan)
        except MissingBanner as exc:
            raise ServiceError(404, str(exc))


class _Handler(BaseHTTPRequestHandler):
    service: ReviewService
    ui_dir: Path | None = None

    # -- helpers --

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_html(self, html: str, status: int = 200) -> None:
        body = html.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "text/html; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _read_json_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            payload = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            raise ServiceError(400, "request body must be valid JSON")
        if not isinstance(payload, dict):
            raise ServiceError(400, "request body must be a JSON object")
        return payload

    def _serve_static(self, rel: str) -> bool:
        if self.ui_dir is None:
            return False
        target = (self.ui_dir / rel.lstrip("/")).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            return False
        content_types = {
            ".html": "text/html; charset=utf-8",
            ".js": "text/javascript; charset=utf-8",
            ".css": "text/css; charset=utf-8",
            ".json": "application/json; charset=utf-8",
            ".map": "application/json; charset=utf-8",
        }
        ctype = content_types.get(target.suffix, "application/octet-stream")
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        return True

    # -- routes --

    def do_GET(self) -> None:  # noqa: N802 (stdlib naming)
        parts = urlsplit(self.path)
        try:
            if parts.path == "/api/queue":
                query = parse_qs(parts.query)
                limit = int(query.get("limit", [str(DEFAULT_QUEUE_LIMIT)])[0])
                self._send_json({"queue": self.service.queue(limit)})
            elif parts.path == "/api/findings":
                self._send_json({"findings": self.service.findings()})
            elif parts.path.startswith("/api/pages/") and parts.path.endswith("/annotated"):
                entry_id = parts.path[len("/api/pages/"):-len("/annotated")]
                self._send_html(self.service.annotated_page(entry_id))
            elif parts.path == "/" and self._serve_static("index.html"):
                pass
            elif self._serve_static(parts.path):
                pass
            elif parts.path == "/":
                self._send_html(
                    "<html><body><h1>consentscan service</h1>"
                    "<p>API: /api/queue /api/labels /api/retrain /api/findings "
                    "/api/pages/&lt;id&gt;/annotated</p></body></html>"
                )
            else:
                self._send_json({"error": "not found"}, status=404)
        except ServiceError as exc:
            self._send_json({"error": exc.message}, status=exc.status)
        except ValueError:
            self._send_json({"error": "bad request"}, status=400)

    def do_POST(self) -> None:  # noqa: N802
        parts = urlsplit(self.path)
        try:
            if parts.path == "/api/labels":
                payload = self._read_json_body()
                if "text" not in payload or "label" not in payload:
                    raise ServiceError(400, "body must contain text and label")
                self._send_json(self.service.submit_label(payload["text"], payload["label"]))
            elif parts.path == "/api/retrain":
                self._send_json(self.service.retrain())
            else:
                self._send_json({"error": "not found"}, status=404)
        except ServiceError as exc:
            self._send_json({"error": exc.message}, status=exc.status)

    def log_message(self, *args) -> None:  # quiet by default
        pass


def make_server(
    service: ReviewService, port: int = 8080, host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    handler = type("BoundHandler", (_Handler,), {
        "service": service,
        "ui_dir": Path(ui_dir) if ui_dir else None,
    })
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(service: ReviewService, port: int, host: str = "127.0.0.1",
                  ui_dir: str | Path | None = None) -> None:
    server = make_server(service, port=port, host=host, ui_dir=ui_dir)
    try:
        server.serve_forever()
    finally:
        server.server_close()
