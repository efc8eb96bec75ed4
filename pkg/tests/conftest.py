import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from consentscan.corpus import CorpusEntry, CorpusManifest, entry_id_for, write_manifest
from consentscan.synthcorpus import FIXED_TIMESTAMP, generate_corpus
from consentscan.textml import (
    ButtonClass,
    LabelRecord,
    build_vocabulary,
    default_seed_phrases,
    save_model,
    seed_labels,
    train_svm,
)
from labelfixtures import TRAIN_LABELS


def seed_plus_fixture_records():
    phrases = default_seed_phrases()
    records = seed_labels([p for ps in phrases.values() for p in ps])
    records += [
        LabelRecord(text, ButtonClass.from_label(label), "manual")
        for text, label in TRAIN_LABELS
    ]
    return records


def train_default_model():
    records = seed_plus_fixture_records()
    vocab = build_vocabulary([r.text for r in records], min_df=1)
    model = train_svm(records, vocab, lam=1e-3, epochs=50, seed=42)
    return model, vocab


@pytest.fixture(scope="session")
def synth_corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("synthcorpus")
    generate_corpus(out, seed=42)
    return out


@pytest.fixture(scope="session")
def model_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    model, vocab = train_default_model()
    save_model(path, model, vocab)
    return path


def write_corpus(out_dir: Path, pages: dict[str, str]) -> CorpusManifest:
    """Lay out {name: html} as a crawl-style corpus with a manifest."""
    entries = []
    for name, html in pages.items():
        url = f"fixture://{name}"
        eid = entry_id_for(url)
        entry_dir = out_dir / eid
        entry_dir.mkdir(parents=True, exist_ok=True)
        (entry_dir / "page.html").write_text(html, encoding="utf-8")
        entries.append(CorpusEntry(
            id=eid, url=url, fetched_at=FIXED_TIMESTAMP, http_status=200,
            language="en", html_path=f"{eid}/page.html",
        ))
    manifest = CorpusManifest(entries=entries)
    write_manifest(out_dir, manifest)
    return manifest


class FixtureServer:
    """Tiny HTTP server serving a dict of path -> (status, content_type, body)."""

    def __init__(self):
        self.routes = {}
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_GET(self):
                route = outer.routes.get(self.path)
                if route is None:
                    self.send_response(404)
                    self.end_headers()
                    self.wfile.write(b"not found")
                    return
                status, content_type, body = route
                self.send_response(status)
                if 300 <= status < 400:
                    self.send_header("Location", body.decode())
                    self.end_headers()
                    return
                self.send_header("Content-Type", content_type)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self):
        host, port = self.server.server_address
        return f"http://{host}:{port}"

    def add_page(self, path, html, status=200):
        self.routes[path] = (status, "text/html; charset=utf-8", html.encode("utf-8"))

    def add_css(self, path, css):
        self.routes[path] = (200, "text/css", css.encode("utf-8"))

    def add_redirect(self, path, target):
        self.routes[path] = (302, "", target.encode("utf-8"))

    def close(self):
        self.server.shutdown()
        self.server.server_close()


@pytest.fixture
def fixture_server():
    server = FixtureServer()
    yield server
    server.close()


def criterion(label):
    """Tag an acceptance test so the report hook prints its pass/fail line."""

    def mark(func):
        func._criterion = label
        return func

    return mark


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call":
        return
    label = getattr(item.function, "_criterion", None)
    if label:
        status = "PASS" if report.passed else ("SKIP" if report.skipped else "FAIL")
        print(f"[acceptance] {status}: {label}")
