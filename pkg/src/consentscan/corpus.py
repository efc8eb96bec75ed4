"""Page/stylesheet acquisition and the on-disk corpus with its manifest.

Fetching is best-effort: per-URL failures are recorded in the manifest and
never abort a crawl. Language detection is a deterministic stopword-ratio
heuristic over de/en.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from datetime import datetime, timezone
from pathlib import Path
from urllib.parse import urljoin, urlsplit

import requests

from . import __version__
from .dom import parse_html, subtree_text
from .textml import tokenize

USER_AGENT = f"consentscan/{__version__} (research crawler)"
MAX_REDIRECTS = 5
DEFAULT_TIMEOUT_S = 10.0
MAX_PARALLEL_FETCHES = 8
LANGUAGE_SCORE_FLOOR = 0.05

GERMAN_STOPWORDS = frozenset("""
der die das und nicht wir sie mit für auf werden ein eine einen dem den des
ist sind war zu im in aus bei von oder auch nur wie uns ihre unsere diese
dieser kann können um über nach
""".split())

ENGLISH_STOPWORDS = frozenset("""
the and of to in we you with for that a an is are was this these our your
on at or as by from it its be have has can will about more when which
""".split())


@dataclass
class FetchedStylesheet:
    url: str
    content: bytes | None  # None when the download failed


@dataclass
class FetchResult:
    status: int
    html: bytes
    stylesheets: list[FetchedStylesheet]
    error: str | None = None


@dataclass
class CorpusEntry:
    id: str
    url: str
    fetched_at: str
    http_status: int
    language: str  # "de" | "en" | "unknown"
    html_path: str | None
    stylesheet_paths: list[str] = field(default_factory=list)
    missing_stylesheets: list[str] = field(default_factory=list)
    error: str | None = None
    language_filtered: bool = False


@dataclass
class CorpusManifest:
    entries: list[CorpusEntry]
    created_with: str = f"consentscan {__version__}"

    def to_json(self) -> str:
        return json.dumps(
            {"created_with": self.created_with,
             "entries": [asdict(e) for e in self.entries]},
            ensure_ascii=False, indent=2,
        ) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CorpusManifest":
        raw = json.loads(text)
        entries = [CorpusEntry(**e) for e in raw["entries"]]
        return cls(entries=entries, created_with=raw.get("created_with", ""))


def entry_id_for(url: str) -> str:
    return hashlib.sha256(url.encode("utf-8")).hexdigest()[:16]


def detect_language(text: str) -> str:
    """de/en by stopword ratio; 'unknown' below the 5% floor."""
    tokens = tokenize(text)
    if not tokens:
        return "unknown"
    score_de = sum(1 for t in tokens if t in GERMAN_STOPWORDS) / len(tokens)
    score_en = sum(1 for t in tokens if t in ENGLISH_STOPWORDS) / len(tokens)
    best, score = ("de", score_de) if score_de >= score_en else ("en", score_en)
    return best if score >= LANGUAGE_SCORE_FLOOR else "unknown"


def _extract_stylesheet_urls(html: bytes, base_url: str) -> list[str]:
    tree = parse_html(html)
    urls: list[str] = []
    for nid in tree.elements():
        node = tree.node(nid)
        if node.tag != "link":
            continue
        rel = node.attributes.get("rel", "").lower()
        href = node.attributes.get("href", "")
        if "stylesheet" in rel.split() and href:
            urls.append(urljoin(base_url, href))
    return urls


def fetch_page(url: str, timeout_s: float = DEFAULT_TIMEOUT_S,
               session: requests.Session | None = None) -> FetchResult:
    """Fetch one page plus its linked stylesheets, best-effort."""
    own_session = session is None
    sess = session or requests.Session()
    sess.max_redirects = MAX_REDIRECTS
    headers = {"User-Agent": USER_AGENT}
    try:
        try:
            response = sess.get(url, timeout=timeout_s, headers=headers)
        except requests.Timeout:
            return FetchResult(status=0, html=b"", stylesheets=[], error="timeout")
        except requests.TooManyRedirects:
            return FetchResult(status=0, html=b"", stylesheets=[], error="too_many_redirects")
        except requests.ConnectionError as exc:
            return FetchResult(status=0, html=b"", stylesheets=[], error=f"connection: {exc}")
        except requests.RequestException as exc:
            return FetchResult(status=0, html=b"", stylesheets=[], error=f"request: {exc}")

        html = response.content
        if response.status_code != 200:
            return FetchResult(status=response.status_code, html=html, stylesheets=[])

        sheets: list[FetchedStylesheet] = []
        for sheet_url in _extract_stylesheet_urls(html, response.url):
            try:
                sheet = sess.get(sheet_url, timeout=timeout_s, headers=headers)
                content = sheet.content if sheet.status_code == 200 else None
            except requests.RequestException:
                content = None
            sheets.append(FetchedStylesheet(url=sheet_url, content=content))
        return FetchResult(status=200, html=html, stylesheets=sheets)
    finally:
        if own_session:
            sess.close()


def _store_entry(out_dir: Path, url: str, result: FetchResult,
                 language_filter: str | None) -> CorpusEntry:
    eid = entry_id_for(url)
    fetched_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    entry = CorpusEntry(
        id=eid, url=url, fetched_at=fetched_at, http_status=result.status,
        language="unknown", html_path=None, error=result.error,
    )
    if result.status != 200:
        return entry

    entry_dir = out_dir / eid
    css_dir = entry_dir / "css"
    css_dir.mkdir(parents=True, exist_ok=True)
    html_path = entry_dir / "page.html"
    html_path.write_bytes(result.html)
    entry.html_path = f"{eid}/page.html"

    for n, sheet in enumerate(result.stylesheets):
        if sheet.content is None:
            entry.missing_stylesheets.append(sheet.url)
            continue
        rel = f"{eid}/css/{n}.css"
        (out_dir / rel).write_bytes(sheet.content)
        entry.stylesheet_paths.append(rel)

    tree = parse_html(result.html)
    entry.language = detect_language(subtree_text(tree, tree.root))
    if language_filter and entry.language != language_filter:
        entry.language_filtered = True
    return entry


def crawl(urls: list[str], out_dir: str | Path, timeout_s: float = DEFAULT_TIMEOUT_S,
          language_filter: str | None = None,
          max_parallel: int = MAX_PARALLEL_FETCHES) -> CorpusManifest:
    """Fetch all URLs with bounded parallelism and per-host serialization."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    host_locks: dict[str, threading.Lock] = {}
    locks_guard = threading.Lock()

    def lock_for(url: str) -> threading.Lock:
        host = urlsplit(url).netloc
        with locks_guard:
            return host_locks.setdefault(host, threading.Lock())

    def fetch_one(url: str) -> CorpusEntry:
        with lock_for(url):
            result = fetch_page(url, timeout_s=timeout_s)
        return _store_entry(out, url, result, language_filter)

    if max_parallel <= 1 or len(urls) <= 1:
        entries = [fetch_one(u) for u in urls]
    else:
        with ThreadPoolExecutor(max_workers=max_parallel) as pool:
            entries = list(pool.map(fetch_one, urls))

    manifest = CorpusManifest(entries=entries)
    write_manifest(out, manifest)
    return manifest


def write_manifest(out_dir: str | Path, manifest: CorpusManifest) -> None:
    """Atomic write: temp file then rename."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tmp = out / "manifest.json.tmp"
    tmp.write_text(manifest.to_json(), encoding="utf-8")
    os.replace(tmp, out / "manifest.json")


def load_manifest(corpus_dir: str | Path) -> CorpusManifest:
    path = Path(corpus_dir) / "manifest.json"
    return CorpusManifest.from_json(path.read_text(encoding="utf-8"))


def load_urls_file(path: str | Path) -> list[str]:
    """One URL per line; blank lines and # comments skipped."""
    urls: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                urls.append(line)
    return urls
