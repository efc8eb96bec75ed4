import json

from consentscan.corpus import (
    GERMAN_STOPWORDS,
    ENGLISH_STOPWORDS,
    crawl,
    detect_language,
    entry_id_for,
    fetch_page,
    load_manifest,
    load_urls_file,
)
from consentscan.textml import tokenize

GERMAN_PAGE = """
<html><head><link rel="stylesheet" href="/style.css"></head>
<body><div>Wir verwenden Cookies und ähnliche Technologien, um die Nutzung
der Seite zu verbessern und Ihnen passende Inhalte zu zeigen.</div>
<button>Alle akzeptieren</button></body></html>
"""

ENGLISH_PAGE = """
<html><body><p>We use cookies to improve your experience and to show you
relevant content across the site.</p></body></html>
"""


class TestDetectLanguage:
    def test_german_sentence(self):
        sentence = "Wir verwenden Cookies und ähnliche Technologien"
        tokens = tokenize(sentence)
        # stopword-count oracle: exactly {wir, und} are German stopwords here
        assert sum(1 for t in tokens if t in GERMAN_STOPWORDS) == 2
        assert sum(1 for t in tokens if t in ENGLISH_STOPWORDS) == 0
        assert 2 / len(tokens) >= 0.05
        assert detect_language(sentence) == "de"

    def test_english_sentence(self):
        sentence = "We use cookies to improve your experience"
        tokens = tokenize(sentence)
        en_count = sum(1 for t in tokens if t in ENGLISH_STOPWORDS)
        assert en_count >= 2 and en_count / len(tokens) >= 0.05
        assert sum(1 for t in tokens if t in GERMAN_STOPWORDS) == 0
        assert detect_language(sentence) == "en"

    def test_numbers_unknown(self):
        assert detect_language("1234 5678") == "unknown"

    def test_empty_unknown(self):
        assert detect_language("") == "unknown"

    def test_deterministic(self):
        text = "Wir verwenden Cookies to improve"
        assert detect_language(text) == detect_language(text)


class TestFetchPage:
    def test_page_with_stylesheet(self, fixture_server):
        fixture_server.add_page("/", GERMAN_PAGE)
        fixture_server.add_css("/style.css", "body{color:#000}")
        result = fetch_page(fixture_server.base_url + "/")
        assert result.status == 200
        assert len(result.stylesheets) == 1
        assert result.stylesheets[0].content == b"body{color:#000}"

    def test_404_recorded(self, fixture_server):
        fixture_server.add_page("/gone", "nope", status=404)
        result = fetch_page(fixture_server.base_url + "/gone")
        assert result.status == 404
        assert result.stylesheets == []

    def test_redirect_chain_of_six(self, fixture_server):
        for i in range(7):
            fixture_server.add_redirect(f"/r{i}", fixture_server.base_url + f"/r{i+1}")
        result = fetch_page(fixture_server.base_url + "/r0")
        assert result.error == "too_many_redirects"
        assert result.status == 0

    def test_short_redirect_followed(self, fixture_server):
        fixture_server.add_redirect("/a", fixture_server.base_url + "/b")
        fixture_server.add_page("/b", "<p>landed</p>")
        result = fetch_page(fixture_server.base_url + "/a")
        assert result.status == 200
        assert b"landed" in result.html

    def test_missing_stylesheet_best_effort(self, fixture_server):
        fixture_server.add_page(
            "/", '<html><head><link rel="stylesheet" href="/absent.css"></head>'
                 "<body>x</body></html>"
        )
        result = fetch_page(fixture_server.base_url + "/")
        assert result.status == 200
        assert result.stylesheets[0].content is None

    def test_connection_error(self):
        result = fetch_page("http://127.0.0.1:1/unreachable", timeout_s=1)
        assert result.status == 0
        assert result.error is not None


class TestCrawl:
    def serve_three(self, fixture_server):
        fixture_server.add_page("/de", GERMAN_PAGE)
        fixture_server.add_css("/style.css", "body{color:#000}")
        fixture_server.add_page("/en", ENGLISH_PAGE)
        fixture_server.add_page("/missing", "x", status=404)
        base = fixture_server.base_url
        return [base + "/de", base + "/en", base + "/missing"]

    def test_three_urls(self, fixture_server, tmp_path):
        urls = self.serve_three(fixture_server)
        manifest = crawl(urls, tmp_path, timeout_s=5)
        assert len(manifest.entries) == 3
        statuses = {e.url.rsplit("/", 1)[1]: e.http_status for e in manifest.entries}
        assert statuses == {"de": 200, "en": 200, "missing": 404}
        de_entry = next(e for e in manifest.entries if e.url.endswith("/de"))
        assert (tmp_path / de_entry.html_path).exists()
        assert len(de_entry.stylesheet_paths) == 1
        assert (tmp_path / de_entry.stylesheet_paths[0]).exists()
        assert de_entry.language == "de"
        assert (tmp_path / "manifest.json").exists()

    def test_language_filter_marks_entries(self, fixture_server, tmp_path):
        urls = self.serve_three(fixture_server)
        manifest = crawl(urls, tmp_path, timeout_s=5, language_filter="de")
        en_entry = next(e for e in manifest.entries if e.url.endswith("/en"))
        de_entry = next(e for e in manifest.entries if e.url.endswith("/de"))
        assert en_entry.language_filtered is True
        assert de_entry.language_filtered is False

    def test_empty_url_list(self, tmp_path):
        manifest = crawl([], tmp_path)
        assert manifest.entries == []
        loaded = load_manifest(tmp_path)
        assert loaded.entries == []

    def test_idempotent_modulo_timestamps(self, fixture_server, tmp_path):
        urls = self.serve_three(fixture_server)
        m1 = crawl(urls, tmp_path / "one", timeout_s=5)
        m2 = crawl(urls, tmp_path / "two", timeout_s=5)

        def normalize(manifest):
            entries = []
            for e in manifest.entries:
                d = dict(e.__dict__)
                d.pop("fetched_at")
                entries.append(d)
            return entries

        assert normalize(m1) == normalize(m2)

    def test_manifest_round_trip(self, fixture_server, tmp_path):
        urls = self.serve_three(fixture_server)
        manifest = crawl(urls, tmp_path, timeout_s=5)
        loaded = load_manifest(tmp_path)
        assert loaded.entries == manifest.entries

    def test_stylesheet_paths_exist_or_missing(self, fixture_server, tmp_path):
        fixture_server.add_page(
            "/mixed",
            '<html><head><link rel="stylesheet" href="/style.css">'
            '<link rel="stylesheet" href="/absent.css"></head>'
            "<body><p>Wir verwenden Cookies und weitere Dienste auf der Seite.</p></body></html>",
        )
        fixture_server.add_css("/style.css", "p{}")
        manifest = crawl([fixture_server.base_url + "/mixed"], tmp_path, timeout_s=5)
        entry = manifest.entries[0]
        assert len(entry.stylesheet_paths) == 1
        assert (tmp_path / entry.stylesheet_paths[0]).exists()
        assert len(entry.missing_stylesheets) == 1
        assert entry.missing_stylesheets[0].endswith("/absent.css")


class TestCrawlCli:
    def test_crawl_then_scan(self, fixture_server, tmp_path):
        from consentscan.cli import run_cli

        fixture_server.add_page("/de", GERMAN_PAGE)
        fixture_server.add_css("/style.css", "body{color:#000}")
        urls_file = tmp_path / "urls.txt"
        urls_file.write_text(f"{fixture_server.base_url}/de\n", encoding="utf-8")
        corpus = tmp_path / "corpus"
        assert run_cli(["crawl", "--urls", str(urls_file), "--out", str(corpus),
                        "--timeout", "5"]) == 0
        assert (corpus / "manifest.json").exists()
        report = tmp_path / "report.json"
        assert run_cli(["scan", "--corpus", str(corpus), "--report", str(report)]) == 0
        payload = json.loads(report.read_text())
        assert len(payload["entries"]) == 1

    def test_crawl_missing_urls_file(self, tmp_path):
        from consentscan.cli import run_cli

        assert run_cli(["crawl", "--urls", str(tmp_path / "absent.txt"),
                        "--out", str(tmp_path / "c")]) == 2


class TestHelpers:
    def test_entry_id_stable(self):
        assert entry_id_for("http://x/") == entry_id_for("http://x/")
        assert entry_id_for("http://x/") != entry_id_for("http://y/")
        assert len(entry_id_for("http://x/")) == 16

    def test_load_urls_file(self, tmp_path):
        path = tmp_path / "urls.txt"
        path.write_text("# comment\nhttp://a/\n\nhttp://b/\n", encoding="utf-8")
        assert load_urls_file(path) == ["http://a/", "http://b/"]

    def test_manifest_json_shape(self, tmp_path):
        manifest = crawl([], tmp_path)
        raw = json.loads((tmp_path / "manifest.json").read_text())
        assert raw["entries"] == []
        assert "consentscan" in raw["created_with"]
