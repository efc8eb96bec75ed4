"""Deterministic synthetic page corpus with ground-truth banner annotations.

Generates consent banners in varied positions, styles and languages plus
banner-free pages, laid out exactly like a crawl output (manifest.json,
<id>/page.html, <id>/css/<n>.css) with a ground_truth.json beside it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import CorpusEntry, CorpusManifest, detect_language, entry_id_for, write_manifest
from .dom import parse_html, subtree_text

FIXED_TIMESTAMP = "2024-01-01T00:00:00+00:00"
GROUND_TRUTH_MARKER = "data-synth-banner"

BANNER_PAGES = 30
PLAIN_PAGES = 10

# pattern -> (banner bg/fg, accept bg/fg, reject bg/fg or None, settings?)
PALETTES = {
    "navy": {
        "banner": ("#052962", "#ffffff"),
        "accept": ("#ffe500", "#052962"),
        "reject": ("#0a3570", "#ffffff"),
    },
    "light": {
        "banner": ("#f5f5f5", "#222222"),
        "accept": ("#1a73e8", "#ffffff"),
        "reject": ("#efefef", "#555555"),
    },
    "green": {
        "banner": ("#0b3d2e", "#ffffff"),
        "accept": ("#ffd33d", "#0b3d2e"),
        "reject": ("#11503c", "#dddddd"),
    },
    "plain": {
        "banner": ("#ffffff", "#111111"),
        "accept": ("#e0e0e0", "#111111"),
        "reject": ("#e0e0e0", "#111111"),
    },
}

CONSENT_TEXT = {
    "de": (
        "Wir verwenden Cookies und ähnliche Technologien, um Inhalte zu "
        "personalisieren und unsere Dienste fortlaufend zu verbessern. "
        "Einige sind notwendig, andere helfen uns bei Analyse und Werbung."
    ),
    "en": (
        "We use cookies and similar technologies to personalise content "
        "and keep improving our services. Some are required while others "
        "support analytics and advertising partners."
    ),
}

BUTTON_LABELS = {
    "de": {
        "accept": ["Alle akzeptieren", "Akzeptieren", "Zustimmen", "Alles akzeptieren"],
        "reject": ["Alle ablehnen", "Ablehnen", "Nur notwendige Cookies"],
        "settings": ["Einstellungen", "Cookie-Einstellungen", "Auswahl verwalten"],
    },
    "en": {
        "accept": ["Accept all", "Agree", "OK, got it", "Allow all"],
        "reject": ["Reject all", "Decline", "Only necessary"],
        "settings": ["Manage settings", "Cookie settings", "More options"],
    },
}

# filler prose kept free of every consent keyword (including substrings)
FILLER_PARAGRAPHS = [
    "Der Gemeinschaftsgarten hinter dem alten Bahnhof wird jeden Samstag "
    "von Nachbarn gepflegt, die Tomaten, Bohnen und Kräuter anbauen.",
    "Die Wettervorhersage für das Wochenende verspricht milde Temperaturen "
    "und einen klaren Himmel über der gesamten Region.",
    "Our community orchard planted twenty young apple trees last spring, "
    "and volunteers water them every other evening during summer.",
    "The railway museum reopened its eastern hall, showing restored engines "
    "from the early decades of regional transport history.",
    "Auf dem Wochenmarkt gab es diese Woche frische Pilze, Kürbisse und "
    "das erste Wintergemüse aus der Umgebung.",
    "A small workshop on bicycle repair takes place at the library hall, "
    "covering brakes, gears and simple roadside fixes.",
    "Die Theatergruppe probt derzeit ein Stück über eine Dorfkapelle, die "
    "einen verlorenen Notenkoffer sucht.",
    "Migrating cranes rested near the lake this week, drawing birdwatchers "
    "from nearby towns with long lenses and folding chairs.",
]

NAV_LINKS = {
    "de": ["Start", "Nachrichten", "Veranstaltungen", "Über uns"],
    "en": ["Home", "News", "Events", "About"],
}

FOOTER_LINKS = {
    "de": ["Impressum", "Kontakt"],
    "en": ["Imprint", "Contact"],
}

POSITIONS = ("top", "bottom", "modal", "corner", "inline")
PATTERNS = ("dark", "dark", "equal", "missing_reject", "reject_prominent")
CSS_MODES = ("block", "inline", "external")


@dataclass
class PageSpec:
    index: int
    has_banner: bool
    language: str
    position: str | None = None
    pattern: str | None = None
    palette: str | None = None
    css_mode: str | None = None
    hinted_id: bool = True
    keyword_prose: bool = False  # plain page mentioning cookies in prose only


def _page_specs(rng: random.Random) -> list[PageSpec]:
    specs: list[PageSpec] = []
    for i in range(BANNER_PAGES):
        pattern = PATTERNS[i % len(PATTERNS)]
        palette = ("plain" if pattern == "equal"
                   else rng.choice(["navy", "light", "green"]))
        specs.append(PageSpec(
            index=i,
            has_banner=True,
            language="de" if i % 2 == 0 else "en",
            position=POSITIONS[i % len(POSITIONS)],
            pattern=pattern,
            palette=palette,
            css_mode=CSS_MODES[i % len(CSS_MODES)],
            hinted_id=(i % 3 != 2),
        ))
    for j in range(PLAIN_PAGES):
        specs.append(PageSpec(
            index=BANNER_PAGES + j,
            has_banner=False,
            language="de" if j % 2 == 0 else "en",
            keyword_prose=(j % 5 == 4),
        ))
    return specs


def _banner_css(spec: PageSpec, banner_id: str) -> tuple[str, dict[str, str]]:
    """CSS block text plus per-role inline declarations for css_mode=inline."""
    palette = PALETTES[spec.palette]
    banner_bg, banner_fg = palette["banner"]
    accept_bg, accept_fg = palette["accept"]
    reject_bg, reject_fg = palette["reject"]
    if spec.pattern == "reject_prominent":
        accept_bg, accept_fg, reject_bg, reject_fg = reject_bg, reject_fg, accept_bg, accept_fg

    placement = {
        "top": "position:fixed;z-index:1000",
        "bottom": "position:fixed;z-index:1000",
        "modal": "position:fixed;z-index:2000",
        "corner": "position:absolute;z-index:50",
        "inline": "position:static",
    }[spec.position]

    decls = {
        "banner": f"{placement};background-color:{banner_bg};color:{banner_fg}",
        "accept": f"background-color:{accept_bg};color:{accept_fg};font-size:17px",
        "reject": f"background-color:{reject_bg};color:{reject_fg};font-size:14px",
        "settings": f"background-color:{reject_bg};color:{reject_fg};font-size:14px",
    }
    if spec.pattern == "equal":
        decls["accept"] = f"background-color:{accept_bg};color:{accept_fg};font-size:15px"
        decls["reject"] = f"background-color:{reject_bg};color:{reject_fg};font-size:15px"

    block = (
        f"#{banner_id} {{ {decls['banner']} }}\n"
        f"#{banner_id} .btn-accept {{ {decls['accept']} }}\n"
        f"#{banner_id} .btn-reject {{ {decls['reject']} }}\n"
        f"#{banner_id} .btn-settings {{ {decls['settings']} }}\n"
    )
    return block, decls


def _banner_html(spec: PageSpec, rng: random.Random, banner_id: str,
                 decls: dict[str, str] | None) -> str:
    labels = BUTTON_LABELS[spec.language]
    accept = rng.choice(labels["accept"])
    reject = rng.choice(labels["reject"])
    settings = rng.choice(labels["settings"])

    def style_attr(role: str) -> str:
        return f' style="{decls[role]}"' if decls else ""

    buttons = [f'<button class="btn-accept"{style_attr("accept")}>{accept}</button>']
    if spec.pattern == "missing_reject":
        buttons.append(
            f'<button class="btn-settings"{style_attr("settings")}>{settings}</button>'
        )
    else:
        buttons.append(f'<button class="btn-reject"{style_attr("reject")}>{reject}</button>')

    text = CONSENT_TEXT[spec.language]
    inner = f"<p>{text}</p><div class=\"actions\">{''.join(buttons)}</div>"
    return (
        f'<div id="{banner_id}" {GROUND_TRUTH_MARKER}="1"{style_attr("banner")}>'
        f"{inner}</div>"
    )


def _page_html(spec: PageSpec, rng: random.Random) -> str:
    lang = spec.language
    nav = "".join(f'<a href="/{i}">{t}</a> ' for i, t in enumerate(NAV_LINKS[lang]))
    paragraphs = rng.sample(FILLER_PARAGRAPHS, 3)
    if spec.keyword_prose:
        extra = ("Die Bäckerei erklärte, dass ihre Cookies aus Hafer gebacken "
                 "werden und nichts mit dem Internet zu tun haben."
                 if lang == "de" else
                 "The bakery explained that its cookies are oat-based and "
                 "have nothing to do with the internet at all.")
        paragraphs.append(extra)
    main = "".join(f"<p>{p}</p>" for p in paragraphs)
    footer_links = " · ".join(
        f'<a href="/f{i}">{t}</a>' for i, t in enumerate(FOOTER_LINKS[lang])
    )

    head_css = ""
    link_css = ""
    banner = ""
    if spec.has_banner:
        banner_id = f"cmp-container-{spec.index}" if spec.hinted_id else f"layer-{spec.index}"
        block, decls = _banner_css(spec, banner_id)
        if spec.css_mode == "block":
            head_css = f"<style>{block}</style>"
            banner = _banner_html(spec, rng, banner_id, None)
        elif spec.css_mode == "external":
            link_css = '<link rel="stylesheet" href="css/0.css">'
            banner = _banner_html(spec, rng, banner_id, None)
        else:
            banner = _banner_html(spec, rng, banner_id, decls)

    title = "Beispielseite" if lang == "de" else "Example page"
    body_parts = [f"<nav>{nav}</nav>"]
    if spec.has_banner and spec.position == "top":
        body_parts.insert(0, banner)
    body_parts.append(f"<main><article>{main}</article></main>")
    if spec.has_banner and spec.position in ("modal", "corner", "inline"):
        body_parts.insert(1, banner)
    body_parts.append(f"<footer>© 2024 Beispiel GmbH · {footer_links}</footer>")
    if spec.has_banner and spec.position == "bottom":
        body_parts.append(banner)

    return (
        "<!DOCTYPE html>\n"
        f'<html lang="{lang}"><head><meta charset="utf-8">'
        f"<title>{title} {spec.index}</title>{link_css}{head_css}</head>"
        f"<body>{''.join(body_parts)}</body></html>"
    )


def _external_css(spec: PageSpec) -> str | None:
    if not (spec.has_banner and spec.css_mode == "external"):
        return None
    banner_id = f"cmp-container-{spec.index}" if spec.hinted_id else f"layer-{spec.index}"
    block, _ = _banner_css(spec, banner_id)
    return block


def generate_corpus(out_dir: str | Path, seed: int = 42) -> CorpusManifest:
    """Write the corpus plus ground_truth.json; returns the manifest."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    entries: list[CorpusEntry] = []
    truth: dict[str, dict] = {}
    for spec in _page_specs(rng):
        url = f"synthetic://page-{spec.index:03d}"
        eid = entry_id_for(url)
        html = _page_html(spec, rng)
        entry_dir = out / eid
        (entry_dir / "css").mkdir(parents=True, exist_ok=True)
        (entry_dir / "page.html").write_text(html, encoding="utf-8")

        stylesheet_paths: list[str] = []
        css = _external_css(spec)
        if css is not None:
            (entry_dir / "css" / "0.css").write_text(css, encoding="utf-8")
            stylesheet_paths.append(f"{eid}/css/0.css")

        tree = parse_html(html)
        entries.append(CorpusEntry(
            id=eid, url=url, fetched_at=FIXED_TIMESTAMP, http_status=200,
            language=detect_language(subtree_text(tree, tree.root)),
            html_path=f"{eid}/page.html", stylesheet_paths=stylesheet_paths,
        ))

        banner_path = None
        if spec.has_banner:
            marker = next(
                nid for nid in tree.elements()
                if GROUND_TRUTH_MARKER in tree.node(nid).attributes
            )
            banner_path = tree.path_from_root(marker)
        truth[eid] = {
            "url": url,
            "has_banner": spec.has_banner,
            "banner_path": banner_path,
            "pattern": spec.pattern,
            "language": spec.language,
        }

    manifest = CorpusManifest(entries=entries)
    write_manifest(out, manifest)
    (out / "ground_truth.json").write_text(
        json.dumps(truth, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def load_ground_truth(corpus_dir: str | Path) -> dict[str, dict]:
    return json.loads((Path(corpus_dir) / "ground_truth.json").read_text("utf-8"))


def main(argv: list[str] | None = None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="generate the synthetic consent corpus")
    parser.add_argument("out_dir")
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)
    manifest = generate_corpus(args.out_dir, seed=args.seed)
    print(f"wrote {len(manifest.entries)} pages to {args.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
