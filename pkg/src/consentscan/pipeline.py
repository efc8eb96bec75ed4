"""End-to-end per-page scanning, report building and HTML annotation."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .banner import (
    BannerCandidate,
    KeywordLexicon,
    find_keyword_hits,
    generate_candidates,
    select_banner,
)
from .clickables import extract_clickables
from .corpus import CorpusEntry, CorpusManifest
from .css import StyleResolver, StyleRule, parse_stylesheet
from .darkpattern import DEFAULT_THRESHOLD, Finding, detect_findings
from .dom import DomTree, NodeId, lowest_common_ancestor, parse_html, serialize
from .textml import ButtonClass, LinearModel, Vocabulary, predict

REPORT_SCHEMA_VERSION = 1

ACCEPT_OUTLINE = "outline:3px solid #ff8c00"
REJECT_OUTLINE = "outline:3px solid #008000"
LCA_OUTLINE = "outline:3px dashed #1e64c8"


class MissingBanner(ValueError):
    """Annotation requested for a scan without banner or accept button."""


@dataclass
class ScanResult:
    entry_id: str
    url: str
    banner: dict | None  # BannerCandidate components + node path
    clickables: list[dict]
    findings: list[dict]
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "url": self.url,
            "banner": self.banner,
            "clickables": self.clickables,
            "findings": self.findings,
            "error": self.error,
        }


@dataclass
class AnnotationPlan:
    accept: tuple[str, NodeId]
    reject: tuple[str, NodeId] | None
    lca: tuple[str, NodeId] | None

    def overrides(self) -> dict[NodeId, dict[str, str]]:
        plan: dict[NodeId, dict[str, str]] = {}
        for item in (self.accept, self.reject, self.lca):
            if item is None:
                continue
            style, node = item
            if node in plan:
                plan[node]["style"] = f"{plan[node]['style']};{style}"
            else:
                plan[node] = {"style": style}
        return plan


def _banner_report(tree: DomTree, candidate: BannerCandidate) -> dict:
    return {
        "root": candidate.root,
        "path": tree.path_from_root(candidate.root),
        "score": candidate.score,
        "distinct_keywords": candidate.distinct_keywords,
        "text_length": candidate.text_length,
        "clickable_count": candidate.clickable_count,
        "positioning_bonus": candidate.positioning_bonus,
        "attribute_bonus": candidate.attribute_bonus,
    }


def _finding_report(tree: DomTree, finding: Finding) -> dict:
    def node_info(nid: NodeId | None) -> dict | None:
        if nid is None:
            return None
        return {"node": nid, "path": tree.path_from_root(nid)}

    score = None
    if finding.score is not None:
        score = {
            "bg_delta_e": finding.score.bg_delta_e,
            "text_delta_e": finding.score.text_delta_e,
            "prominence_gap": finding.score.prominence_gap,
            "size_component": finding.score.size_component,
            "total": finding.score.total,
        }
    return {
        "kind": finding.kind,
        "severity": finding.severity,
        "accept": node_info(finding.accept_node),
        "reject": node_info(finding.reject_node),
        "lca": node_info(finding.lca),
        "score": score,
        "explanation": finding.explanation,
    }


def load_entry_tree(corpus_dir: str | Path, entry: CorpusEntry) -> DomTree:
    html = (Path(corpus_dir) / entry.html_path).read_bytes()
    return parse_html(html)


def load_entry_rules(corpus_dir: str | Path, entry: CorpusEntry, tree: DomTree) -> list[StyleRule]:
    """External sheets in manifest order, then in-document style blocks."""
    rules: list[StyleRule] = []
    for rel in entry.stylesheet_paths:
        css = (Path(corpus_dir) / rel).read_text(encoding="utf-8", errors="replace")
        rules.extend(parse_stylesheet(css, starting_order=len(rules)))
    for nid in tree.elements():
        node = tree.node(nid)
        if node.tag != "style":
            continue
        css = "".join(tree.node(k).text for k in node.children if tree.node(k).is_text)
        rules.extend(parse_stylesheet(css, starting_order=len(rules)))
    return rules


def scan_entry(
    corpus_dir: str | Path,
    entry: CorpusEntry,
    lexicon: KeywordLexicon,
    model: LinearModel | None = None,
    vocab: Vocabulary | None = None,
    threshold: float = DEFAULT_THRESHOLD,
) -> ScanResult:
    """parse -> styles -> banner -> clickables -> predict -> findings."""
    result = ScanResult(entry_id=entry.id, url=entry.url, banner=None, clickables=[], findings=[])
    if entry.http_status != 200 or not entry.html_path:
        result.error = entry.error or f"http status {entry.http_status}"
        return result
    try:
        tree = load_entry_tree(corpus_dir, entry)
        rules = load_entry_rules(corpus_dir, entry, tree)
    except OSError as exc:
        result.error = f"io: {exc}"
        return result

    styles = StyleResolver(tree, rules)
    hits = find_keyword_hits(tree, lexicon)
    candidates = generate_candidates(tree, hits, styles, lexicon)
    banner = select_banner(candidates)
    if banner is None:
        return result
    result.banner = _banner_report(tree, banner)

    clickables = extract_clickables(tree, banner.root, styles)
    predictions: list[tuple[ButtonClass, float]] = []
    for item in clickables:
        entry_row = {
            "node": item.node,
            "path": tree.path_from_root(item.node),
            "tag": item.tag,
            "label": item.label,
            "detection_source": item.detection_source,
            "predicted": None,
            "margin": None,
        }
        if model is not None and vocab is not None:
            cls, margin = predict(model, item.label, vocab)
            predictions.append((cls, margin))
            entry_row["predicted"] = cls.label
            entry_row["margin"] = margin
        result.clickables.append(entry_row)

    if model is not None and vocab is not None:
        findings = detect_findings(tree, banner.root, clickables, predictions, styles, threshold)
        result.findings = [_finding_report(tree, f) for f in findings]
    return result


def scan_corpus(
    corpus_dir: str | Path,
    manifest: CorpusManifest,
    lexicon: KeywordLexicon,
    model: LinearModel | None = None,
    vocab: Vocabulary | None = None,
    threshold: float = DEFAULT_THRESHOLD,
    skip_language_filtered: bool = True,
    parallel: int = 4,
) -> list[ScanResult]:
    """Scan all entries; results in manifest order regardless of scheduling."""
    entries = [
        e for e in manifest.entries
        if not (skip_language_filtered and e.language_filtered)
    ]

    def scan_one(entry: CorpusEntry) -> ScanResult:
        return scan_entry(corpus_dir, entry, lexicon, model, vocab, threshold)

    if parallel <= 1 or len(entries) <= 1:
        return [scan_one(e) for e in entries]
    with ThreadPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(scan_one, entries))


def report_to_json(results: list[ScanResult]) -> str:
    payload = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "entries": [r.to_dict() for r in results],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def write_report(path: str | Path, results: list[ScanResult]) -> None:
    Path(path).write_text(report_to_json(results), encoding="utf-8")


def _pair_nodes(scan: ScanResult) -> tuple[NodeId | None, NodeId | None]:
    """Max-margin accept and reject node ids recorded in a scan result."""
    best: dict[str, tuple[float, int]] = {}
    for row in scan.clickables:
        cls = row.get("predicted")
        if cls not in ("accept", "reject"):
            continue
        margin = row.get("margin") or 0.0
        if cls not in best or margin > best[cls][0]:
            best[cls] = (margin, row["node"])
    accept = best.get("accept", (0.0, None))[1]
    reject = best.get("reject", (0.0, None))[1]
    return accept, reject


def build_annotation_plan(tree: DomTree, scan: ScanResult) -> AnnotationPlan:
    if scan.banner is None:
        raise MissingBanner(f"entry {scan.entry_id} has no detected banner")
    accept, reject = _pair_nodes(scan)
    if accept is None:
        raise MissingBanner(f"entry {scan.entry_id} has no predicted accept button")
    reject_item = (REJECT_OUTLINE, reject) if reject is not None else None
    lca_item = None
    if reject is not None:
        lca_item = (LCA_OUTLINE, lowest_common_ancestor(tree, accept, reject))
    return AnnotationPlan(accept=(ACCEPT_OUTLINE, accept), reject=reject_item, lca=lca_item)


def annotate_entry(tree: DomTree, scan: ScanResult) -> str:
    """Serialized page with the detection outlines inserted."""
    plan = build_annotation_plan(tree, scan)
    return serialize(tree, plan.overrides())
