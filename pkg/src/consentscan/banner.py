"""Cookie-banner localisation: keyword hits, ancestor ascent, scoring.

Bottom-up: find text nodes containing consent vocabulary, walk up to nearby
containers, score each container on keyword density, clickables, positioning
and attribute hints, then pick the best-scoring (smallest sufficient) one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .clickables import extract_clickables
from .css import StyleResolver
from .dom import RAWTEXT_ELEMENTS, DOCUMENT_TAG, DomTree, NodeId, subtree_text

ASCENT_LIMIT = 8
TEXT_LENGTH_MIN = 25
TEXT_LENGTH_MAX = 4000
LONG_TEXT_PENALTY_ABOVE = 1500


class LexiconFormatError(ValueError):
    def __init__(self, line_no: int, line: str):
        super().__init__(f"lexicon line {line_no}: {line!r}")
        self.line_no = line_no


@dataclass
class KeywordLexicon:
    topic_keywords: dict[str, list[str]]  # language -> lowercase keywords
    attribute_hints: list[str]

    def languages(self) -> list[str]:
        return sorted(self.topic_keywords)


@dataclass(frozen=True)
class KeywordHit:
    node: NodeId  # text node
    keyword: str
    language: str


@dataclass
class BannerCandidate:
    root: NodeId
    distinct_keywords: int
    text_length: int
    clickable_count: int
    positioning_bonus: int
    attribute_bonus: int
    score: float = field(init=False)

    def __post_init__(self) -> None:
        self.score = score_candidate(
            distinct_keywords=self.distinct_keywords,
            text_length=self.text_length,
            clickable_count=self.clickable_count,
            positioning_bonus=self.positioning_bonus,
            attribute_bonus=self.attribute_bonus,
        )


def default_lexicon_path() -> Path:
    return Path(str(resources.files("consentscan").joinpath("data/lexicon.txt")))


def load_lexicon(path: str | Path) -> KeywordLexicon:
    """Load a line-oriented `lang:keyword` / `attr:token` lexicon file."""
    topic: dict[str, list[str]] = {"de": [], "en": []}
    hints: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise LexiconFormatError(line_no, raw.rstrip("\n"))
            prefix, value = line.split(":", 1)
            prefix = prefix.strip().lower()
            value = value.strip().lower()
            if not value:
                raise LexiconFormatError(line_no, raw.rstrip("\n"))
            if prefix == "attr":
                if value not in hints:
                    hints.append(value)
            elif prefix in ("de", "en"):
                if value not in topic[prefix]:
                    topic[prefix].append(value)
            else:
                raise LexiconFormatError(line_no, raw.rstrip("\n"))
    return KeywordLexicon(topic_keywords=topic, attribute_hints=hints)


def load_default_lexicon() -> KeywordLexicon:
    return load_lexicon(default_lexicon_path())


def _in_rawtext(tree: DomTree, nid: NodeId) -> bool:
    for anc in tree.ancestors(nid):
        if tree.node(anc).tag in RAWTEXT_ELEMENTS:
            return True
    return False


def find_keyword_hits(tree: DomTree, lexicon: KeywordLexicon) -> list[KeywordHit]:
    """One hit per (text node, keyword); case-insensitive substring match."""
    hits: list[KeywordHit] = []
    for nid in tree.walk():
        node = tree.node(nid)
        if not node.is_text or _in_rawtext(tree, nid):
            continue
        text = " ".join(node.text.split()).lower()
        if not text:
            continue
        seen: set[str] = set()
        for language in ("de", "en"):
            for keyword in lexicon.topic_keywords.get(language, []):
                if keyword in seen:
                    continue
                if keyword in text:
                    seen.add(keyword)
                    hits.append(KeywordHit(node=nid, keyword=keyword, language=language))
    return hits


def _attribute_tokens(tree: DomTree, nid: NodeId) -> list[str]:
    node = tree.node(nid)
    values = [node.attributes.get("id", ""), node.attributes.get("class", "")]
    tokens: list[str] = []
    for value in values:
        tokens.extend(t for t in re.split(r"[^a-z0-9]+", value.lower()) if t)
    return tokens


def _has_attribute_hint(tree: DomTree, nid: NodeId, hints: list[str]) -> bool:
    tokens = _attribute_tokens(tree, nid)
    return any(hint in token for token in tokens for hint in hints)


def score_candidate(
    *,
    distinct_keywords: int,
    text_length: int,
    clickable_count: int,
    positioning_bonus: int,
    attribute_bonus: int,
) -> float:
    """Fixed-weight candidate score; see BannerCandidate for the components."""
    size_penalty = 2 if text_length > LONG_TEXT_PENALTY_ABOVE else 0
    return (
        3 * distinct_keywords
        + 2 * min(clickable_count, 3)
        + positioning_bonus
        + attribute_bonus
        - size_penalty
    )


def positioning_bonus_for(styles: StyleResolver, nid: NodeId) -> int:
    style = styles.computed(nid)
    bonus = 4 if style.position in ("fixed", "sticky", "absolute") else 0
    if style.z_index is not None and style.z_index > 10:
        bonus += 2
    return bonus


def generate_candidates(
    tree: DomTree,
    hits: list[KeywordHit],
    styles: StyleResolver,
    lexicon: KeywordLexicon | None = None,
) -> list[BannerCandidate]:
    """Ascend from each hit and keep containers that look like banners."""
    hints = lexicon.attribute_hints if lexicon else []
    roots: list[NodeId] = []
    seen_roots: set[NodeId] = set()
    for hit in hits:
        steps = 0
        for anc in tree.ancestors(hit.node):
            tag = tree.node(anc).tag
            if tag in ("body", "html", DOCUMENT_TAG):
                break
            steps += 1
            if steps > ASCENT_LIMIT:
                break
            if anc in seen_roots:
                continue
            text_length = len(subtree_text(tree, anc))
            if not (TEXT_LENGTH_MIN <= text_length <= TEXT_LENGTH_MAX):
                continue
            if not extract_clickables(tree, anc, styles):
                continue
            seen_roots.add(anc)
            roots.append(anc)

    candidates: list[BannerCandidate] = []
    for root in roots:
        keywords = {h.keyword for h in hits if tree.is_ancestor_or_self(root, h.node)}
        clickables = extract_clickables(tree, root, styles)
        candidates.append(
            BannerCandidate(
                root=root,
                distinct_keywords=len(keywords),
                text_length=len(subtree_text(tree, root)),
                clickable_count=len(clickables),
                positioning_bonus=positioning_bonus_for(styles, root),
                attribute_bonus=3 if _has_attribute_hint(tree, root, hints) else 0,
            )
        )
    return candidates


def select_banner(candidates: list[BannerCandidate]) -> BannerCandidate | None:
    """Max score; ties prefer the smaller subtree, then the smaller node id."""
    if not candidates:
        return None
    return min(candidates, key=lambda c: (-c.score, c.text_length, c.root))
