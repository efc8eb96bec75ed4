"""Clickable-element extraction and label normalization."""

from __future__ import annotations

from dataclasses import dataclass

from .css import StyleResolver
from .dom import DomTree, NodeId, subtree_text

CLICKABLE_TAGS = frozenset({"a", "button"})
CLICKABLE_INPUT_TYPES = frozenset({"button", "submit"})

LABEL_MAX_CHARS = 80


@dataclass(frozen=True)
class ClickableElement:
    node: NodeId
    tag: str
    label: str
    detection_source: str  # "tag" | "role_attr" | "onclick_attr"


def normalize_label(raw: str) -> str:
    """Lowercase, collapse whitespace, trim edge punctuation, cap at 80 chars."""
    text = " ".join(raw.lower().split())
    start, end = 0, len(text)
    while start < end and not text[start].isalnum():
        start += 1
    while end > start and not text[end - 1].isalnum():
        end -= 1
    return text[start:end][:LABEL_MAX_CHARS].strip()


def _detection_source(tree: DomTree, nid: NodeId) -> str | None:
    node = tree.node(nid)
    if not node.is_element:
        return None
    if node.tag in CLICKABLE_TAGS:
        return "tag"
    if node.tag == "input" and node.attributes.get("type", "").lower() in CLICKABLE_INPUT_TYPES:
        return "tag"
    if node.attributes.get("role", "").lower() == "button":
        return "role_attr"
    if "onclick" in node.attributes:
        return "onclick_attr"
    return None


def extract_clickables(
    tree: DomTree, banner_root: NodeId, styles: StyleResolver | None = None
) -> list[ClickableElement]:
    """Document-order clickables under banner_root; innermost wins on nesting."""
    root_node = tree.node(banner_root)
    if not root_node.is_element:
        raise ValueError(f"banner root {banner_root} is not an element")

    found: list[ClickableElement] = []
    for nid in tree.walk(banner_root):
        source = _detection_source(tree, nid)
        if source is None:
            continue
        if styles is not None and styles.computed(nid).display == "none":
            continue
        node = tree.node(nid)
        if node.tag == "input":
            label = normalize_label(node.attributes.get("value", ""))
        else:
            label = normalize_label(subtree_text(tree, nid))
        if not label:
            continue
        found.append(ClickableElement(node=nid, tag=node.tag, label=label, detection_source=source))

    # innermost-wins: drop any clickable that contains another one
    kept: list[ClickableElement] = []
    for item in found:
        nested = any(
            other.node != item.node and tree.is_ancestor_or_self(item.node, other.node)
            for other in found
        )
        if not nested:
            kept.append(item)
    return kept
