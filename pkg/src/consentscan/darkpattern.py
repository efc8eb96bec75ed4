"""Accept/reject pairing, visual profiles, dissimilarity score, findings.

The score quantifies how much more visually prominent the accept choice is
than the reject choice. It is directional: a reject button that stands out
MORE than accept is not held against the page.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .clickables import ClickableElement
from .css import ColorRgba, StyleResolver, WHITE, contrast_ratio, delta_e
from .dom import DomTree, NodeId, lowest_common_ancestor
from .textml import ButtonClass

DEFAULT_THRESHOLD = 20.0

WEIGHT_BG = 0.5
WEIGHT_TEXT = 0.2
WEIGHT_PROMINENCE = 3.0
WEIGHT_SIZE = 10.0
BORDER_MISMATCH_COMPONENT = 0.5


@dataclass(frozen=True)
class StyleProfile:
    node: NodeId
    effective_background: ColorRgba
    text_color: ColorRgba
    font_size: float
    font_weight: int
    border_present: bool
    prominence: float  # contrast of effective background vs banner background


@dataclass(frozen=True)
class DissimilarityScore:
    bg_delta_e: float
    text_delta_e: float
    prominence_gap: float
    size_component: float
    total: float


@dataclass(frozen=True)
class Finding:
    kind: str  # "aesthetic_manipulation" | "missing_reject_first_layer"
    severity: str  # "notice" | "warning"
    accept_node: NodeId
    reject_node: NodeId | None
    lca: NodeId | None
    score: DissimilarityScore | None
    explanation: str


def pair_buttons(
    clickables: list[ClickableElement],
    predictions: list[tuple[ButtonClass, float]],
) -> tuple[ClickableElement, ClickableElement] | None:
    """Highest-margin Accept and highest-margin Reject, if both exist."""
    if len(predictions) != len(clickables):
        raise ValueError("predictions must cover all clickables")
    best: dict[ButtonClass, tuple[float, int]] = {}
    for i, (cls, margin) in enumerate(predictions):
        if cls not in (ButtonClass.ACCEPT, ButtonClass.REJECT):
            continue
        if cls not in best or margin > best[cls][0]:
            best[cls] = (margin, i)
    if ButtonClass.ACCEPT not in best or ButtonClass.REJECT not in best:
        return None
    return clickables[best[ButtonClass.ACCEPT][1]], clickables[best[ButtonClass.REJECT][1]]


def resolve_effective_background(
    tree: DomTree,
    node: NodeId,
    styles: StyleResolver,
    stop_at: NodeId | None = None,
    fallback: ColorRgba = WHITE,
) -> ColorRgba:
    """Own background if visible, else nearest visible ancestor background."""
    own = styles.computed(node).background_color
    if not own.is_transparent():
        return own
    for anc in tree.ancestors(node):
        anc_node = tree.node(anc)
        if not anc_node.is_element or anc_node.tag == "#document":
            break
        bg = styles.computed(anc).background_color
        if not bg.is_transparent():
            return bg
        if stop_at is not None and anc == stop_at:
            break
    return fallback


def visual_profile(
    tree: DomTree,
    node: NodeId,
    styles: StyleResolver,
    banner_root: NodeId,
    banner_background: ColorRgba,
) -> StyleProfile:
    """Resolved visual facts for one button against the banner background."""
    effective_bg = resolve_effective_background(
        tree, node, styles, stop_at=banner_root, fallback=banner_background
    )
    if effective_bg.is_transparent():
        effective_bg = WHITE
    style = styles.computed(node)
    return StyleProfile(
        node=node,
        effective_background=effective_bg,
        text_color=style.color,
        font_size=style.font_size,
        font_weight=style.font_weight,
        border_present=style.border_present,
        prominence=contrast_ratio(effective_bg, banner_background),
    )


def banner_background_of(tree: DomTree, banner_root: NodeId, styles: StyleResolver) -> ColorRgba:
    bg = resolve_effective_background(tree, banner_root, styles, fallback=WHITE)
    return WHITE if bg.is_transparent() else bg


def dissimilarity(accept: StyleProfile, reject: StyleProfile) -> DissimilarityScore:
    """Weighted, clamped 0-100 score; prominence counts only toward accept."""
    bg = delta_e(accept.effective_background, reject.effective_background)
    text = delta_e(accept.text_color, reject.text_color)
    gap = max(0.0, accept.prominence - reject.prominence)
    size = abs(math.log(accept.font_size / reject.font_size))
    if accept.border_present != reject.border_present:
        size += BORDER_MISMATCH_COMPONENT
    total = min(
        100.0,
        WEIGHT_BG * bg + WEIGHT_TEXT * text + WEIGHT_PROMINENCE * gap + WEIGHT_SIZE * size,
    )
    return DissimilarityScore(
        bg_delta_e=bg, text_delta_e=text, prominence_gap=gap,
        size_component=size, total=total,
    )


def detect_findings(
    tree: DomTree,
    banner_root: NodeId,
    clickables: list[ClickableElement],
    predictions: list[tuple[ButtonClass, float]],
    styles: StyleResolver,
    threshold: float = DEFAULT_THRESHOLD,
) -> list[Finding]:
    """Aesthetic-manipulation and missing-reject findings for one banner."""
    if not 0.0 <= threshold <= 100.0:
        raise ValueError(f"threshold {threshold} outside [0, 100]")
    findings: list[Finding] = []
    pair = pair_buttons(clickables, predictions)
    if pair is not None:
        accept, reject = pair
        banner_bg = banner_background_of(tree, banner_root, styles)
        profile_a = visual_profile(tree, accept.node, styles, banner_root, banner_bg)
        profile_r = visual_profile(tree, reject.node, styles, banner_root, banner_bg)
        score = dissimilarity(profile_a, profile_r)
        if score.total > 0.0 and score.total >= threshold:
            severity = "warning" if score.prominence_gap > 0 else "notice"
            lca = lowest_common_ancestor(tree, accept.node, reject.node)
            findings.append(Finding(
                kind="aesthetic_manipulation",
                severity=severity,
                accept_node=accept.node,
                reject_node=reject.node,
                lca=lca,
                score=score,
                explanation=(
                    f"accept '{accept.label}' styled far apart from reject "
                    f"'{reject.label}' (dissimilarity {score.total:.1f})"
                ),
            ))
        return findings

    classes = [cls for cls, _ in predictions]
    if ButtonClass.ACCEPT in classes and ButtonClass.REJECT not in classes:
        accept_idx = max(
            (i for i, (cls, _) in enumerate(predictions) if cls == ButtonClass.ACCEPT),
            key=lambda i: predictions[i][1],
        )
        accept = clickables[accept_idx]
        findings.append(Finding(
            kind="missing_reject_first_layer",
            severity="warning",
            accept_node=accept.node,
            reject_node=None,
            lca=None,
            score=None,
            explanation=(
                f"banner offers accept '{accept.label}' but no visible first-layer reject"
            ),
        ))
    return findings
