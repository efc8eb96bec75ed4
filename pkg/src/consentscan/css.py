"""Simplified CSS cascade and perceptual color math.

Supports class/id/tag selectors with descendant combinators, inline styles,
and the computed-style subset the banner comparison needs. Unsupported
selectors and at-rules are skipped without error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace

from .dom import DomTree, NodeId


class UnknownColor(ValueError):
    """Color text not in any supported syntax."""


@dataclass(frozen=True)
class ColorRgba:
    r: int
    g: int
    b: int
    a: float = 1.0

    def is_transparent(self, cutoff: float = 0.1) -> bool:
        # alpha below the cutoff is treated as invisible for background resolution
        return self.a < cutoff


BLACK = ColorRgba(0, 0, 0, 1.0)
WHITE = ColorRgba(255, 255, 255, 1.0)
TRANSPARENT = ColorRgba(0, 0, 0, 0.0)

# 16 basic CSS colors plus 20 common extended names seen in banner styling.
NAMED_COLORS: dict[str, tuple[int, int, int]] = {
    "aqua": (0, 255, 255), "black": (0, 0, 0), "blue": (0, 0, 255),
    "fuchsia": (255, 0, 255), "gray": (128, 128, 128), "green": (0, 128, 0),
    "lime": (0, 255, 0), "maroon": (128, 0, 0), "navy": (0, 0, 128),
    "olive": (128, 128, 0), "purple": (128, 0, 128), "red": (255, 0, 0),
    "silver": (192, 192, 192), "teal": (0, 128, 128), "white": (255, 255, 255),
    "yellow": (255, 255, 0),
    "orange": (255, 165, 0), "pink": (255, 192, 203), "brown": (165, 42, 42),
    "gold": (255, 215, 0), "beige": (245, 245, 220), "coral": (255, 127, 80),
    "crimson": (220, 20, 60), "indigo": (75, 0, 130), "ivory": (255, 255, 240),
    "khaki": (240, 230, 140), "lavender": (230, 230, 250),
    "salmon": (250, 128, 114), "skyblue": (135, 206, 235),
    "tan": (210, 180, 140), "turquoise": (64, 224, 208),
    "violet": (238, 130, 238), "lightgray": (211, 211, 211),
    "darkgray": (169, 169, 169), "lightblue": (173, 216, 230),
    "darkblue": (0, 0, 139),
}

_RGB_FUNC_RE = re.compile(r"^rgba?\((.*)\)$")


def _channel(token: str) -> int:
    token = token.strip()
    if token.endswith("%"):
        value = float(token[:-1]) / 100.0 * 255.0
    else:
        value = float(token)
    return max(0, min(255, round(value)))


def _alpha(token: str) -> float:
    token = token.strip()
    if token.endswith("%"):
        value = float(token[:-1]) / 100.0
    else:
        value = float(token)
    return max(0.0, min(1.0, value))


def parse_color(text: str) -> ColorRgba:
    """Parse #rgb/#rrggbb/#rrggbbaa, rgb()/rgba(), 'transparent' or a name."""
    raw = text.strip().lower()
    if not raw:
        raise UnknownColor(text)
    if raw == "transparent":
        return TRANSPARENT
    if raw in NAMED_COLORS:
        r, g, b = NAMED_COLORS[raw]
        return ColorRgba(r, g, b, 1.0)
    if raw.startswith("#"):
        digits = raw[1:]
        if not re.fullmatch(r"[0-9a-f]+", digits or "x"):
            raise UnknownColor(text)
        if len(digits) == 3:
            r, g, b = (int(d * 2, 16) for d in digits)
            return ColorRgba(r, g, b, 1.0)
        if len(digits) == 6:
            return ColorRgba(int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16), 1.0)
        if len(digits) == 8:
            return ColorRgba(
                int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16),
                int(digits[6:8], 16) / 255.0,
            )
        raise UnknownColor(text)
    m = _RGB_FUNC_RE.match(raw)
    if m:
        parts = [p for p in re.split(r"[,\s/]+", m.group(1).strip()) if p]
        try:
            if len(parts) == 3:
                return ColorRgba(*(_channel(p) for p in parts), 1.0)
            if len(parts) == 4:
                return ColorRgba(*(_channel(p) for p in parts[:3]), _alpha(parts[3]))
        except ValueError:
            raise UnknownColor(text) from None
    raise UnknownColor(text)


# -- selectors and rules --

@dataclass(frozen=True)
class SimpleSelector:
    tag: str | None = None
    id: str | None = None
    classes: tuple[str, ...] = ()


@dataclass(frozen=True)
class Selector:
    """Chain of simple selectors joined by descendant combinators."""

    chain: tuple[SimpleSelector, ...]

    @property
    def specificity(self) -> tuple[int, int, int]:
        ids = sum(1 for s in self.chain if s.id is not None)
        classes = sum(len(s.classes) for s in self.chain)
        tags = sum(1 for s in self.chain if s.tag is not None)
        return (ids, classes, tags)


_SIMPLE_RE = re.compile(
    r"^(?P<tag>[a-zA-Z][a-zA-Z0-9-]*)?(?P<rest>(?:[#.][-_a-zA-Z0-9]+)*)$"
)


def parse_selector(text: str) -> Selector | None:
    """Parse one selector; None when the syntax is outside the subset."""
    parts = text.split()
    if not parts:
        return None
    chain: list[SimpleSelector] = []
    for part in parts:
        m = _SIMPLE_RE.match(part)
        if not m or (m.group("tag") is None and not m.group("rest")):
            return None
        tag = m.group("tag")
        sid: str | None = None
        classes: list[str] = []
        for piece in re.findall(r"[#.][-_a-zA-Z0-9]+", m.group("rest")):
            if piece.startswith("#"):
                if sid is not None:
                    return None
                sid = piece[1:]
            else:
                classes.append(piece[1:])
        chain.append(SimpleSelector(tag=tag.lower() if tag else None, id=sid, classes=tuple(classes)))
    return Selector(chain=tuple(chain))


@dataclass(frozen=True)
class StyleRule:
    selector: Selector
    declarations: dict[str, str]
    source_order: int

    @property
    def specificity(self) -> tuple[int, int, int]:
        return self.selector.specificity


SUPPORTED_PROPERTIES = frozenset({
    "color", "background-color", "font-size", "font-weight",
    "position", "z-index", "display", "border",
})


def parse_declarations(text: str) -> dict[str, str]:
    """Parse 'prop: value; ...' keeping only the supported subset."""
    out: dict[str, str] = {}
    for chunk in text.split(";"):
        if ":" not in chunk:
            continue
        prop, value = chunk.split(":", 1)
        prop = prop.strip().lower()
        value = value.strip()
        if value.lower().endswith("!important"):
            value = value[: -len("!important")].rstrip()  # priority itself unsupported
        if not value:
            continue
        if prop == "font":
            continue  # shorthand explicitly ignored
        if prop in SUPPORTED_PROPERTIES:
            out[prop] = value
    return out


def _strip_comments(text: str) -> str:
    return re.sub(r"/\*.*?\*/", " ", text, flags=re.S)


def parse_stylesheet(text: str, starting_order: int = 0) -> list[StyleRule]:
    """Extract supported rules; at-rules and exotic selectors are skipped."""
    text = _strip_comments(text)
    rules: list[StyleRule] = []
    order = starting_order
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "@":
            # skip to ';' or over the balanced block
            j = i
            while j < n and text[j] not in ";{":
                j += 1
            if j >= n:
                break
            if text[j] == ";":
                i = j + 1
                continue
            depth = 1
            j += 1
            while j < n and depth:
                if text[j] == "{":
                    depth += 1
                elif text[j] == "}":
                    depth -= 1
                j += 1
            i = j
            continue
        brace = text.find("{", i)
        if brace == -1:
            break
        close = text.find("}", brace)
        if close == -1:
            break
        selector_text = text[i:brace].strip()
        body = text[brace + 1:close]
        i = close + 1
        declarations = parse_declarations(body)
        if not declarations:
            continue
        for sel_part in selector_text.split(","):
            selector = parse_selector(sel_part.strip())
            if selector is None:
                continue
            rules.append(StyleRule(selector=selector, declarations=dict(declarations), source_order=order))
            order += 1
    return rules


# -- computed style --

POSITIONS = ("static", "relative", "absolute", "fixed", "sticky")


@dataclass(frozen=True)
class ComputedStyle:
    color: ColorRgba = BLACK
    background_color: ColorRgba = TRANSPARENT
    font_size: float = 16.0
    font_weight: int = 400
    position: str = "static"
    z_index: int | None = None
    display: str = "other"  # "none" | "other"
    border_present: bool = False


DEFAULT_STYLE = ComputedStyle()


def _matches_simple(tree: DomTree, nid: NodeId, simple: SimpleSelector) -> bool:
    node = tree.node(nid)
    if not node.is_element:
        return False
    if simple.tag is not None and node.tag != simple.tag:
        return False
    if simple.id is not None and node.attributes.get("id") != simple.id:
        return False
    if simple.classes:
        have = set(node.attributes.get("class", "").split())
        if not all(c in have for c in simple.classes):
            return False
    return True


def selector_matches(tree: DomTree, nid: NodeId, selector: Selector) -> bool:
    """Right-to-left descendant matching."""
    chain = selector.chain
    if not _matches_simple(tree, nid, chain[-1]):
        return False
    idx = len(chain) - 2
    for anc in tree.ancestors(nid):
        if idx < 0:
            break
        if _matches_simple(tree, anc, chain[idx]):
            idx -= 1
    return idx < 0


def _parse_font_size(value: str, parent_px: float) -> float | None:
    value = value.strip().lower()
    m = re.fullmatch(r"(-?\d+(?:\.\d+)?)(px|pt|em|rem|%)?", value)
    if not m:
        return None
    number = float(m.group(1))
    unit = m.group(2) or "px"
    if number < 0:
        return None
    if unit == "px":
        return number
    if unit == "pt":
        return number * 4.0 / 3.0
    if unit == "em":
        return number * parent_px
    if unit == "rem":
        return number * 16.0
    if unit == "%":
        return number / 100.0 * parent_px
    return None


def _parse_font_weight(value: str) -> int | None:
    value = value.strip().lower()
    if value == "normal":
        return 400
    if value == "bold":
        return 700
    if re.fullmatch(r"\d{3}", value):
        weight = int(value)
        if 100 <= weight <= 900:
            return weight
    return None


def _border_present(value: str) -> bool:
    return value.strip().lower() not in ("none", "0", "hidden", "initial", "unset")


class StyleResolver:
    """Caches computed styles for one (tree, rules) pair."""

    def __init__(self, tree: DomTree, rules: list[StyleRule]):
        self.tree = tree
        self.rules = rules
        self._cache: dict[NodeId, ComputedStyle] = {}

    def computed(self, nid: NodeId) -> ComputedStyle:
        cached = self._cache.get(nid)
        if cached is not None:
            return cached
        style = self._compute(nid)
        self._cache[nid] = style
        return style

    def _winning_declarations(self, nid: NodeId) -> dict[str, str]:
        # rank: (inline flag, specificity, source order), later rules win ties
        best: dict[str, tuple[tuple[int, tuple[int, int, int], int], str]] = {}
        for rule in self.rules:
            if not selector_matches(self.tree, nid, rule.selector):
                continue
            rank = (0, rule.specificity, rule.source_order)
            for prop, value in rule.declarations.items():
                if prop not in best or rank >= best[prop][0]:
                    best[prop] = (rank, value)
        inline = self.tree.node(nid).attributes.get("style")
        if inline:
            rank = (1, (0, 0, 0), 0)
            for prop, value in parse_declarations(inline).items():
                best[prop] = (rank, value)
        return {prop: value for prop, (_, value) in best.items()}

    def _compute(self, nid: NodeId) -> ComputedStyle:
        node = self.tree.node(nid)
        if not node.is_element:
            raise ValueError(f"node {nid} is not an element")
        parent = node.parent
        parent_style = DEFAULT_STYLE
        if parent is not None and self.tree.node(parent).is_element:
            if self.tree.node(parent).tag != "#document":
                parent_style = self.computed(parent)

        decls = self._winning_declarations(nid)
        style = ComputedStyle(
            color=parent_style.color,
            font_size=parent_style.font_size,
        )

        if "color" in decls:
            try:
                style = replace(style, color=parse_color(decls["color"]))
            except UnknownColor:
                pass
        if "background-color" in decls:
            try:
                style = replace(style, background_color=parse_color(decls["background-color"]))
            except UnknownColor:
                pass
        if "font-size" in decls:
            size = _parse_font_size(decls["font-size"], parent_style.font_size)
            if size is not None:
                style = replace(style, font_size=size)
        if "font-weight" in decls:
            weight = _parse_font_weight(decls["font-weight"])
            if weight is not None:
                style = replace(style, font_weight=weight)
        if "position" in decls and decls["position"].strip().lower() in POSITIONS:
            style = replace(style, position=decls["position"].strip().lower())
        if "z-index" in decls:
            z = decls["z-index"].strip().lower()
            if re.fullmatch(r"-?\d+", z):
                style = replace(style, z_index=int(z))
        if "display" in decls:
            display = "none" if decls["display"].strip().lower() == "none" else "other"
            style = replace(style, display=display)
        if "border" in decls:
            style = replace(style, border_present=_border_present(decls["border"]))
        return style


def computed_style(tree: DomTree, nid: NodeId, rules: list[StyleRule]) -> ComputedStyle:
    """Resolve the computed-style subset for an element node."""
    return StyleResolver(tree, rules).computed(nid)


# -- perceptual color metrics --

def relative_luminance(c: ColorRgba) -> float:
    """WCAG 2.1 relative luminance; alpha ignored."""

    def expand(channel: int) -> float:
        s = channel / 255.0
        return s / 12.92 if s <= 0.03928 else ((s + 0.055) / 1.055) ** 2.4

    return 0.2126 * expand(c.r) + 0.7152 * expand(c.g) + 0.0722 * expand(c.b)


def contrast_ratio(c1: ColorRgba, c2: ColorRgba) -> float:
    """WCAG contrast ratio in [1, 21]; symmetric."""
    l1 = relative_luminance(c1)
    l2 = relative_luminance(c2)
    lighter, darker = max(l1, l2), min(l1, l2)
    return (lighter + 0.05) / (darker + 0.05)


def _srgb_to_linear(channel: int) -> float:
    s = channel / 255.0
    return s / 12.92 if s <= 0.04045 else ((s + 0.055) / 1.055) ** 2.4


_D65 = (0.95047, 1.0, 1.08883)


def rgb_to_lab(c: ColorRgba) -> tuple[float, float, float]:
    """sRGB -> CIELAB under D65."""
    r = _srgb_to_linear(c.r)
    g = _srgb_to_linear(c.g)
    b = _srgb_to_linear(c.b)
    x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b
    y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b
    z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b

    def f(t: float) -> float:
        return t ** (1.0 / 3.0) if t > 0.008856 else 7.787 * t + 16.0 / 116.0

    fx = f(x / _D65[0])
    fy = f(y / _D65[1])
    fz = f(z / _D65[2])
    return (116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz))


def delta_e(c1: ColorRgba, c2: ColorRgba) -> float:
    """CIE76 color difference (Euclidean distance in CIELAB)."""
    l1, a1, b1 = rgb_to_lab(c1)
    l2, a2, b2 = rgb_to_lab(c2)
    return math.sqrt((l1 - l2) ** 2 + (a1 - a2) ** 2 + (b1 - b2) ** 2)
