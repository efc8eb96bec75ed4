import math
import random

import pytest

from consentscan.css import (
    BLACK,
    ColorRgba,
    TRANSPARENT,
    WHITE,
    StyleResolver,
    UnknownColor,
    computed_style,
    contrast_ratio,
    delta_e,
    parse_color,
    parse_declarations,
    parse_selector,
    parse_stylesheet,
    relative_luminance,
    selector_matches,
)
from consentscan.dom import parse_html


def lab_reference(r, g, b):
    """Independent sRGB->Lab conversion in the 0..100-scaled formulation."""
    r, g, b = r / 255.0, g / 255.0, b / 255.0

    def gam(c):
        return ((c + 0.055) / 1.055) ** 2.4 if c > 0.04045 else c / 12.92

    r, g, b = gam(r) * 100, gam(g) * 100, gam(b) * 100
    x = r * 0.4124564 + g * 0.3575761 + b * 0.1804375
    y = r * 0.2126729 + g * 0.7151522 + b * 0.0721750
    z = r * 0.0193339 + g * 0.1191920 + b * 0.9503041
    x, y, z = x / 95.047, y / 100.0, z / 108.883

    def f(t):
        return t ** (1 / 3) if t > 0.008856 else 7.787 * t + 16 / 116

    return 116 * f(y) - 16, 500 * (f(x) - f(y)), 200 * (f(y) - f(z))


def delta_e_reference(c1, c2):
    l1 = lab_reference(c1.r, c1.g, c1.b)
    l2 = lab_reference(c2.r, c2.g, c2.b)
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(l1, l2)))


class TestParseColor:
    def test_short_hex(self):
        assert parse_color("#fff") == ColorRgba(255, 255, 255, 1.0)
        assert parse_color("#a1c") == ColorRgba(0xAA, 0x11, 0xCC, 1.0)

    def test_long_hex(self):
        assert parse_color("#ffe500") == ColorRgba(255, 229, 0, 1.0)

    def test_hex_with_alpha(self):
        c = parse_color("#05296280")
        assert (c.r, c.g, c.b) == (5, 41, 98)
        assert c.a == pytest.approx(128 / 255)

    def test_transparent(self):
        assert parse_color("transparent") == ColorRgba(0, 0, 0, 0.0)

    def test_rgb_function(self):
        assert parse_color("rgb(255, 229, 0)") == ColorRgba(255, 229, 0, 1.0)
        assert parse_color("rgb(100%, 0%, 50%)") == ColorRgba(255, 0, 128, 1.0)

    def test_rgba_function(self):
        c = parse_color("rgba(10, 20, 30, 0.5)")
        assert (c.r, c.g, c.b, c.a) == (10, 20, 30, 0.5)

    def test_named_colors(self):
        assert parse_color("white") == WHITE
        assert parse_color("orange") == ColorRgba(255, 165, 0, 1.0)
        assert parse_color("Navy") == ColorRgba(0, 0, 128, 1.0)

    @pytest.mark.parametrize("bad", ["", "#ggg", "#12345", "hsl(0,0%,0%)", "rgb(1,2)", "blurple"])
    def test_unknown_color(self, bad):
        with pytest.raises(UnknownColor):
            parse_color(bad)


class TestSelectors:
    def test_class_selector_specificity(self):
        rules = parse_stylesheet(".a{color:#fff}")
        assert len(rules) == 1
        assert rules[0].specificity == (0, 1, 0)

    def test_compound_specificity(self):
        rules = parse_stylesheet("#x .y button{background-color:rgb(255,229,0)}")
        assert len(rules) == 1
        assert rules[0].specificity == (1, 1, 1)

    def test_media_block_skipped(self):
        rules = parse_stylesheet("@media print{p{color:red}} p{color:blue}")
        assert len(rules) == 1
        assert rules[0].declarations == {"color": "blue"}

    def test_import_and_fontface_skipped(self):
        css = "@import url(x.css); @font-face{font-family:X;src:url(y)} div{color:red}"
        rules = parse_stylesheet(css)
        assert len(rules) == 1

    def test_unsupported_selectors_skipped(self):
        css = "a:hover{color:red} [data-x]{color:red} a>b{color:red} *{color:red} p{color:blue}"
        rules = parse_stylesheet(css)
        assert len(rules) == 1
        assert rules[0].selector.chain[0].tag == "p"

    def test_comma_list_splits(self):
        rules = parse_stylesheet("a, .b {color:red}")
        assert len(rules) == 2
        orders = [r.source_order for r in rules]
        assert orders == sorted(orders) and len(set(orders)) == 2

    def test_source_order_strictly_increasing(self):
        rules = parse_stylesheet("a{color:red} b{color:blue} .c{color:green}", starting_order=5)
        assert [r.source_order for r in rules] == [5, 6, 7]

    def test_unsupported_properties_dropped(self):
        decls = parse_declarations("color:red; margin:4px; font: 12px serif; border:1px solid")
        assert decls == {"color": "red", "border": "1px solid"}

    def test_important_flag_stripped(self):
        decls = parse_declarations("color: red !important")
        assert decls == {"color": "red"}

    def test_descendant_matching(self):
        tree = parse_html('<div id="x"><p class="y"><button>OK</button></p></div>')
        button = tree.find("button")
        sel = parse_selector("#x .y button")
        assert selector_matches(tree, button, sel)
        assert not selector_matches(tree, button, parse_selector("#z button"))

    def test_malformed_selector_rejected(self):
        assert parse_selector("") is None
        assert parse_selector("a:hover") is None
        assert parse_selector("a[b]") is None


class TestComputedStyle:
    def test_defaults(self):
        tree = parse_html("<div><p>x</p></div>")
        style = computed_style(tree, tree.find("p"), [])
        assert style.color == BLACK
        assert style.background_color == TRANSPARENT
        assert style.font_size == 16.0
        assert style.font_weight == 400
        assert style.position == "static"
        assert style.display == "other"
        assert style.z_index is None
        assert not style.border_present

    def test_inline_beats_rule(self):
        tree = parse_html('<div class="a" style="color:blue">x</div>')
        rules = parse_stylesheet(".a{color:red}")
        style = computed_style(tree, tree.find("div"), rules)
        assert style.color == parse_color("blue")

    def test_color_inherits(self):
        tree = parse_html('<div class="p"><span>x</span></div>')
        rules = parse_stylesheet(".p{color:red}")
        style = computed_style(tree, tree.find("span"), rules)
        assert style.color == parse_color("red")

    def test_font_size_inherits_background_does_not(self):
        tree = parse_html('<div class="p"><span>x</span></div>')
        rules = parse_stylesheet(".p{font-size:20px;background-color:#112233}")
        style = computed_style(tree, tree.find("span"), rules)
        assert style.font_size == 20.0
        assert style.background_color == TRANSPARENT

    def test_specificity_ranking(self):
        tree = parse_html('<div id="i" class="c">x</div>')
        rules = parse_stylesheet("div{color:red} .c{color:green} #i{color:blue}")
        style = computed_style(tree, tree.find("div"), rules)
        assert style.color == parse_color("blue")

    def test_source_order_tiebreak(self):
        tree = parse_html('<div class="a b">x</div>')
        rules = parse_stylesheet(".a{color:red} .b{color:green}")
        style = computed_style(tree, tree.find("div"), rules)
        assert style.color == parse_color("green")

    def test_later_equal_specificity_rule_flips_winner(self):
        tree = parse_html('<div class="a">x</div>')
        first = parse_stylesheet(".a{color:red}")
        style1 = computed_style(tree, tree.find("div"), first)
        both = first + parse_stylesheet(".a{color:green}", starting_order=len(first))
        style2 = computed_style(tree, tree.find("div"), both)
        assert style1.color == parse_color("red")
        assert style2.color == parse_color("green")

    def test_font_size_units(self):
        tree = parse_html('<div style="font-size:20px"><span style="font-size:1.5em">x</span></div>')
        style = computed_style(tree, tree.find("span"), [])
        assert style.font_size == pytest.approx(30.0)
        tree2 = parse_html('<div style="font-size:2rem">x</div>')
        assert computed_style(tree2, tree2.find("div"), []).font_size == pytest.approx(32.0)
        tree3 = parse_html('<div style="font-size:12pt">x</div>')
        assert computed_style(tree3, tree3.find("div"), []).font_size == pytest.approx(16.0)

    def test_position_z_index_display_border(self):
        tree = parse_html('<div style="position:fixed;z-index:9999;display:none;border:1px solid #000">x</div>')
        style = computed_style(tree, tree.find("div"), [])
        assert style.position == "fixed"
        assert style.z_index == 9999
        assert style.display == "none"
        assert style.border_present

    def test_border_none_not_present(self):
        tree = parse_html('<div style="border:none">x</div>')
        assert not computed_style(tree, tree.find("div"), []).border_present

    def test_malformed_declaration_skipped(self):
        tree = parse_html('<div style="color:notacolor;font-size:huge">x</div>')
        style = computed_style(tree, tree.find("div"), [])
        assert style.color == BLACK
        assert style.font_size == 16.0

    def test_deterministic(self):
        tree = parse_html('<div class="a"><p class="b">x</p></div>')
        rules = parse_stylesheet(".a{color:red;font-size:18px} .b{color:blue}")
        a = computed_style(tree, tree.find("p"), rules)
        b = StyleResolver(tree, rules).computed(tree.find("p"))
        assert a == b


class TestLuminanceContrast:
    def test_black_and_white(self):
        assert relative_luminance(BLACK) == 0.0
        assert relative_luminance(WHITE) == pytest.approx(1.0, abs=1e-12)

    def test_yellow_against_formula_oracle(self):
        # frozen from an independent evaluation of the WCAG formula
        assert relative_luminance(ColorRgba(255, 229, 0)) == pytest.approx(
            0.7729862284995336, abs=1e-12
        )

    def test_contrast_white_black(self):
        assert contrast_ratio(WHITE, BLACK) == pytest.approx(21.0, abs=1e-9)

    def test_contrast_identity(self):
        c = ColorRgba(5, 41, 98)
        assert contrast_ratio(c, c) == pytest.approx(1.0)

    def test_contrast_symmetric_and_bounded(self):
        rng = random.Random(7)
        for _ in range(200):
            a = ColorRgba(rng.randrange(256), rng.randrange(256), rng.randrange(256))
            b = ColorRgba(rng.randrange(256), rng.randrange(256), rng.randrange(256))
            cr = contrast_ratio(a, b)
            assert cr == pytest.approx(contrast_ratio(b, a))
            assert 1.0 <= cr <= 21.0 + 1e-9

    def test_luminance_monotone_per_channel(self):
        for ch in range(3):
            prev = -1.0
            for v in range(0, 256, 5):
                rgb = [0, 0, 0]
                rgb[ch] = v
                lum = relative_luminance(ColorRgba(*rgb))
                assert lum > prev
                prev = lum


class TestDeltaE:
    def test_identity(self):
        c = ColorRgba(12, 200, 99)
        assert delta_e(c, c) == 0.0

    def test_black_white_near_100(self):
        # CIE76 distance between sRGB black and white is L* 0 -> 100
        value = delta_e(BLACK, WHITE)
        assert value == pytest.approx(100.0, abs=0.01)
        assert value == pytest.approx(delta_e_reference(BLACK, WHITE), abs=1e-6)

    def test_against_independent_reference(self):
        rng = random.Random(99)
        for _ in range(100):
            a = ColorRgba(rng.randrange(256), rng.randrange(256), rng.randrange(256))
            b = ColorRgba(rng.randrange(256), rng.randrange(256), rng.randrange(256))
            assert delta_e(a, b) == pytest.approx(delta_e_reference(a, b), abs=1e-6)

    def test_metric_properties_on_random_triples(self):
        rng = random.Random(4242)
        for _ in range(1000):
            cols = [
                ColorRgba(rng.randrange(256), rng.randrange(256), rng.randrange(256))
                for _ in range(3)
            ]
            a, b, c = cols
            dab, dba = delta_e(a, b), delta_e(b, a)
            assert dab >= 0.0
            assert dab == pytest.approx(dba, abs=1e-9)
            assert delta_e(a, a) == 0.0
            assert delta_e(a, c) <= dab + delta_e(b, c) + 1e-9
