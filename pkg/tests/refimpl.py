"""Independent reference implementations used as oracles across test modules."""

import math


def wcag_luminance(r, g, b):
    def ex(c):
        s = c / 255.0
        return s / 12.92 if s <= 0.03928 else ((s + 0.055) / 1.055) ** 2.4

    return 0.2126 * ex(r) + 0.7152 * ex(g) + 0.0722 * ex(b)


def wcag_contrast(rgb1, rgb2):
    l1, l2 = wcag_luminance(*rgb1), wcag_luminance(*rgb2)
    return (max(l1, l2) + 0.05) / (min(l1, l2) + 0.05)


def srgb_to_lab(r, g, b):
    """0..100-scaled formulation, distinct from the production code path."""
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


def cie76_delta_e(rgb1, rgb2):
    l1 = srgb_to_lab(*rgb1)
    l2 = srgb_to_lab(*rgb2)
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(l1, l2)))
