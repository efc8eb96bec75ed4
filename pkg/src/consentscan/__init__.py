"""consentscan: dark-pattern detection for cookie consent banners."""

__version__ = "0.1.0"
