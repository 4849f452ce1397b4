"""polydyn - exact and numeric tools for polynomial dynamics."""

__version__ = "0.1.0"
