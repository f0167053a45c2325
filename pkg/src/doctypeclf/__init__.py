"""Research vs. non-research classification of journal works from open metadata."""

__version__ = "0.1.0"
