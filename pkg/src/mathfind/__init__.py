"""Combined text and formula search for wiki-style corpora."""

__version__ = "0.1.0"
