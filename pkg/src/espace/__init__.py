"""espace: explanatory spaces over annotated document corpora.

The pipeline turns a corpus (text plus dependency annotations) and an
authored initial explanation into a navigable graph of concepts with
per-concept overview cards, served over HTTP for interactive exploration
and measurable with the bundled evaluation harness.
"""

__version__ = "0.1.0"

from .errors import BundleError, EspaceError, ParseError, ValidationError

__all__ = [
    "BundleError",
    "EspaceError",
    "ParseError",
    "ValidationError",
    "__version__",
]
