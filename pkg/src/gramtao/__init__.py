"""Grammar-based test generation with semantic oracles and grammar-directed reduction."""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def grammar_path(name: str) -> Path:
    """Path of a grammar shipped with the package, e.g. ``grammar_path("arith")``."""
    filename = name if name.endswith(".tao") else f"{name}.tao"
    return Path(str(resources.files("gramtao").joinpath("grammars", filename)))
