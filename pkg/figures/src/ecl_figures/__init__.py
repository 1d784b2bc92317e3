"""Figure rendering for entropy-collapse simulation outputs.

Consumes only the engine's documented CSV/JSON files; never imports the
engine or recomputes its numbers.
"""

from .errors import EmptyDataError, FigureError, InputError, MissingColumnError
from .render import KINDS, FigureSpec, render

__version__ = "0.1.0"

__all__ = [
    "EmptyDataError",
    "FigureError",
    "FigureSpec",
    "InputError",
    "KINDS",
    "MissingColumnError",
    "render",
]
