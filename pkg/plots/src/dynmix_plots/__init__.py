"""Figure generation for dynmix experiment outputs."""

from .render import FigureSpec, render  # noqa: F401

__version__ = "0.1.0"
