"""Figure rendering for superhet campaign output trees."""

__version__ = "0.1.0"

from .figures import FIGURE_IDS, FigureSpec, RenderReport, render, render_all
from .schema import SchemaError

__all__ = ["FIGURE_IDS", "FigureSpec", "RenderReport", "render", "render_all",
           "SchemaError"]
