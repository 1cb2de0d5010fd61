"""Plotting front end for sweep CSV outputs.

Consumes the solver's CSV files only; no physics is recomputed here.
"""

from .spec import PlotSpec, load_spec
from .plots import plot_heatmap, plot_lines

__version__ = "0.1.0"

__all__ = ["PlotSpec", "load_spec", "plot_lines", "plot_heatmap"]
