"""Figures from quench-simulator result files."""

from .readers import SchemaError, read_overlap, read_sweep_csv, read_trajectory
from .render import (FigureSpec, build_figure, build_heatmap, build_overlap,
                     build_trajectory, render)

__version__ = "0.1.0"
