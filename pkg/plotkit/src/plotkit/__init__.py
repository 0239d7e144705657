"""Offline rendering of nlslab CSV outputs.

A pure consumer of the simulation CSVs: nothing here recomputes physics, so
the simulation package's acceptance suite runs without this one installed.
"""

from .render import PlotJob, SchemaError, render

__version__ = "0.1.0"
__all__ = ["PlotJob", "SchemaError", "render"]
