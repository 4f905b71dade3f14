"""Offline rendering of noisyspins CSV tables to SVG/PNG figures.

The package is independent of the solver: it consumes only the CSV files
and the documented column schema.
"""

__version__ = "0.1.0"

from .render import FigureSpec, render  # noqa: F401
from .schema import SchemaError, load_schema, read_table  # noqa: F401
