"""Batch figure renderer for link-simulation CSV output.

Consumes sweep and pattern CSV files through their column schema alone and
writes static images. No physics is recomputed here; archived CSVs render
identically with the simulator absent.
"""

__version__ = "0.1.0"
