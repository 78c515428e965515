"""Yee-grid time-domain Maxwell solver with CPML boundaries, lumped ports,
and plane-wave injection."""

from .grid import GridSpec, courant_dt, grid_for_scene
from .engine import RawRecords, RecorderSpec, run, Simulation
from .rasterize import rasterize

__all__ = [
    "GridSpec",
    "courant_dt",
    "grid_for_scene",
    "RawRecords",
    "RecorderSpec",
    "run",
    "Simulation",
    "rasterize",
]
