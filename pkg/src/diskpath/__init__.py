"""Shortest-path trees on geometric intersection graphs.

The package computes unweighted single-source and multi-source shortest-path
trees over the intersection graph of n disks or fat triangles without ever
materializing the edge set, and ships a brute-force reference path for
verification.
"""

from .geom import Disk, FatTriangle, objects_intersect, size_of
from .instances import Instance, generate, load_instance, save_instance
from .sssp import (UNREACHABLE, BruteBackend, FastBackend, ShortestPathTree,
                   sssp, sssp_multi)

__all__ = [
    "Disk",
    "FatTriangle",
    "Instance",
    "objects_intersect",
    "size_of",
    "generate",
    "load_instance",
    "save_instance",
    "sssp",
    "sssp_multi",
    "ShortestPathTree",
    "UNREACHABLE",
    "FastBackend",
    "BruteBackend",
]

__version__ = "0.1.0"
