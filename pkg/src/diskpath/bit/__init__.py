"""Bichromatic intersection testing: blue objects vs a red set."""

from .disks import DiskIndex, aw_nearest, bit_disks
from .triangles import TriangleBitIndex, bit_triangles

__all__ = ["DiskIndex", "aw_nearest", "bit_disks",
           "TriangleBitIndex", "bit_triangles"]
