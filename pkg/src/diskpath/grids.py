"""Shifted hierarchical grids and 6-alignment.

Three grids share the axis-aligned cell structure [o_x + i*2^l, o_x +
(i+1)*2^l) x [o_y + j*2^l, ...), with origins o shifted by multiples of
-1/3 along the diagonal. Every object inside the unit square is aligned
with a cell at most 6 times its size in at least one grid.

Cell membership everywhere downstream is decided on an integer lattice:
points map to u = floor((x - o_x) * 2^52), and the cell of u at level l is
u >> (52 + l). Quadtrees, Morton codes and the alignment below all share
this lattice, so a point can never fall on different sides of the same
cell boundary in two places.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .geom import Disk, FatTriangle, size_of

CENTERS = ((0.0, 0.0), (-1.0 / 3.0, -1.0 / 3.0), (-2.0 / 3.0, -2.0 / 3.0))

SCALE_BITS = 52

# levels below -52 would fall off the lattice; objects that small are
# aligned at -52 (their cells still contain them, just with more slack)
MIN_LEVEL = -52

ROOT_LEVEL = 1

ALIGN_RATIO = 6.0
_RATIO_SLOP = 1.0 + 1e-9

_WINDOW = 4        # levels l0 .. l0+3
_FALLBACK_WINDOW = 9


@dataclass(frozen=True)
class GridCell:
    grid_id: int
    level: int
    i: int
    j: int

    def side(self) -> float:
        return math.ldexp(1.0, int(self.level))

    def lo(self) -> Tuple[float, float]:
        ox, oy = CENTERS[self.grid_id]
        s = self.side()
        return (ox + self.i * s, oy + self.j * s)

    def hi(self) -> Tuple[float, float]:
        lx, ly = self.lo()
        s = self.side()
        return (lx + s, ly + s)

    def contains_point(self, x: float, y: float) -> bool:
        lx, ly = self.lo()
        hx, hy = self.hi()
        return lx <= x < hx and ly <= y < hy


@dataclass(frozen=True)
class GridFamily:
    centers: tuple


def make_family() -> GridFamily:
    return GridFamily(centers=CENTERS)


def ceil_log2(size) -> np.ndarray:
    """Exact ceil(log2(size)) via exponent extraction, elementwise."""
    s = np.atleast_1d(np.asarray(size, dtype=float))
    m, e = np.frexp(s)          # s = m * 2^e with m in [0.5, 1)
    out = np.where(m == 0.5, e - 1, e)
    return out.astype(np.int64)


def cell_of(grid_id: int, level: int, x: float, y: float) -> GridCell:
    """The unique cell of grid grid_id at the given level containing (x, y)."""
    ox, oy = CENTERS[grid_id]
    level = int(level)
    s = math.ldexp(1.0, level)
    return GridCell(int(grid_id), level,
                    int(math.floor((x - ox) / s)),
                    int(math.floor((y - oy) / s)))


def to_lattice(xs, ys, grid_id: int):
    """Integer lattice coordinates of points for one grid, int64 in [0, 2^53)."""
    ox, oy = CENTERS[grid_id]
    f = math.ldexp(1.0, SCALE_BITS)
    u = np.floor((np.asarray(xs, dtype=float) - ox) * f).astype(np.int64)
    v = np.floor((np.asarray(ys, dtype=float) - oy) * f).astype(np.int64)
    return u, v


def _lattice_bbox(bb, grid_id: int):
    ulo, vlo = to_lattice(bb[:, 0], bb[:, 1], grid_id)
    uhi, vhi = to_lattice(bb[:, 2], bb[:, 3], grid_id)
    return ulo, vlo, uhi, vhi


def align_objects(bboxes, sizes):
    """6-alignment pass over all objects at once.

    bboxes: (n, 4) lox loy hix hiy; sizes: (n,). Objects must lie inside the
    unit square. Returns (grid_id, level, fallback_count): per object, the
    lowest grid id holding a containing cell of side at most 6*size within
    the standard level window, with the smallest such level in that grid.

    The rare fallback (floating-point boundary pileups) widens the window
    and drops the ratio gate; correctness downstream never depends on the
    constant 6, so fallback objects are only counted, not rejected.
    """
    bboxes = np.asarray(bboxes, dtype=float)
    sizes = np.asarray(sizes, dtype=float)
    n = len(sizes)
    l0 = np.maximum(ceil_log2(sizes), MIN_LEVEL)
    grid = np.full(n, -1, dtype=np.int8)
    level = np.zeros(n, dtype=np.int64)
    for g in range(3):
        todo = grid < 0
        if not todo.any():
            break
        ulo, vlo, uhi, vhi = _lattice_bbox(bboxes[todo], g)
        stodo = sizes[todo]
        ltodo = l0[todo]
        got = np.zeros(len(stodo), dtype=bool)
        lev = np.zeros(len(stodo), dtype=np.int64)
        for dl in range(_WINDOW):
            ll = ltodo + dl
            shift = SCALE_BITS + ll
            fits = (ulo >> shift == uhi >> shift) & (vlo >> shift == vhi >> shift)
            small = np.ldexp(1.0, ll) <= ALIGN_RATIO * stodo * _RATIO_SLOP
            take = fits & small & ~got
            lev[take] = ll[take]
            got |= take
        idx = np.nonzero(todo)[0]
        grid[idx[got]] = g
        level[idx[got]] = lev[got]
    fallback = int((grid < 0).sum())
    if fallback:
        _align_fallback(bboxes, sizes, l0, grid, level)
    return grid, level, fallback


def _align_fallback(bboxes, sizes, l0, grid, level):
    # widened search, best ratio wins; ultimate resort is the level-1 root
    # cell of grid 0, which contains the whole unit square
    for k in np.nonzero(grid < 0)[0]:
        best = None
        for g in range(3):
            ulo, vlo, uhi, vhi = _lattice_bbox(bboxes[k:k + 1], g)
            for dl in range(_FALLBACK_WINDOW):
                ll = int(l0[k]) + dl
                shift = SCALE_BITS + ll
                if (ulo[0] >> shift == uhi[0] >> shift
                        and vlo[0] >> shift == vhi[0] >> shift):
                    ratio = math.ldexp(1.0, ll) / sizes[k]
                    if best is None or ratio < best[0]:
                        best = (ratio, g, ll)
                    break
        if best is None:
            best = (math.ldexp(1.0, ROOT_LEVEL) / sizes[k], 0, ROOT_LEVEL)
        grid[k] = best[1]
        level[k] = best[2]


def find_aligned_grid(obj, fam: Optional[GridFamily] = None):
    """Scalar alignment for one Disk or FatTriangle; returns (grid_id, cell)."""
    if isinstance(obj, Disk):
        bb = np.array([[obj.x - obj.r, obj.y - obj.r, obj.x + obj.r, obj.y + obj.r]])
        cx, cy = obj.x, obj.y
    elif isinstance(obj, FatTriangle):
        v = obj.verts
        bb = np.array([[v[:, 0].min(), v[:, 1].min(), v[:, 0].max(), v[:, 1].max()]])
        cx, cy = v.mean(axis=0)
    else:
        raise TypeError("find_aligned_grid expects Disk or FatTriangle")
    g, lv, _ = align_objects(bb, np.array([size_of(obj)]))
    cell = cell_of(int(g[0]), int(lv[0]), float(cx), float(cy))
    return int(g[0]), cell
