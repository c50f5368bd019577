"""Skip quadtrees over the shared integer lattice.

A tree is built for one grid from the reference points of the objects that
aligned to it. Level 0 holds every distinct lattice point; level i keeps
every second point of level i-1 (dropping the first), down to a single
point at level t. Each level is subdivided into squares and donuts by the
compressed quadtree of its points; regions that persist across consecutive
levels are stored once as a node with a level span.

All coordinates below are 53-bit lattice integers. The y axis is flipped
(vb = 2^53 - 1 - v) before interleaving so that Morton order enumerates
quadrants NW, NE, SW, SE; keys are (hi, lo) pairs of 54 + 52 bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import FULL, SQUARE, subdivide_fast
from .geom import Disk, FatTriangle
from .grids import CENTERS, GridCell, to_lattice

_M26 = (np.int64(1) << 26) - 1
_SCALE = float(np.ldexp(1.0, 52))

# slack applied when testing an object against a donut hole; biased so that
# borderline contact counts as crossing (assignment then stops higher up,
# which is always safe)
HOLE_PAD = 1e-11

MAX_CHILDREN = 16


def _spread_np(x):
    x = x & np.int64(0x7FFFFFF)
    x = (x | (x << 16)) & np.int64(0x0000FFFF0000FFFF)
    x = (x | (x << 8)) & np.int64(0x00FF00FF00FF00FF)
    x = (x | (x << 4)) & np.int64(0x0F0F0F0F0F0F0F0F)
    x = (x | (x << 2)) & np.int64(0x3333333333333333)
    x = (x | (x << 1)) & np.int64(0x5555555555555555)
    return x


def morton_keys(u, v):
    """106-bit Morton keys, as (hi, lo) int64 pairs, for lattice points."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    vb = (FULL - 1) - v
    hi = (_spread_np(vb >> 26) << 1) | _spread_np(u >> 26)
    lo = (_spread_np(vb & _M26) << 1) | _spread_np(u & _M26)
    return hi, lo


def _msb_np(x):
    # highest set bit per element; undefined for zeros (caller masks them)
    x = x.astype(np.uint64)
    x |= x >> 1
    x |= x >> 2
    x |= x >> 4
    x |= x >> 8
    x |= x >> 16
    x |= x >> 32
    return np.bitwise_count(x).astype(np.int64) - 1


def lca_depths(h1, l1, h2, l2):
    """Depth of the smallest cell containing both keys (53 if equal)."""
    xh = np.asarray(h1 ^ h2)
    xl = np.asarray(l1 ^ l2)
    g = np.where(xh != 0, 52 + _msb_np(np.where(xh != 0, xh, 1)),
                 _msb_np(np.where(xl != 0, xl, 1)))
    out = (105 - g) >> 1
    return np.where((xh == 0) & (xl == 0), 53, out)


def locate_sorted(thi, tlo, qhi, qlo):
    """Index of the last table key <= each query, for ascending (hi, lo).

    Compound 106-bit searchsorted: table starts and queries are ranked
    together with a tiebreak placing starts first, so equal keys resolve
    to the interval that begins there.
    """
    nq = qhi.shape[0]
    if nq == 0:
        return np.empty(0, dtype=np.int64)
    nb = thi.shape[0]
    hh = np.concatenate([thi, qhi])
    ll = np.concatenate([tlo, qlo])
    tie = np.zeros(nb + nq, dtype=np.int8)
    tie[nb:] = 1
    order = np.lexsort((tie, ll, hh))
    isq = tie[order] == 1
    cum = np.cumsum(~isq)
    qpos = np.nonzero(isq)[0]
    out = np.empty(nq, dtype=np.int64)
    out[order[qpos] - nb] = cum[qpos] - 1
    return out


def zorder_sort(xs, ys, grid_id: int = 0):
    """Permutation putting points in Z order (NW, NE, SW, SE recursively)."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    u, v = to_lattice(xs, ys, grid_id)
    if np.any((u < 0) | (u >= FULL) | (v < 0) | (v >= FULL)):
        raise ValueError("points outside the root cell")
    hi, lo = morton_keys(u, v)
    return np.lexsort((lo, hi))


@dataclass(frozen=True)
class Region:
    outer: GridCell
    hole: Optional[GridCell] = None


class SkipQuadtree:
    """Skip structure for one grid; built by build_skip_quadtree."""

    def __init__(self, grid_id, t, key_hi, key_lo, pt_u, pt_v,
                 pt_indptr, pt_ids, orig_uniq, nodes, tables, diag):
        self.grid_id = grid_id
        self.t = t
        self.key_hi = key_hi            # sorted unique Morton keys
        self.key_lo = key_lo
        self.pt_u = pt_u                # lattice coords, same order
        self.pt_v = pt_v
        self.pt_indptr = pt_indptr      # unique key -> original point ids
        self.pt_ids = pt_ids
        self.orig_uniq = orig_uniq      # original point -> unique key index
        (self.node_depth, self.node_u0, self.node_vb0, self.node_hdepth,
         self.node_hu0, self.node_hvb0, self.node_lvl_lo, self.node_lvl_hi,
         self.node_point, self.node_parent, self.child_indptr,
         self.child_list, self.node_first_hi, self.node_first_lo) = nodes
        self.tables = tables            # per level: (starts_hi, starts_lo, node)
        self.diag = diag

    @property
    def m(self) -> int:
        return int(self.key_hi.shape[0])

    @property
    def n_nodes(self) -> int:
        return int(self.node_depth.shape[0])

    def level_points(self, i):
        """Indices (into the sorted unique keys) of the level-i subset."""
        if not 0 <= i <= self.t:
            raise ValueError("level out of range")
        return np.arange((1 << i) - 1, self.m, 1 << i, dtype=np.int64)

    def locate(self, level, qhi, qlo):
        """Node whose region covers each query key, at one level."""
        thi, tlo, tnode = self.tables[level]
        return tnode[locate_sorted(thi, tlo, qhi, qlo)]

    def search_paths(self, xs, ys):
        """Per-level covering nodes for query points; shape (t+1, nq).

        Row i holds the level-i node of each query.
        """
        u, v = to_lattice(np.asarray(xs, float), np.asarray(ys, float),
                          self.grid_id)
        qhi, qlo = morton_keys(u, v)
        out = np.empty((self.t + 1, qhi.shape[0]), dtype=np.int64)
        for lvl in range(self.t + 1):
            out[lvl] = self.locate(lvl, qhi, qlo)
        return out

    def search_path(self, x, y):
        """Top-down node list (level t first) for a single point."""
        paths = self.search_paths(np.array([x]), np.array([y]))
        return [int(paths[lvl, 0]) for lvl in range(self.t, -1, -1)]

    def node_side(self, nids):
        return np.int64(1) << (53 - self.node_depth[nids])

    def node_vrange(self, nids):
        side = self.node_side(nids)
        vhi = FULL - self.node_vb0[nids]
        return vhi - side, vhi

    def node_region(self, nid: int) -> Region:
        d = int(self.node_depth[nid])
        outer = self._cell(d, int(self.node_u0[nid]), int(self.node_vb0[nid]))
        hd = int(self.node_hdepth[nid])
        hole = None
        if hd >= 0:
            hole = self._cell(hd, int(self.node_hu0[nid]),
                              int(self.node_hvb0[nid]))
        return Region(outer, hole)

    def _cell(self, d: int, u0: int, vb0: int) -> GridCell:
        side = 1 << (53 - d)
        i = u0 >> (53 - d)
        j = (int(FULL) - vb0 - side) >> (53 - d)
        return GridCell(self.grid_id, 1 - d, i, j)

    def children(self, nid: int):
        return self.child_list[self.child_indptr[nid]:self.child_indptr[nid + 1]]


def _run_kernel(khi, klo, u, vb):
    m = khi.shape[0]
    cap_r = 8 * m + 64
    cap_s = 6 * m + 128
    rtype = np.empty(cap_r, np.int64)
    rdepth = np.empty(cap_r, np.int64)
    ru0 = np.empty(cap_r, np.int64)
    rvb0 = np.empty(cap_r, np.int64)
    rhd = np.empty(cap_r, np.int64)
    rhu0 = np.empty(cap_r, np.int64)
    rhvb0 = np.empty(cap_r, np.int64)
    rpidx = np.empty(cap_r, np.int64)
    shi = np.empty(cap_r, np.int64)
    slo = np.empty(cap_r, np.int64)
    sreg = np.empty(cap_r, np.int64)
    stack = np.empty((cap_s, 8), np.int64)
    nreg, nint = subdivide_fast(khi, klo, u, vb, rtype, rdepth, ru0, rvb0,
                                rhd, rhu0, rhvb0, rpidx, shi, slo, sreg,
                                stack)
    if nreg < 0:
        raise RuntimeError("subdivision buffer overflow")
    regions = (rtype[:nreg].copy(), rdepth[:nreg].copy(), ru0[:nreg].copy(),
               rvb0[:nreg].copy(), rhd[:nreg].copy(), rhu0[:nreg].copy(),
               rhvb0[:nreg].copy(), rpidx[:nreg].copy())
    intervals = (shi[:nint].copy(), slo[:nint].copy(), sreg[:nint].copy())
    return regions, intervals


def build_skip_quadtree(xs, ys, grid_id: int = 0) -> SkipQuadtree:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape[0] == 0:
        raise ValueError("need at least one point")
    u, v = to_lattice(xs, ys, grid_id)
    if np.any((u < 0) | (u >= FULL) | (v < 0) | (v >= FULL)):
        raise ValueError("points outside the root cell")
    hi, lo = morton_keys(u, v)
    order = np.lexsort((lo, hi))
    sh = hi[order]
    sl = lo[order]
    new = np.empty(order.shape[0], dtype=bool)
    new[0] = True
    new[1:] = (sh[1:] != sh[:-1]) | (sl[1:] != sl[:-1])
    uniq_sorted = np.cumsum(new) - 1
    orig_uniq = np.empty(order.shape[0], dtype=np.int64)
    orig_uniq[order] = uniq_sorted
    starts = np.nonzero(new)[0]
    key_hi = sh[starts]
    key_lo = sl[starts]
    vb = (FULL - 1) - v
    pt_u = u[order][starts]
    pt_vb = vb[order][starts]
    pt_indptr = np.concatenate([starts, [order.shape[0]]]).astype(np.int64)
    m = int(key_hi.shape[0])
    t = m.bit_length() - 1

    # one subdivision per level
    lvl_regions = []
    lvl_intervals = []
    for i in range(t + 1):
        step = 1 << i
        sel = slice(step - 1, None, step)
        regions, intervals = _run_kernel(
            np.ascontiguousarray(key_hi[sel]),
            np.ascontiguousarray(key_lo[sel]),
            np.ascontiguousarray(pt_u[sel]),
            np.ascontiguousarray(pt_vb[sel]))
        lvl_regions.append(regions)
        lvl_intervals.append(intervals)

    # merge identical regions on consecutive levels into single nodes
    counts = [r[0].shape[0] for r in lvl_regions]
    total = int(sum(counts))
    offs = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    cat = [np.concatenate([lvl_regions[i][c] for i in range(t + 1)])
           for c in range(8)]
    rtype, rdepth, ru0, rvb0, rhd, rhu0, rhvb0, rpidx = cat
    rlvl = np.repeat(np.arange(t + 1, dtype=np.int64), counts)

    order2 = np.lexsort((rlvl, rhvb0, rhu0, rhd, rvb0, ru0, rdepth))
    sd, su, sv = rdepth[order2], ru0[order2], rvb0[order2]
    shd, shu, shv = rhd[order2], rhu0[order2], rhvb0[order2]
    slvl = rlvl[order2]
    brk = np.empty(total, dtype=bool)
    brk[0] = True
    brk[1:] = ((sd[1:] != sd[:-1]) | (su[1:] != su[:-1]) |
               (sv[1:] != sv[:-1]) | (shd[1:] != shd[:-1]) |
               (shu[1:] != shu[:-1]) | (shv[1:] != shv[:-1]) |
               (slvl[1:] != slvl[:-1] + 1))
    node_of_sorted = np.cumsum(brk) - 1
    n_nodes = int(node_of_sorted[-1]) + 1
    run_start = np.nonzero(brk)[0]
    run_end = np.concatenate([run_start[1:], [total]]) - 1

    node_depth = sd[run_start]
    node_u0 = su[run_start]
    node_vb0 = sv[run_start]
    node_hdepth = shd[run_start]
    node_hu0 = shu[run_start]
    node_hvb0 = shv[run_start]
    node_lvl_lo = slvl[run_start]
    node_lvl_hi = slvl[run_end]

    node_of_row = np.empty(total, dtype=np.int64)
    node_of_row[order2] = node_of_sorted

    node_point = np.full(n_nodes, -1, dtype=np.int64)
    base = rpidx[offs[0]:offs[1]]
    leaf_rows = np.nonzero(rtype[offs[0]:offs[1]] == SQUARE)[0]
    node_point[node_of_row[offs[0]:offs[1]][leaf_rows]] = base[leaf_rows]

    tables = []
    node_first_hi = np.empty(n_nodes, dtype=np.int64)
    node_first_lo = np.empty(n_nodes, dtype=np.int64)
    for i in range(t + 1):
        shi_i, slo_i, sreg_i = lvl_intervals[i]
        tnode = node_of_row[offs[i]:offs[i + 1]][sreg_i]
        tables.append((shi_i, slo_i, tnode))
        node_first_hi[tnode] = shi_i
        node_first_lo[tnode] = slo_i

    # parent: covering region one level above the node's top level
    node_parent = np.full(n_nodes, -1, dtype=np.int64)
    for lvl in range(1, t + 1):
        sel = np.nonzero(node_lvl_hi == lvl - 1)[0]
        if sel.shape[0] == 0:
            continue
        thi, tlo, tnode = tables[lvl]
        idx = locate_sorted(thi, tlo, node_first_hi[sel], node_first_lo[sel])
        node_parent[sel] = tnode[idx]

    has_parent = np.nonzero(node_parent >= 0)[0]
    kids = np.bincount(node_parent[has_parent], minlength=n_nodes)
    assert kids.max(initial=0) <= MAX_CHILDREN, "node fan-out exceeded"
    child_indptr = np.concatenate([[0], np.cumsum(kids)]).astype(np.int64)
    ordc = has_parent[np.argsort(node_parent[has_parent], kind="stable")]
    child_list = ordc.astype(np.int64)

    diag = {
        "duplicate_points": int(xs.shape[0] - m),
        "regions_total": total,
        "nodes": n_nodes,
    }
    nodes = (node_depth, node_u0, node_vb0, node_hdepth, node_hu0,
             node_hvb0, node_lvl_lo, node_lvl_hi, node_point, node_parent,
             child_indptr, child_list, node_first_hi, node_first_lo)
    return SkipQuadtree(grid_id, t, key_hi, key_lo, pt_u,
                        (FULL - 1) - pt_vb, pt_indptr, order.astype(np.int64),
                        orig_uniq, nodes, tables, diag)


def _object_lattice_bbox(bbox, grid_id):
    u0, v0 = to_lattice(bbox[:, 0], bbox[:, 1], grid_id)
    u1, v1 = to_lattice(bbox[:, 2], bbox[:, 3], grid_id)
    lim = FULL - 1
    return (np.clip(u0, 0, lim), np.clip(v0, 0, lim),
            np.clip(u1, 0, lim), np.clip(v1, 0, lim))


def _hole_rect(tree, nids):
    # float coordinates of the hole cell; only valid where hdepth >= 0
    ox, oy = CENTERS[tree.grid_id]
    hd = tree.node_hdepth[nids]
    d = np.maximum(hd, 0)
    side_lat = np.int64(1) << (53 - d)
    side = np.ldexp(1.0, (1 - d).astype(np.int32))
    x0 = ox + tree.node_hu0[nids] / _SCALE
    y0 = oy + (FULL - tree.node_hvb0[nids] - side_lat) / _SCALE
    return x0, y0, x0 + side, y0 + side


def _disks_hit_rect(cx, cy, r, x0, y0, x1, y1):
    dx = np.maximum(np.maximum(x0 - cx, cx - x1), 0.0)
    dy = np.maximum(np.maximum(y0 - cy, cy - y1), 0.0)
    return dx * dx + dy * dy <= r * r * (1.0 + HOLE_PAD)


def _tris_hit_rect(verts, x0, y0, x1, y1):
    # SAT over the two grid axes and the three edge normals, with a small
    # bias so grazing contact counts as a hit
    eps = 1e-12
    tx = verts[:, :, 0]
    ty = verts[:, :, 1]
    sep = (tx.min(axis=1) > x1 + eps) | (tx.max(axis=1) < x0 - eps)
    sep |= (ty.min(axis=1) > y1 + eps) | (ty.max(axis=1) < y0 - eps)
    for e in range(3):
        px, py = tx[:, e], ty[:, e]
        qx, qy = tx[:, (e + 1) % 3], ty[:, (e + 1) % 3]
        nx, ny = py - qy, qx - px
        tp = nx[:, None] * tx + ny[:, None] * ty
        rx0, rx1 = nx * x0, nx * x1
        ry0, ry1 = ny * y0, ny * y1
        rmin = np.minimum(rx0, rx1) + np.minimum(ry0, ry1)
        rmax = np.maximum(rx0, rx1) + np.maximum(ry0, ry1)
        scale = np.abs(nx) + np.abs(ny) + 1.0
        sep |= (tp.min(axis=1) > rmax + eps * scale)
        sep |= (rmin > tp.max(axis=1) + eps * scale)
    return ~sep


def _region_crossings(tree, nids, kind, ulo, vlo, uhi, vhi,
                      cx=None, cy=None, r=None, verts=None):
    """Does each object cross its region's boundary, and touch the hole?"""
    u0 = tree.node_u0[nids]
    side = tree.node_side(nids)
    cvlo, cvhi = tree.node_vrange(nids)
    inside = ((ulo >= u0) & (uhi < u0 + side) &
              (vlo >= cvlo) & (vhi < cvhi))
    donut = tree.node_hdepth[nids] >= 0
    hole_hit = np.zeros(nids.shape[0], dtype=bool)
    if np.any(donut):
        dn = np.nonzero(donut)[0]
        x0, y0, x1, y1 = _hole_rect(tree, nids[dn])
        if kind == "disks":
            hit = _disks_hit_rect(cx[dn], cy[dn], r[dn], x0, y0, x1, y1)
        else:
            hit = _tris_hit_rect(verts[dn], x0, y0, x1, y1)
        hole_hit[dn] = hit
    return ~inside | hole_hit, hole_hit


def assign_objects(tree, kind, bbox, refx, refy,
                   cx=None, cy=None, r=None, verts=None):
    """Assign each object to the first node on its reference-point path
    whose region boundary it crosses, or the level-0 node otherwise.

    Returns (node ids, crossed-hole flags). Objects are expected to be the
    ones the tree was built for, but any reference point inside the root
    works.
    """
    k = bbox.shape[0]
    out = np.full(k, -1, dtype=np.int64)
    hole = np.zeros(k, dtype=bool)
    if k == 0:
        return out, hole
    ru, rv = to_lattice(np.asarray(refx, float), np.asarray(refy, float),
                        tree.grid_id)
    qhi, qlo = morton_keys(ru, rv)
    ulo, vlo, uhi, vhi = _object_lattice_bbox(bbox, tree.grid_id)
    active = np.arange(k, dtype=np.int64)
    prev = np.full(k, -1, dtype=np.int64)
    for lvl in range(tree.t, -1, -1):
        cur = tree.locate(lvl, qhi[active], qlo[active])
        chng = np.nonzero(cur != prev[active])[0]
        if chng.shape[0]:
            rows = active[chng]
            nids = cur[chng]
            if kind == "disks":
                crossed, hhit = _region_crossings(
                    tree, nids, kind, ulo[rows], vlo[rows], uhi[rows],
                    vhi[rows], cx=cx[rows], cy=cy[rows], r=r[rows])
            else:
                crossed, hhit = _region_crossings(
                    tree, nids, kind, ulo[rows], vlo[rows], uhi[rows],
                    vhi[rows], verts=verts[rows])
            hit_rows = rows[crossed]
            out[hit_rows] = nids[crossed]
            hole[hit_rows] = hhit[crossed]
        prev[active] = cur
        if chng.shape[0]:
            active = active[out[active] < 0]
            if active.shape[0] == 0:
                break
    rest = np.nonzero(out < 0)[0]
    out[rest] = prev[rest]
    return out, hole


def assign_object(tree, obj):
    """Single-object assignment; returns (node id, crossed_hole)."""
    if isinstance(obj, Disk):
        cx, cy = obj.x, obj.y
        bbox = np.array([[cx - obj.r, cy - obj.r, cx + obj.r, cy + obj.r]])
        nid, hole = assign_objects(tree, "disks", bbox,
                                   np.array([cx]), np.array([cy]),
                                   cx=np.array([cx]), cy=np.array([cy]),
                                   r=np.array([obj.r]))
    elif isinstance(obj, FatTriangle):
        v = obj.verts
        bbox = np.array([[v[:, 0].min(), v[:, 1].min(),
                          v[:, 0].max(), v[:, 1].max()]])
        c = v.mean(axis=0)
        nid, hole = assign_objects(tree, "triangles", bbox,
                                   np.array([c[0]]), np.array([c[1]]),
                                   verts=v[None, :, :])
    else:
        raise TypeError("unsupported object")
    return int(nid[0]), bool(hole[0])
