"""Clique-based contraction of the implicit intersection graph.

Objects are partitioned per aligned grid, assigned to skip-quadtree
nodes, and grouped into stabbed cliques: every member of a clique
contains the clique's stab point. Crossing objects pick the first
stabbing-lattice cell center they contain (row-major scan over a
lattice whose cell diameter is side/12 for disks, sin(alpha)*side/24
for triangles, the hole side for hole crossers); objects at one-point
leaves share the leaf's reference point; everything else falls back to
a singleton clique stabbed at its own reference point. Adjacency
between cliques comes from flower-boundary crossings plus stab-point
containment queries, each candidate confirmed by an exact member test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from . import buckets
from . import _fastpath
from .flowers import (FlowerSet, TWO_PI, build_flowers, contains_points,
                      _rho_disks_arr)
from .geom import DISK_TOL, triangles_intersect_pairs
from .grids import CENTERS, align_objects
from .instances import normalize
from .quadtree import FULL, build_skip_quadtree, assign_objects

_SCALE = float(np.ldexp(1.0, 52))

# stabbing-lattice cell sides; cell diameter is region side / 12 for
# disks and sin(alpha) * side / 24 for triangles
PITCH_DISK = 1.0 / (12.0 * math.sqrt(2.0))
PITCH_TRI = 1.0 / (24.0 * math.sqrt(2.0))

SCAN_ROWS = 8

KIND_OUTER = 0
KIND_HOLE = 1
KIND_LEAF = 2
KIND_SINGLE = 3

_CHUNK_Q = 1 << 15


@dataclass(frozen=True)
class StabbedClique:
    members: np.ndarray
    stab: Tuple[float, float]
    home_node: Tuple[int, int]


class CliqueSet:
    """Stabbed-clique partition: CSR members plus per-clique data."""

    def __init__(self, indptr, members, membership, grid, node, kind_code,
                 stab):
        self.indptr = indptr
        self.members = members
        self.membership = membership
        self.grid = grid
        self.node = node
        self.kind_code = kind_code
        self.stab = stab

    @property
    def n_cliques(self) -> int:
        return int(self.indptr.shape[0] - 1)

    @property
    def n_objects(self) -> int:
        return int(self.membership.shape[0])

    def members_of(self, cid: int) -> np.ndarray:
        return self.members[self.indptr[cid]:self.indptr[cid + 1]]

    def clique(self, cid: int) -> StabbedClique:
        return StabbedClique(self.members_of(cid),
                             (float(self.stab[cid, 0]),
                              float(self.stab[cid, 1])),
                             (int(self.grid[cid]), int(self.node[cid])))


def _scan_disks(ax, ay, h, cx, cy, r):
    """First stabbing-cell center inside each disk, row-major."""
    n = cx.shape[0]
    found = np.zeros(n, bool)
    oi = np.zeros(n, np.int64)
    oj = np.zeros(n, np.int64)
    j0 = np.ceil((cy - r - ay) / h - 0.5).astype(np.int64)
    for k in range(SCAN_ROWS):
        j = j0 + k
        yj = ay + (j + 0.5) * h
        dy = yj - cy
        todo = ~found & (np.abs(dy) <= r)
        if not todo.any():
            break
        w = np.sqrt(np.maximum(r * r - dy * dy, 0.0))
        i = np.ceil((cx - w - ax) / h - 0.5).astype(np.int64)
        xi = ax + (i + 0.5) * h
        hit = todo & ((xi - cx) ** 2 + dy * dy <= r * r)
        oi[hit] = i[hit]
        oj[hit] = j[hit]
        found |= hit
    return found, oi, oj


def _scan_tris(ax, ay, h, verts):
    """First stabbing-cell center inside each triangle, row-major."""
    n = verts.shape[0]
    found = np.zeros(n, bool)
    oi = np.zeros(n, np.int64)
    oj = np.zeros(n, np.int64)
    ylo = verts[:, :, 1].min(axis=1)
    j0 = np.ceil((ylo - ay) / h - 0.5).astype(np.int64)
    vx = verts[:, :, 0]
    vy = verts[:, :, 1]
    for k in range(SCAN_ROWS):
        j = j0 + k
        yj = ay + (j + 0.5) * h
        xlo = np.full(n, np.inf)
        xhi = np.full(n, -np.inf)
        for e in range(3):
            xa, ya = vx[:, e], vy[:, e]
            xb, yb = vx[:, (e + 1) % 3], vy[:, (e + 1) % 3]
            span = (np.minimum(ya, yb) <= yj) & (yj <= np.maximum(ya, yb)) \
                & (ya != yb)
            with np.errstate(invalid="ignore", divide="ignore"):
                t = (yj - ya) / (yb - ya)
                xc = xa + t * (xb - xa)
            xlo = np.where(span, np.minimum(xlo, xc), xlo)
            xhi = np.where(span, np.maximum(xhi, xc), xhi)
            horiz = (ya == yb) & (ya == yj)
            xlo = np.where(horiz, np.minimum(xlo, np.minimum(xa, xb)), xlo)
            xhi = np.where(horiz, np.maximum(xhi, np.maximum(xa, xb)), xhi)
        row = ~found & (xlo <= xhi)
        if not row.any():
            continue
        i0 = np.ceil((xlo - ax) / h - 0.5).astype(np.int64)
        for c in range(3):
            i = i0 + c
            xi = ax + (i + 0.5) * h
            cand = row & ~found & (xi <= xhi)
            if not cand.any():
                continue
            inside = cand.copy()
            for e in range(3):
                cross = (vx[:, (e + 1) % 3] - vx[:, e]) * (yj - vy[:, e]) \
                    - (vy[:, (e + 1) % 3] - vy[:, e]) * (xi - vx[:, e])
                inside &= cross >= 0.0
            oi[inside] = i[inside]
            oj[inside] = j[inside]
            found |= inside
    return found, oi, oj


def _node_anchor(tree, nodes, hole: bool):
    """Float lower corner and side of node cells (outer or hole)."""
    ox, oy = CENTERS[tree.grid_id]
    if hole:
        depth = tree.node_hdepth[nodes]
        u0 = tree.node_hu0[nodes]
        vb0 = tree.node_hvb0[nodes]
    else:
        depth = tree.node_depth[nodes]
        u0 = tree.node_u0[nodes]
        vb0 = tree.node_vb0[nodes]
    side_lat = np.int64(1) << (53 - depth)
    ax = ox + u0 / _SCALE
    ay = oy + (FULL - vb0 - side_lat) / _SCALE
    return ax, ay, side_lat / _SCALE


def build_cliques(inst):
    """Partition objects into stabbed cliques; one skip quadtree per grid.

    The instance must already sit inside the unit square (see
    instances.normalize; build_contraction arranges this). Returns
    (trees, cliques, diag); trees maps grid id to its SkipQuadtree.
    """
    n = inst.n
    bbox = inst.bboxes()
    ref = inst.ref_points()
    refx, refy = ref[:, 0], ref[:, 1]
    grid, _level, fallbacks = align_objects(bbox, inst.sizes())

    node_arr = np.zeros(n, np.int64)
    kind_arr = np.full(n, KIND_SINGLE, np.int8)
    keyj = np.zeros(n, np.int64)
    keyi = np.zeros(n, np.int64)
    stabx = refx.copy()
    staby = refy.copy()
    trees: Dict[int, object] = {}
    misses = 0
    demoted = 0

    pitch = PITCH_DISK if inst.kind == "disks" else \
        PITCH_TRI * math.sin(inst.alpha)

    for g in range(3):
        ids = np.nonzero(grid == g)[0]
        if ids.shape[0] == 0:
            continue
        tree = build_skip_quadtree(refx[ids], refy[ids], g)
        trees[g] = tree
        if inst.kind == "disks":
            nd, hole_fl = assign_objects(tree, "disks", bbox[ids],
                                         refx[ids], refy[ids],
                                         cx=inst.centers[ids, 0],
                                         cy=inst.centers[ids, 1],
                                         r=inst.radii[ids])
        else:
            nd, hole_fl = assign_objects(tree, "triangles", bbox[ids],
                                         refx[ids], refy[ids],
                                         verts=inst.verts[ids])
        node_arr[ids] = nd

        leaf = tree.node_point[nd] >= 0
        # leaf nodes: every assigned object's reference point is the
        # leaf's unique point, so that point stabs them all
        lids = ids[leaf]
        if lids.shape[0]:
            ox, oy = CENTERS[g]
            pt = tree.node_point[nd[leaf]]
            sx = ox + tree.pt_u[pt] / _SCALE
            sy = oy + tree.pt_v[pt] / _SCALE
            if inst.kind == "disks":
                okl = ((sx - inst.centers[lids, 0]) ** 2
                       + (sy - inst.centers[lids, 1]) ** 2
                       <= inst.radii[lids] ** 2)
            else:
                v = inst.verts[lids]
                okl = np.ones(lids.shape[0], bool)
                for e in range(3):
                    cross = ((v[:, (e + 1) % 3, 0] - v[:, e, 0])
                             * (sy - v[:, e, 1])
                             - (v[:, (e + 1) % 3, 1] - v[:, e, 1])
                             * (sx - v[:, e, 0]))
                    okl &= cross >= 0.0
            good = lids[okl]
            kind_arr[good] = KIND_LEAF
            stabx[good] = sx[okl]
            staby[good] = sy[okl]
            demoted += int((~okl).sum())

        cids = ids[~leaf]
        if cids.shape[0] == 0:
            continue
        ndc = nd[~leaf]
        hfl = hole_fl[~leaf]
        axo, ayo, so = _node_anchor(tree, ndc, hole=False)
        if hfl.any():
            axh, ayh, sh = _node_anchor(tree, ndc, hole=True)
            ax = np.where(hfl, axh, axo)
            ay = np.where(hfl, ayh, ayo)
            side = np.where(hfl, sh, so)
        else:
            ax, ay, side = axo, ayo, so
        h = side * pitch
        if inst.kind == "disks":
            found, fi, fj = _scan_disks(ax, ay, h,
                                        inst.centers[cids, 0],
                                        inst.centers[cids, 1],
                                        inst.radii[cids])
        else:
            found, fi, fj = _scan_tris(ax, ay, h, inst.verts[cids])
        hit = cids[found]
        kind_arr[hit] = np.where(hfl[found], KIND_HOLE, KIND_OUTER)
        keyi[hit] = fi[found]
        keyj[hit] = fj[found]
        stabx[hit] = (ax + (fi + 0.5) * h)[found]
        staby[hit] = (ay + (fj + 0.5) * h)[found]
        misses += int((~found).sum())

    # singletons key on their own object id to stay apart
    single = kind_arr == KIND_SINGLE
    keyj[single] = np.nonzero(single)[0]
    keyi[single] = 0
    node_arr[single & (grid < 0)] = -1

    order = np.lexsort((np.arange(n), keyi, keyj, kind_arr,
                        node_arr, grid))
    gs, ns, ks = grid[order], node_arr[order], kind_arr[order]
    js, is_ = keyj[order], keyi[order]
    new = np.empty(n, bool)
    new[0] = True
    new[1:] = ((gs[1:] != gs[:-1]) | (ns[1:] != ns[:-1])
               | (ks[1:] != ks[:-1]) | (js[1:] != js[:-1])
               | (is_[1:] != is_[:-1]))
    cid_sorted = np.cumsum(new) - 1
    nc = int(cid_sorted[-1]) + 1
    membership = np.empty(n, np.int64)
    membership[order] = cid_sorted
    starts = np.nonzero(new)[0]
    indptr = np.concatenate([starts, [n]]).astype(np.int64)
    first = order[starts]
    stab = np.stack([stabx[first], staby[first]], axis=1)
    cliques = CliqueSet(indptr, order.astype(np.int64), membership,
                        gs[starts].astype(np.int64), ns[starts],
                        ks[starts], stab)
    diag = {"align_fallbacks": int(fallbacks), "stab_misses": misses,
            "leaf_demotions": demoted, "cliques": nc}
    return trees, cliques, diag


def flowers_of(inst, cliques: CliqueSet) -> FlowerSet:
    if inst.kind == "disks":
        return build_flowers("disks", cliques.stab, cliques.indptr,
                             cliques.members, cx=inst.centers[:, 0],
                             cy=inst.centers[:, 1], r=inst.radii)
    return build_flowers("triangles", cliques.stab, cliques.indptr,
                         cliques.members, verts=inst.verts)


@dataclass(frozen=True)
class Flower:
    clique_id: int
    stab: Tuple[float, float]
    src: np.ndarray
    tstart: np.ndarray


def build_flower(fs: FlowerSet, cid: int) -> Flower:
    lo, hi = int(fs.indptr[cid]), int(fs.indptr[cid + 1])
    return Flower(cid, (float(fs.stab[cid, 0]), float(fs.stab[cid, 1])),
                  fs.src[lo:hi].copy(), fs.tstart[lo:hi].copy())


def _arc_arc_crossings(fs: FlowerSet, ia, ib):
    """Crossing-point count for disk boundary piece pairs."""
    cx, cy, r = fs.geom
    sa, sb = fs.src[ia], fs.src[ib]
    x1, y1, r1 = cx[sa], cy[sa], r[sa]
    x2, y2, r2 = cx[sb], cy[sb], r[sb]
    a0a, spana = fs.arc0[ia], np.where(fs.full[ia], TWO_PI,
                                       (fs.arc1[ia] - fs.arc0[ia]) % TWO_PI)
    a0b, spanb = fs.arc0[ib], np.where(fs.full[ib], TWO_PI,
                                       (fs.arc1[ib] - fs.arc0[ib]) % TWO_PI)
    count = np.zeros(ia.shape[0], np.int64)
    dx = x2 - x1
    dy = y2 - y1
    d2 = dx * dx + dy * dy
    scale = r1 + r2
    same = (np.abs(dx) <= 1e-14 * scale) & (np.abs(dy) <= 1e-14 * scale) \
        & (np.abs(r1 - r2) <= 1e-14 * scale)
    if same.any():
        ov = ((a0b - a0a) % TWO_PI <= spana + 1e-9) \
            | ((a0a - a0b) % TWO_PI <= spanb + 1e-9)
        count[same & ov] = 1
    d = np.sqrt(d2)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = (d2 + r1 * r1 - r2 * r2) / (2.0 * d)
        h2 = r1 * r1 - a * a
        h = np.sqrt(np.maximum(h2, 0.0))
        ux, uy = dx / d, dy / d
    proper = ~same & (d > 0) & (d < r1 + r2) & (d > np.abs(r1 - r2)) \
        & (h2 > 0)
    mx = x1 + a * ux
    my = y1 + a * uy
    for sx, sy in ((-uy, ux), (uy, -ux)):
        zx = mx + h * sx
        zy = my + h * sy
        f1 = np.arctan2(zy - y1, zx - x1)
        f2 = np.arctan2(zy - y2, zx - x2)
        on1 = fs.full[ia] | ((f1 - a0a) % TWO_PI <= spana + 1e-9)
        on2 = fs.full[ib] | ((f2 - a0b) % TWO_PI <= spanb + 1e-9)
        count += (proper & on1 & on2).astype(np.int64)
    return count


def _seg_seg_crossings(fs: FlowerSet, ia, ib):
    """Closed segment-intersection flags for triangle piece pairs."""
    A = fs.seg[ia]
    B = fs.seg[ib]

    def orient(px, py, qx, qy, rx, ry):
        return (qx - px) * (ry - py) - (qy - py) * (rx - px)

    d1 = orient(B[:, 0], B[:, 1], B[:, 2], B[:, 3], A[:, 0], A[:, 1])
    d2 = orient(B[:, 0], B[:, 1], B[:, 2], B[:, 3], A[:, 2], A[:, 3])
    d3 = orient(A[:, 0], A[:, 1], A[:, 2], A[:, 3], B[:, 0], B[:, 1])
    d4 = orient(A[:, 0], A[:, 1], A[:, 2], A[:, 3], B[:, 2], B[:, 3])
    # piece bboxes already overlap, so the collinear case is a hit
    return ((d1 * d2 <= 0) & (d3 * d4 <= 0)).astype(np.int64)


def _members_intersect(inst, a, b):
    if inst.kind == "disks":
        dx = inst.centers[a, 0] - inst.centers[b, 0]
        dy = inst.centers[a, 1] - inst.centers[b, 1]
        s = inst.radii[a] + inst.radii[b]
        return dx * dx + dy * dy <= s * s * (1.0 + DISK_TOL)
    return triangles_intersect_pairs(inst.verts[a], inst.verts[b])


def boundary_crossing_pairs(fs: FlowerSet, inst, piece_pairs=None):
    """Clique pairs whose flower boundaries cross, plus the crossing count.

    Every reported pair is confirmed by an exact member-pair
    intersection test; near-tangent detections that fail the piece-source
    confirmation fall back to a full member-pair rescue. piece_pairs
    overrides the candidate generator (a tuple of piece-index arrays);
    by default candidates come from a bounding-box join, run through the
    compiled kernels when available.
    """
    if piece_pairs is None and _fastpath.HAVE_NUMBA:
        if fs.kind == "disks":
            hits = _fastpath.disk_crossing_hits(fs, inst)
        else:
            hits = _fastpath.tri_crossing_hits(fs, inst)
        return _rescue_and_pack(fs, inst, *hits)
    if piece_pairs is None:
        ia, ib = buckets.self_join(fs.bbox)
    else:
        ia, ib = piece_pairs
    keep = fs.clique_of[ia] != fs.clique_of[ib]
    ia, ib = ia[keep], ib[keep]
    if fs.kind == "disks":
        count = _arc_arc_crossings(fs, ia, ib)
    else:
        count = _seg_seg_crossings(fs, ia, ib)
    hit = count > 0
    k = int(count[hit].sum())
    return _confirm_hits(fs, inst, ia[hit], ib[hit], k, int(ia.shape[0]))


def _confirm_hits(fs: FlowerSet, inst, ha, hb, k: int, n_cand: int):
    ok = _members_intersect(inst, fs.src[ha], fs.src[hb])
    pa = fs.clique_of[ha[ok]]
    pb = fs.clique_of[hb[ok]]
    rescued = 0
    if (~ok).any():
        # tangent-grade detections: try every member pair once
        fa = fs.clique_of[ha[~ok]]
        fb = fs.clique_of[hb[~ok]]
        fkey = np.unique(np.minimum(fa, fb) << np.int64(31)
                         | np.maximum(fa, fb))
        extra = []
        for key in fkey:
            ca, cb = int(key >> 31), int(key & ((1 << 31) - 1))
            if _cliques_touch(fs, inst, ca, cb):
                extra.append((ca, cb))
                rescued += 1
        if extra:
            ex = np.array(extra, np.int64)
            pa = np.concatenate([pa, ex[:, 0]])
            pb = np.concatenate([pb, ex[:, 1]])
    lo = np.minimum(pa, pb)
    hi = np.maximum(pa, pb)
    key = np.unique(lo << np.int64(31) | hi)
    pairs = np.stack([key >> np.int64(31), key & np.int64((1 << 31) - 1)],
                     axis=1)
    return pairs, k, {"piece_pairs": n_cand, "rescued": rescued}


def _rescue_and_pack(fs: FlowerSet, inst, ok_keys, fail_keys, k, n_cand):
    """Assemble the fused disk join's clique-pair keys into pairs."""
    rescued = 0
    parts = [ok_keys]
    for key in np.unique(fail_keys):
        ca, cb = int(key >> 31), int(key & ((1 << 31) - 1))
        if _cliques_touch(fs, inst, ca, cb):
            parts.append(np.array([key], np.int64))
            rescued += 1
    key = np.unique(np.concatenate(parts))
    pairs = np.stack([key >> np.int64(31), key & np.int64((1 << 31) - 1)],
                     axis=1)
    return pairs, k, {"piece_pairs": n_cand, "rescued": rescued}


def _cliques_touch(fs: FlowerSet, inst, ca: int, cb: int) -> bool:
    ma = np.unique(fs.src[fs.indptr[ca]:fs.indptr[ca + 1]])
    mb = np.unique(fs.src[fs.indptr[cb]:fs.indptr[cb + 1]])
    aa = np.repeat(ma, mb.shape[0])
    bb = np.tile(mb, ma.shape[0])
    return bool(_members_intersect(inst, aa, bb).any())


def _point_flower_pairs(fs: FlowerSet, trees, cliques: CliqueSet, px, py):
    """(query index, clique id) pairs with the point inside the flower.

    Candidates per grid: cliques homed at nodes on the query's search
    path or their refine children; a flower's members stay inside the
    home node's parent region, so any containing flower is found there.
    """
    if _fastpath.HAVE_NUMBA:
        return _fastpath.point_flower_pairs(fs, trees, cliques, px, py,
                                            _CHUNK_Q)
    nq = px.shape[0]
    out_q, out_c = [], []
    for g, tree in trees.items():
        cg = np.nonzero(cliques.grid == g)[0]
        if cg.shape[0] == 0:
            continue
        order = cg[np.argsort(cliques.node[cg], kind="stable")]
        nptr = np.zeros(tree.n_nodes + 1, np.int64)
        np.cumsum(np.bincount(cliques.node[order], minlength=tree.n_nodes),
                  out=nptr[1:])
        for s in range(0, nq, _CHUNK_Q):
            qs = np.arange(s, min(s + _CHUNK_Q, nq), dtype=np.int64)
            paths = tree.search_paths(px[qs], py[qs])
            qrep = np.tile(np.arange(qs.shape[0], dtype=np.int64),
                           paths.shape[0])
            nodes = paths.ravel()
            ccount = (tree.child_indptr[nodes + 1]
                      - tree.child_indptr[nodes]).astype(np.int64)
            coff = np.repeat(tree.child_indptr[nodes], ccount) \
                + _ragged(ccount)
            nodes = np.concatenate([nodes, tree.child_list[coff]])
            qrep = np.concatenate([qrep, np.repeat(qrep, ccount)])
            # attached cliques
            ccount = nptr[nodes + 1] - nptr[nodes]
            coff = np.repeat(nptr[nodes], ccount) + _ragged(ccount)
            cand_c = order[coff]
            cand_q = np.repeat(qrep, ccount)
            if cand_q.shape[0] == 0:
                continue
            key = np.unique(cand_q << np.int64(31) | cand_c)
            cand_q = (key >> np.int64(31))
            cand_c = key & np.int64((1 << 31) - 1)
            qx = px[qs[cand_q]]
            qy = py[qs[cand_q]]
            fb = fs.flower_bbox[cand_c]
            ok = (fb[:, 0] <= qx) & (qx <= fb[:, 2]) \
                & (fb[:, 1] <= qy) & (qy <= fb[:, 3])
            cand_q, cand_c = cand_q[ok], cand_c[ok]
            qx, qy = qx[ok], qy[ok]
            inside = contains_points(fs, cand_c, qx, qy)
            out_q.append(qs[cand_q[inside]])
            out_c.append(cand_c[inside])
    if not out_q:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(out_q), np.concatenate(out_c)


def _ragged(counts):
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64)
    starts = np.concatenate([[0], np.cumsum(counts[:-1])])
    return np.arange(total, dtype=np.int64) - np.repeat(starts, counts)


def containment_pairs(fs: FlowerSet, trees, cliques: CliqueSet):
    """Clique pairs (A, B) with stab(A) inside flower B, A != B."""
    q, c = _point_flower_pairs(fs, trees, cliques,
                               cliques.stab[:, 0], cliques.stab[:, 1])
    keep = q != c
    lo = np.minimum(q[keep], c[keep])
    hi = np.maximum(q[keep], c[keep])
    key = np.unique(lo << np.int64(31) | hi)
    return np.stack([key >> np.int64(31),
                     key & np.int64((1 << 31) - 1)], axis=1)


class ContractionGraph:
    def __init__(self, inst, trees, cliques: CliqueSet, flowers: FlowerSet,
                 adj_indptr, adj_list, diag):
        self.inst = inst
        self.trees = trees
        self.cliques = cliques
        self.flowers = flowers
        self.adj_indptr = adj_indptr
        self.adj_list = adj_list
        self.diag = diag

    @property
    def membership(self) -> np.ndarray:
        return self.cliques.membership

    @property
    def n_cliques(self) -> int:
        return self.cliques.n_cliques

    def neighbors(self, cid: int) -> np.ndarray:
        return self.adj_list[self.adj_indptr[cid]:self.adj_indptr[cid + 1]]

    def clique(self, cid: int) -> StabbedClique:
        return self.cliques.clique(cid)

    def flower(self, cid: int) -> Flower:
        return build_flower(self.flowers, cid)


def _adjacency(nc: int, pairs):
    if _fastpath.HAVE_NUMBA:
        return _fastpath.adjacency(nc, pairs)
    if pairs.shape[0] == 0:
        return np.zeros(nc + 1, np.int64), np.empty(0, np.int64)
    both = np.concatenate([pairs, pairs[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    indptr = np.zeros(nc + 1, np.int64)
    np.cumsum(np.bincount(both[:, 0], minlength=nc), out=indptr[1:])
    return indptr, both[:, 1].copy()


def build_contraction(inst) -> ContractionGraph:
    """The full clique-based contraction of an instance's graph.

    Rescales into the unit square first (intersection is invariant under
    similarity transforms); the returned graph carries the normalized
    instance, and all stab/boundary coordinates live in that frame.
    """
    inst, _ = normalize(inst)
    trees, cliques, diag = build_cliques(inst)
    fs = flowers_of(inst, cliques)
    cross_pairs, k, jdiag = boundary_crossing_pairs(fs, inst)
    cont_pairs = containment_pairs(fs, trees, cliques)
    allp = np.concatenate([cross_pairs, cont_pairs])
    if allp.shape[0]:
        key = np.unique(allp[:, 0] << np.int64(31) | allp[:, 1])
        allp = np.stack([key >> np.int64(31),
                         key & np.int64((1 << 31) - 1)], axis=1)
    indptr, adj = _adjacency(cliques.n_cliques, allp)
    diag.update(jdiag)
    diag.update({"crossings_k": k, "edges": int(allp.shape[0]),
                 "edges_crossing": int(cross_pairs.shape[0]),
                 "edges_containment": int(cont_pairs.shape[0]),
                 "pieces": fs.n_pieces,
                 "singles": int(np.sum(cliques.kind_code == KIND_SINGLE))})
    return ContractionGraph(inst, trees, cliques, fs, indptr, adj, diag)


def piece_start_points(fs: FlowerSet):
    """One boundary sample per piece (its starting angular endpoint)."""
    if fs.kind == "triangles":
        return fs.seg[:, 0].copy(), fs.seg[:, 1].copy()
    px = fs.stab[fs.clique_of, 0]
    py = fs.stab[fs.clique_of, 1]
    cx, cy, r = fs.geom
    rho = _rho_disks_arr(px, py, cx[fs.src], cy[fs.src], r[fs.src],
                         fs.tstart)
    return px + rho * np.cos(fs.tstart), py + rho * np.sin(fs.tstart)


def ply_of(graph: ContractionGraph) -> int:
    """Max flowers covering any stab point or boundary-piece endpoint."""
    fs = graph.flowers
    bx, by = piece_start_points(fs)
    px = np.concatenate([graph.cliques.stab[:, 0], bx])
    py = np.concatenate([graph.cliques.stab[:, 1], by])
    q, _ = _point_flower_pairs(fs, graph.trees, graph.cliques, px, py)
    if q.shape[0] == 0:
        return 0
    return int(np.bincount(q).max())
