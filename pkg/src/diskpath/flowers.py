"""Union boundaries of stabbed cliques, star-shaped about the stab point.

Every member of a clique contains the clique's stab point, so a member
boundary is a graph rho(theta) over ray angles and the union boundary is
the pointwise maximum. Pieces are maximal angular intervals attributed
to one member (for triangles, one member edge). Envelopes merge
pairwise: candidate switch angles come from exact circle-circle or
segment-segment intersections, and each refined interval is decided at
its midpoint, which is exact because refined intervals contain no
further crossings of the two active curves.
"""

from __future__ import annotations

import math
from bisect import bisect_right

import numpy as np

TWO_PI = 2.0 * math.pi

# piece-count ceilings per member; linear union complexity with slack
MAX_PIECES_DISK = 6
MAX_PIECES_TRI = 20

_RESCAN_BAND = 1e-9


def _norm_angle(a: float) -> float:
    a = (a + math.pi) % TWO_PI - math.pi
    return a if a >= -math.pi else a + TWO_PI


def _rho_disk(px, py, cx, cy, r, theta):
    ex = cx - px
    ey = cy - py
    b = ex * math.cos(theta) + ey * math.sin(theta)
    h2 = r * r - (ex * ex + ey * ey - b * b)
    return b + math.sqrt(h2) if h2 > 0.0 else b


def _rho_edge(px, py, ax, ay, bx, by, theta):
    """Ray-line hit parameter; -inf when the hit misses the edge span."""
    dx = math.cos(theta)
    dy = math.sin(theta)
    ex = bx - ax
    ey = by - ay
    den = dx * ey - dy * ex
    if den == 0.0:
        return -math.inf
    t = ((ax - px) * ey - (ay - py) * ex) / den
    s = ((ax - px) * dy - (ay - py) * dx) / den
    if s < -1e-9 or s > 1.0 + 1e-9:
        return -math.inf
    return t


def _circle_cross_angles(px, py, x1, y1, r1, x2, y2, r2):
    dx = x2 - x1
    dy = y2 - y1
    d2 = dx * dx + dy * dy
    if d2 <= 0.0:
        return ()
    d = math.sqrt(d2)
    if d >= r1 + r2 or d <= abs(r1 - r2):
        return ()
    a = (d2 + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if h2 <= 0.0:
        return ()
    h = math.sqrt(h2)
    ux = dx / d
    uy = dy / d
    mx = x1 + a * ux
    my = y1 + a * uy
    return (math.atan2(my + h * ux - py, mx - h * uy - px),
            math.atan2(my - h * ux - py, mx + h * uy - px))


def _seg_cross_angles(px, py, a, b):
    """Intersection of two segments as ray angles from (px, py)."""
    ax, ay, bx, by = a
    cx, cy, dx_, dy_ = b
    ex = bx - ax
    ey = by - ay
    fx = dx_ - cx
    fy = dy_ - cy
    den = ex * fy - ey * fx
    if den == 0.0:
        return ()
    s = ((cx - ax) * fy - (cy - ay) * fx) / den
    u = ((cx - ax) * ey - (cy - ay) * ex) / den
    if s < 0.0 or s > 1.0 or u < 0.0 or u > 1.0:
        return ()
    zx = ax + s * ex
    zy = ay + s * ey
    return (math.atan2(zy - py, zx - px),)


def _coalesce(pieces):
    """Sort, drop zero-length pieces, merge cyclically equal sources."""
    pieces = sorted(pieces)
    ded = []
    for t, s in pieces:
        if ded and t == ded[-1][0]:
            ded[-1] = (t, s)
        else:
            ded.append((t, s))
    if len({s for _, s in ded}) == 1:
        return [(-math.pi, ded[0][1])]
    n = len(ded)
    i0 = next(i for i in range(n) if ded[i][1] != ded[i - 1][1])
    rot = ded[i0:] + ded[:i0]
    merged = [rot[0]]
    for t, s in rot[1:]:
        if s != merged[-1][1]:
            merged.append((t, s))
    merged.sort()
    return merged


def _merge_envelopes(ea, eb, rho, cross_angles):
    """Upper envelope of two piece lists [(tstart, src), ...], cyclic."""
    ta = [t for t, _ in ea]
    tb = [t for t, _ in eb]
    bps = sorted({*ta, *tb})
    out = []
    K = len(bps)
    for k in range(K):
        lo = bps[k]
        hi = bps[k + 1] if k + 1 < K else bps[0] + TWO_PI
        if hi <= lo:
            continue
        mid = _norm_angle(lo + (hi - lo) / 2.0)
        sa = ea[bisect_right(ta, mid) - 1][1]
        sb = eb[bisect_right(tb, mid) - 1][1]
        cand = []
        for c in cross_angles(sa, sb):
            for cc in (c, c + TWO_PI):
                if lo < cc < hi:
                    cand.append(cc)
        subs = [lo] + sorted(cand)
        for idx, s in enumerate(subs):
            e = subs[idx + 1] if idx + 1 < len(subs) else hi
            m = _norm_angle(s + (e - s) / 2.0)
            w = sa if rho(sa, m) >= rho(sb, m) else sb
            out.append((_norm_angle(s), w))
    return _coalesce(out)


class FlowerSet:
    """Boundary pieces of every clique's flower, CSR by clique id.

    Pieces within a clique are in strictly increasing angular order;
    piece k spans [tstart[k], tstart[k+1]) with the last wrapping to the
    first. src holds the member object id a piece belongs to; for
    triangle flowers edge/seg pin down the exact sub-segment and for
    disk flowers arc0/arc1 give the source-circle angles of the arc.
    """

    def __init__(self, kind, stab, indptr, src, edge, tstart, seg,
                 arc0, arc1, full, bbox, clique_of, flower_bbox, geom):
        self.kind = kind
        self.stab = stab
        self.indptr = indptr
        self.src = src
        self.edge = edge
        self.tstart = tstart
        self.seg = seg
        self.arc0 = arc0
        self.arc1 = arc1
        self.full = full
        self.bbox = bbox
        self.clique_of = clique_of
        self.flower_bbox = flower_bbox
        self.geom = geom

    @property
    def n_cliques(self) -> int:
        return int(self.indptr.shape[0] - 1)

    @property
    def n_pieces(self) -> int:
        return int(self.src.shape[0])

    def pieces_of(self, cid: int):
        return np.arange(self.indptr[cid], self.indptr[cid + 1])


def _rho_disks_arr(px, py, cx, cy, r, theta):
    ex = cx - px
    ey = cy - py
    b = ex * np.cos(theta) + ey * np.sin(theta)
    h2 = r * r - (ex * ex + ey * ey - b * b)
    return b + np.sqrt(np.maximum(h2, 0.0))


_EDGE_OF_PAIR = np.array([-1, 0, 2, 1], dtype=np.int8)   # keyed by i+j


def _merge_disk_clique(px, py, mem, cx, cy, r):
    envs = [[(-math.pi, i)] for i in range(len(mem))]

    def rho(s, th):
        o = mem[s]
        return _rho_disk(px, py, cx[o], cy[o], r[o], th)

    def cross(sa, sb):
        oa, ob = mem[sa], mem[sb]
        return _circle_cross_angles(px, py, cx[oa], cy[oa], r[oa],
                                    cx[ob], cy[ob], r[ob])

    while len(envs) > 1:
        nxt = [_merge_envelopes(envs[i], envs[i + 1], rho, cross)
               for i in range(0, len(envs) - 1, 2)]
        if len(envs) % 2:
            nxt.append(envs[-1])
        envs = nxt
    return envs[0]


def _merge_tri_clique(px, py, mem, verts):
    # sources are (member slot, edge) pairs encoded as slot*3 + edge
    envs = []
    for slot, o in enumerate(mem):
        v = verts[o]
        ang = [math.atan2(v[k, 1] - py, v[k, 0] - px) for k in range(3)]
        order = sorted(range(3), key=lambda k: ang[k])
        env = []
        for q in range(3):
            i, j = order[q], order[(q + 1) % 3]
            env.append((ang[order[q]], slot * 3 + int(_EDGE_OF_PAIR[i + j])))
        env.sort()
        envs.append(env)

    def seg_of(s):
        v = verts[mem[s // 3]]
        e = s % 3
        return (v[e, 0], v[e, 1], v[(e + 1) % 3, 0], v[(e + 1) % 3, 1])

    def rho(s, th):
        return _rho_edge(px, py, *seg_of(s), th)

    def cross(sa, sb):
        return _seg_cross_angles(px, py, seg_of(sa), seg_of(sb))

    while len(envs) > 1:
        nxt = [_merge_envelopes(envs[i], envs[i + 1], rho, cross)
               for i in range(0, len(envs) - 1, 2)]
        if len(envs) % 2:
            nxt.append(envs[-1])
        envs = nxt
    return envs[0]


def _two_disk_pieces(px, py, o1, o2, cx, cy, r):
    """Vectorized envelope of two-member disk cliques.

    Returns (two, lo, hi, w_lo, w_hi, w_single): two-piece mask, the two
    breakpoints, winner slots (0/1) per interval, and the single winner.
    """
    x1, y1, r1 = cx[o1], cy[o1], r[o1]
    x2, y2, r2 = cx[o2], cy[o2], r[o2]
    dx = x2 - x1
    dy = y2 - y1
    d2 = dx * dx + dy * dy
    d = np.sqrt(d2)
    with np.errstate(invalid="ignore", divide="ignore"):
        a = (d2 + r1 * r1 - r2 * r2) / (2.0 * d)
        h2 = r1 * r1 - a * a
        h = np.sqrt(np.maximum(h2, 0.0))
        ux = np.where(d > 0, dx / d, 1.0)
        uy = np.where(d > 0, dy / d, 0.0)
    crossing = (d > 0) & (d < r1 + r2) & (d > np.abs(r1 - r2)) & (h2 > 0)
    mx = x1 + a * ux
    my = y1 + a * uy
    t1 = np.arctan2(my + h * ux - py, mx - h * uy - px)
    t2 = np.arctan2(my - h * ux - py, mx + h * uy - px)
    lo = np.minimum(t1, t2)
    hi = np.maximum(t1, t2)
    mid1 = (lo + hi) / 2.0
    mid2 = np.arctan2(np.sin(mid1 + math.pi), np.cos(mid1 + math.pi))
    rho1a = _rho_disks_arr(px, py, x1, y1, r1, mid1)
    rho2a = _rho_disks_arr(px, py, x2, y2, r2, mid1)
    rho1b = _rho_disks_arr(px, py, x1, y1, r1, mid2)
    rho2b = _rho_disks_arr(px, py, x2, y2, r2, mid2)
    w_lo = (rho2a > rho1a).astype(np.int8)
    w_hi = (rho2b > rho1b).astype(np.int8)
    two = crossing & (w_lo != w_hi) & (hi - lo > 1e-12) \
        & (lo + TWO_PI - hi > 1e-12)
    w_single = np.where(crossing, w_hi, (r2 > r1).astype(np.int8))
    return two, lo, hi, w_lo, w_hi, w_single


def build_flowers(kind, stab, indptr, members,
                  cx=None, cy=None, r=None, verts=None) -> FlowerSet:
    """Union boundary pieces for every clique; members CSR by clique."""
    nc = indptr.shape[0] - 1
    counts = np.diff(indptr)
    stab = np.asarray(stab, float)
    piece_lists = {}
    if kind == "disks":
        piece_counts = np.ones(nc, dtype=np.int64)
        m2 = np.nonzero(counts == 2)[0]
        if m2.shape[0]:
            o1 = members[indptr[m2]]
            o2 = members[indptr[m2] + 1]
            two, lo, hi, w_lo, w_hi, w_single = _two_disk_pieces(
                stab[m2, 0], stab[m2, 1], o1, o2, cx, cy, r)
            piece_counts[m2] = np.where(two, 2, 1)
        for c in np.nonzero(counts >= 3)[0]:
            mem = members[indptr[c]:indptr[c + 1]]
            env = _merge_disk_clique(stab[c, 0], stab[c, 1], mem, cx, cy, r)
            assert len(env) <= MAX_PIECES_DISK * len(mem), \
                "disk flower piece bound exceeded"
            piece_lists[int(c)] = [(t, int(mem[s])) for t, s in env]
            piece_counts[c] = len(env)
    else:
        piece_counts = np.full(nc, 3, dtype=np.int64)
        for c in np.nonzero(counts >= 2)[0]:
            mem = members[indptr[c]:indptr[c + 1]]
            env = _merge_tri_clique(stab[c, 0], stab[c, 1], mem, verts)
            assert len(env) <= MAX_PIECES_TRI * len(mem), \
                "triangle flower piece bound exceeded"
            piece_lists[int(c)] = [(t, int(mem[s // 3]) * 4 + s % 3)
                                   for t, s in env]
            piece_counts[c] = len(env)

    pptr = np.zeros(nc + 1, dtype=np.int64)
    np.cumsum(piece_counts, out=pptr[1:])
    P = int(pptr[-1])
    src = np.empty(P, dtype=np.int64)
    edge = np.full(P, -1, dtype=np.int8)
    tstart = np.empty(P, dtype=np.float64)
    clique_of = np.repeat(np.arange(nc, dtype=np.int64), piece_counts)

    if kind == "disks":
        simple = np.nonzero((counts == 1) & (piece_counts == 1))[0]
        src[pptr[simple]] = members[indptr[simple]]
        tstart[pptr[simple]] = -math.pi
        if m2.shape[0]:
            off = pptr[m2]
            one = ~two
            src[off[one]] = np.where(w_single[one] == 0, o1[one], o2[one])
            tstart[off[one]] = -math.pi
            t_idx = np.nonzero(two)[0]
            src[off[t_idx]] = np.where(w_lo[t_idx] == 0, o1[t_idx], o2[t_idx])
            tstart[off[t_idx]] = lo[t_idx]
            src[off[t_idx] + 1] = np.where(w_hi[t_idx] == 0,
                                           o1[t_idx], o2[t_idx])
            tstart[off[t_idx] + 1] = hi[t_idx]
        for c, plist in piece_lists.items():
            o = pptr[c]
            for k, (t, s) in enumerate(plist):
                tstart[o + k] = t
                src[o + k] = s
    else:
        m1 = np.nonzero(counts == 1)[0]
        if m1.shape[0]:
            o = members[indptr[m1]]
            v = verts[o]                               # (k, 3, 2)
            ang = np.arctan2(v[:, :, 1] - stab[m1, 1:2],
                             v[:, :, 0] - stab[m1, 0:1])
            order = np.argsort(ang, axis=1)
            sang = np.take_along_axis(ang, order, axis=1)
            nxt = np.roll(order, -1, axis=1)
            eidx = _EDGE_OF_PAIR[order + nxt]
            off = pptr[m1]
            for q in range(3):
                tstart[off + q] = sang[:, q]
                src[off + q] = o
                edge[off + q] = eidx[:, q]
        for c, plist in piece_lists.items():
            o = pptr[c]
            for k, (t, s) in enumerate(plist):
                tstart[o + k] = t
                src[o + k] = s // 4
                edge[o + k] = s % 4

    # geometry of each piece at its angular ends
    nxt_t = np.empty(P, dtype=np.float64)
    if P:
        nxt_t[:-1] = tstart[1:]
        nxt_t[pptr[1:] - 1] = tstart[pptr[:-1]] + TWO_PI
    full = np.zeros(P, dtype=bool)
    seg = None
    arc0 = arc1 = None
    if kind == "disks":
        full[pptr[:-1][piece_counts == 1]] = True
        px = stab[clique_of, 0]
        py = stab[clique_of, 1]
        scx, scy, sr = cx[src], cy[src], r[src]
        rho0 = _rho_disks_arr(px, py, scx, scy, sr, tstart)
        rho1 = _rho_disks_arr(px, py, scx, scy, sr, nxt_t)
        q0x = px + rho0 * np.cos(tstart)
        q0y = py + rho0 * np.sin(tstart)
        q1x = px + rho1 * np.cos(nxt_t)
        q1y = py + rho1 * np.sin(nxt_t)
        arc0 = np.arctan2(q0y - scy, q0x - scx)
        arc1 = np.arctan2(q1y - scy, q1x - scx)
        span = np.where(full, TWO_PI, (arc1 - arc0) % TWO_PI)
        bbox = np.empty((P, 4))
        bbox[:, 0] = np.minimum(q0x, q1x)
        bbox[:, 1] = np.minimum(q0y, q1y)
        bbox[:, 2] = np.maximum(q0x, q1x)
        bbox[:, 3] = np.maximum(q0y, q1y)
        cards = ((0.0, 2, 1.0), (math.pi / 2, 3, 1.0),
                 (math.pi, 0, -1.0), (-math.pi / 2, 1, -1.0))
        for ang, col, sgn in cards:
            hit = ((ang - arc0) % TWO_PI <= span) | full
            ext = (scx if col % 2 == 0 else scy) + sgn * sr
            if col >= 2:
                bbox[hit, col] = np.maximum(bbox[hit, col], ext[hit])
            else:
                bbox[hit, col] = np.minimum(bbox[hit, col], ext[hit])
    else:
        e0 = edge.astype(np.int64)
        e1 = (e0 + 1) % 3
        a = verts[src, e0]
        b = verts[src, e1]
        px = stab[clique_of, 0]
        py = stab[clique_of, 1]
        seg = np.empty((P, 4))
        seg[:, 0], seg[:, 1] = _ray_edge_point(px, py, a, b, tstart)
        seg[:, 2], seg[:, 3] = _ray_edge_point(px, py, a, b, nxt_t)
        bbox = np.empty((P, 4))
        bbox[:, 0] = np.minimum(seg[:, 0], seg[:, 2])
        bbox[:, 1] = np.minimum(seg[:, 1], seg[:, 3])
        bbox[:, 2] = np.maximum(seg[:, 0], seg[:, 2])
        bbox[:, 3] = np.maximum(seg[:, 1], seg[:, 3])

    # region bounds: the flower is the union of its members
    flower_bbox = np.empty((nc, 4))
    if kind == "disks":
        ob = np.stack([cx - r, cy - r, cx + r, cy + r], axis=1)
    else:
        ob = np.concatenate([verts.min(axis=1), verts.max(axis=1)], axis=1)
    mb = ob[members]
    for col in range(2):
        np.minimum.reduceat(mb[:, col], indptr[:-1], out=flower_bbox[:, col])
    for col in range(2, 4):
        np.maximum.reduceat(mb[:, col], indptr[:-1], out=flower_bbox[:, col])

    geom = (cx, cy, r) if kind == "disks" else (verts,)
    return FlowerSet(kind, stab, pptr, src, edge, tstart, seg, arc0, arc1,
                     full, bbox, clique_of, flower_bbox, geom)


def _ray_edge_point(px, py, a, b, theta):
    """Hit point of rays with edges, vectorized; clamped onto the edge."""
    dx = np.cos(theta)
    dy = np.sin(theta)
    ex = b[:, 0] - a[:, 0]
    ey = b[:, 1] - a[:, 1]
    den = dx * ey - dy * ex
    with np.errstate(invalid="ignore", divide="ignore"):
        s = ((a[:, 0] - px) * dy - (a[:, 1] - py) * dx) / den
    s = np.clip(np.where(np.isfinite(s), s, 0.0), 0.0, 1.0)
    return a[:, 0] + s * ex, a[:, 1] + s * ey


def locate_pieces(fs: FlowerSet, cids, theta):
    """Piece covering angle theta within each clique (global piece ids)."""
    nb = fs.tstart.shape[0]
    hh = np.concatenate([fs.clique_of, cids])
    ll = np.concatenate([fs.tstart, theta])
    tie = np.zeros(hh.shape[0], np.int8)
    tie[nb:] = 1
    order = np.lexsort((tie, ll, hh))
    isq = tie[order] == 1
    cum = np.cumsum(~isq)
    qpos = np.nonzero(isq)[0]
    out = np.empty(cids.shape[0], np.int64)
    out[order[qpos] - nb] = cum[qpos] - 1
    # an angle before the clique's first breakpoint wraps to its last piece
    wrap = out < fs.indptr[cids]
    out[wrap] = fs.indptr[cids[wrap] + 1] - 1
    return out


def rho_at(fs: FlowerSet, pids, theta):
    px = fs.stab[fs.clique_of[pids], 0]
    py = fs.stab[fs.clique_of[pids], 1]
    if fs.kind == "disks":
        cx, cy, r = fs.geom
        return _rho_disks_arr(px, py, cx[fs.src[pids]], cy[fs.src[pids]],
                              r[fs.src[pids]], theta)
    (verts,) = fs.geom
    e0 = fs.edge[pids].astype(np.int64)
    a = verts[fs.src[pids], e0]
    b = verts[fs.src[pids], (e0 + 1) % 3]
    qx, qy = _ray_edge_point(px, py, a, b, theta)
    return np.hypot(qx - px, qy - py)


def _inside_src(fs: FlowerSet, pids, qx, qy):
    """Exact closed containment of points in the piece source objects."""
    if fs.kind == "disks":
        cx, cy, r = fs.geom
        s = fs.src[pids]
        return ((qx - cx[s]) ** 2 + (qy - cy[s]) ** 2) <= r[s] * r[s]
    (verts,) = fs.geom
    v = verts[fs.src[pids]]
    inside = np.ones(pids.shape[0], bool)
    for e in range(3):
        ax, ay = v[:, e, 0], v[:, e, 1]
        bx, by = v[:, (e + 1) % 3, 0], v[:, (e + 1) % 3, 1]
        inside &= (bx - ax) * (qy - ay) - (by - ay) * (qx - ax) >= 0.0
    return inside


def contains_points(fs: FlowerSet, cids, qx, qy):
    """Exact point-in-flower for (clique, point) pairs.

    Tests the angular piece and both neighbors; candidates still inside
    the envelope radius after that (numeric winner flips) get a full
    member rescan.
    """
    if cids.shape[0] == 0:
        return np.zeros(0, bool)
    px = fs.stab[cids, 0]
    py = fs.stab[cids, 1]
    theta = np.arctan2(qy - py, qx - px)
    pid = locate_pieces(fs, cids, theta)
    inside = _inside_src(fs, pid, qx, qy)
    lo = fs.indptr[cids]
    hi = fs.indptr[cids + 1]
    width = hi - lo
    for shift in (1, -1):
        nb = lo + (pid - lo + shift) % width
        inside |= _inside_src(fs, nb, qx, qy)
    done = inside.copy()
    if not done.all():
        idx = np.nonzero(~done)[0]
        dist = np.hypot(qx[idx] - px[idx], qy[idx] - py[idx])
        reach = rho_at(fs, pid[idx], theta[idx])
        sus = dist <= reach * (1.0 + _RESCAN_BAND) + 1e-15
        for k in idx[sus]:
            inside[k] = _rescan_clique(fs, int(cids[k]),
                                       float(qx[k]), float(qy[k]))
    return inside


def _rescan_clique(fs: FlowerSet, cid: int, qx: float, qy: float) -> bool:
    pids = np.arange(fs.indptr[cid], fs.indptr[cid + 1])
    res = _inside_src(fs, pids, np.full(pids.shape[0], qx),
                      np.full(pids.shape[0], qy))
    return bool(res.any())
