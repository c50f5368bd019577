"""Exact query structures backing the fat-triangle intersection test.

Three independent structures, each validated against a linear scan:

* EmptinessIndex: stored points vs a fat query triangle. The query is
  partitioned into four semi-canonical pieces; each piece becomes, in
  the oblique coordinates of its two canonical edge directions, the
  region {s >= s0, t >= t0, a*s + b*t <= c} with a, b > 0. A dyadic
  tree over s, a nested dyadic blocking over t, and a lower-left hull
  per block answer the linear minimization; every reported point is
  confirmed with the exact containment predicate, and any near-miss
  inside the relaxation band falls back to a full scan, so answers are
  exact.
* StabbingIndex: red triangles vs point queries, via the stabbed-clique
  partition and the star-shaped union boundaries around each stab.
* ChordIndex: canonical segments vs canonical query segments. For a
  non-parallel direction pair the oblique basis (data direction, query
  direction) turns data into horizontal and queries into vertical
  segments; a segment tree over the data extents plus an offset-sorted
  list per parallel class generates candidates, and every candidate is
  confirmed with the exact segment predicate.
"""

from __future__ import annotations

import math

import numpy as np

from ..contraction import _point_flower_pairs, build_cliques, flowers_of
from ..geom import (DEFAULT_ALPHA, canonical_chords, direction_key,
                    min_angles, point_in_triangle, segments_intersect,
                    semi_canonical_parts)
from ..instances import Instance, normalize

_BAND = 1e-9
_MIN_HULL = 8


def _require_fat(verts, alpha):
    v = np.asarray(verts, dtype=float)
    if v.ndim == 2:
        v = v[None]
    bad = min_angles(v) < alpha - 1e-9
    if bad.any():
        raise ValueError("triangle %d is not alpha-fat for alpha=%r"
                         % (int(np.argmax(bad)), alpha))


def _lower_left_hull(s, t):
    """Vertices of the lower-left convex chain, as indices into s/t.

    Every minimizer of a*s + b*t with a, b > 0 over the point set lies
    on this chain.
    """
    order = np.lexsort((t, s))
    hull = []
    for i in order:
        if hull and t[i] >= t[hull[-1]]:
            continue        # dominated: something has both coords <=
        hull.append(i)
        # convexify: drop middle points on or above their neighbors' chord
        while len(hull) >= 3:
            i0, i1, i2 = hull[-3], hull[-2], hull[-1]
            cr = ((s[i1] - s[i0]) * (t[i2] - t[i0])
                  - (t[i1] - t[i0]) * (s[i2] - s[i0]))
            if cr <= 0:
                hull.pop(-2)
            else:
                break
    return np.array(hull, dtype=np.int64)


class _WedgeClass:
    """Points of one semi-canonical class in oblique coordinates."""

    def __init__(self, pts, d1, d2):
        u1 = (math.cos(d1), math.sin(d1))
        u2 = (math.cos(d2), math.sin(d2))
        det = u1[0] * u2[1] - u1[1] * u2[0]
        # p = s*u1 + t*u2
        self.inv = np.array([[u2[1] / det, -u2[0] / det],
                             [-u1[1] / det, u1[0] / det]])
        st = pts @ self.inv.T
        order = np.argsort(st[:, 0], kind="stable")
        self.s = st[order, 0]
        self.t = st[order, 1]
        self.pid = order.astype(np.int64)
        self.scale = float(np.abs(st).max()) if st.size else 1.0
        n = self.s.shape[0]
        self.size = 1
        while self.size < max(n, 1):
            self.size *= 2
        self._nodes = {}

    def point_coords(self, px, py):
        return self.inv @ (px, py)

    def _node(self, heap):
        # heap-numbered dyadic node over the s-sorted positions
        nd = self._nodes.get(heap)
        if nd is None:
            depth = heap.bit_length() - 1
            width = self.size >> depth
            a = (heap - (1 << depth)) * width
            b = min(a + width, self.s.shape[0])
            sub = np.argsort(self.t[a:b], kind="stable") + a
            nd = {"t": self.t[sub], "s": self.s[sub], "pid": self.pid[sub],
                  "hulls": {}}
            self._nodes[heap] = nd
        return nd

    def _block_hull(self, nd, heap2, size2):
        hulls = nd["hulls"]
        h = hulls.get(heap2)
        if h is None:
            depth = heap2.bit_length() - 1
            width = size2 >> depth
            a = (heap2 - (1 << depth)) * width
            b = min(a + width, nd["t"].shape[0])
            idx = _lower_left_hull(nd["s"][a:b], nd["t"][a:b]) + a
            h = (nd["s"][idx], nd["t"][idx], nd["pid"][idx])
            hulls[heap2] = h
        return h

    def _suffix_nodes(self, pos, n, size):
        # canonical dyadic cover of positions [pos, n)
        out = []
        l = pos + size
        r = n + size
        while l < r:
            if l & 1:
                out.append(l)
                l += 1
            if r & 1:
                r -= 1
                out.append(r)
            l >>= 1
            r >>= 1
        return out

    def candidates(self, s0, t0, a, b, c):
        """(pid, fail_band) minimizing a*s + b*t inside the banded wedge."""
        n = self.s.shape[0]
        if n == 0:
            return [], False
        band = _BAND * max(self.scale, 1.0)
        cband = band * (abs(a) + abs(b) + 1.0)
        out = []
        near = False
        pos = int(np.searchsorted(self.s, s0 - band, side="left"))
        for heap in self._suffix_nodes(pos, n, self.size):
            nd = self._node(heap)
            m = nd["t"].shape[0]
            q0 = int(np.searchsorted(nd["t"], t0 - band, side="left"))
            if q0 >= m:
                continue
            size2 = 1
            while size2 < m:
                size2 *= 2
            for h2 in self._suffix_nodes(q0, m, size2):
                depth = h2.bit_length() - 1
                width = size2 >> depth
                lo = (h2 - (1 << depth)) * width
                hi = min(lo + width, m)
                if hi - lo <= _MIN_HULL:
                    f = a * nd["s"][lo:hi] + b * nd["t"][lo:hi]
                    k = int(np.argmin(f))
                    fmin = float(f[k])
                    pid = int(nd["pid"][lo + k])
                else:
                    hs, ht, hp = self._block_hull(nd, h2, size2)
                    f = a * hs + b * ht
                    k = int(np.argmin(f))
                    fmin = float(f[k])
                    pid = int(hp[k])
                if fmin <= c + cband:
                    out.append(pid)
                    near = True
        return out, near


class EmptinessIndex:
    """Find a stored point inside a fat query triangle, exactly."""

    def __init__(self, pts, alpha: float = DEFAULT_ALPHA):
        self.pts = np.ascontiguousarray(np.asarray(pts, float).reshape(-1, 2))
        self.alpha = float(alpha)
        self._classes = {}

    def _class(self, d1, d2):
        k1 = direction_key(d1, self.alpha)
        k2 = direction_key(d2, self.alpha)
        if k2 < k1:
            k1, k2, d1, d2 = k2, k1, d2, d1
        key = (k1, k2)
        cl = self._classes.get(key)
        if cl is None:
            cl = _WedgeClass(self.pts, d1, d2)
            self._classes[key] = cl
        return cl

    def query(self, verts):
        """Index of some stored point inside the triangle, or -1."""
        v = np.asarray(verts, dtype=float)
        if self.pts.shape[0] == 0:
            return -1
        best = -1
        near = False
        for tri, apex, d1, d2, base in semi_canonical_parts(v, self.alpha):
            cl = self._class(d1, d2)
            s0, t0 = cl.point_coords(apex[0], apex[1])
            # base halfplane a*s + b*t <= c holding the apex, a, b > 0
            sb1, tb1 = cl.point_coords(base[0, 0], base[0, 1])
            sb2, tb2 = cl.point_coords(base[1, 0], base[1, 1])
            if abs(sb1 - s0) >= abs(sb2 - s0):
                s1, t2 = sb1, tb2
            else:
                s1, t2 = sb2, tb1
            a = 1.0 / max(s1 - s0, 1e-300)
            b = 1.0 / max(t2 - t0, 1e-300)
            c = a * s0 + b * t0 + 1.0
            cand, nr = cl.candidates(s0, t0, a, b, c)
            near = near or nr
            for pid in cand:
                if point_in_triangle(v, self.pts[pid, 0], self.pts[pid, 1]):
                    if best < 0 or pid < best:
                        best = pid
        if best >= 0:
            return best
        if near:
            inside = point_in_triangle(v, self.pts[:, 0], self.pts[:, 1])
            hits = np.nonzero(inside)[0]
            if hits.shape[0]:
                return int(hits[0])
        return -1


class StabbingIndex:
    """Find a red triangle containing a query point, exactly."""

    def __init__(self, verts, alpha: float = DEFAULT_ALPHA):
        verts = np.asarray(verts, dtype=float)
        _require_fat(verts, alpha)
        self.n = verts.shape[0]
        inst = Instance("triangles", verts=verts, alpha=alpha)
        self._inst, (sc, tx, ty) = normalize(inst)
        self._map = (sc, tx, ty)
        self._trees, self._cliques, _ = build_cliques(self._inst)
        self._fs = flowers_of(self._inst, self._cliques)

    def query_many(self, qx, qy):
        """Lowest red id containing each point, -1 when none."""
        sc, tx, ty = self._map
        qx = np.asarray(qx, dtype=float) * sc + tx
        qy = np.asarray(qy, dtype=float) * sc + ty
        out = np.full(qx.shape[0], -1, np.int64)
        qi, cid = _point_flower_pairs(self._fs, self._trees, self._cliques,
                                      qx, qy)
        iv = self._inst.verts
        ptr = self._cliques.indptr
        mem = self._cliques.members
        for q, c in zip(qi.tolist(), cid.tolist()):
            for m in mem[ptr[c]:ptr[c + 1]].tolist():
                if out[q] >= 0 and m >= out[q]:
                    continue
                if point_in_triangle(iv[m], qx[q], qy[q]):
                    out[q] = m
        return out

    def query(self, x, y):
        return int(self.query_many(np.array([x]), np.array([y]))[0])


class _ObliqueSegTree:
    """Data chords horizontal, queries vertical, in an oblique basis."""

    def __init__(self, segs, owners, d_dir, q_dir):
        ud = (math.cos(d_dir), math.sin(d_dir))
        uq = (math.cos(q_dir), math.sin(q_dir))
        det = ud[0] * uq[1] - ud[1] * uq[0]
        self.inv = np.array([[uq[1] / det, -uq[0] / det],
                             [-ud[1] / det, ud[0] / det]])
        self.segs = segs
        self.owners = owners
        p1 = segs[:, 0] @ self.inv.T
        p2 = segs[:, 1] @ self.inv.T
        self.alo = np.minimum(p1[:, 0], p2[:, 0])
        self.ahi = np.maximum(p1[:, 0], p2[:, 0])
        self.b = 0.5 * (p1[:, 1] + p2[:, 1])
        self.scale = float(max(np.abs(p1).max(), np.abs(p2).max(), 1.0)) \
            if segs.shape[0] else 1.0
        band = _BAND * self.scale
        self.band = band
        self.tiny = np.nonzero(self.ahi - self.alo < 2.0 * band)[0]
        # closed-interval stabbing: leaves alternate endpoint values and
        # the open gaps between them
        self.E = np.unique(np.concatenate([self.alo, self.ahi]))
        k = self.E.shape[0]
        nl = max(2 * k - 1, 1)
        self.size = 1
        while self.size < nl:
            self.size *= 2
        self.nleaf = nl
        self._members = {}
        lo_leaf = 2 * np.searchsorted(self.E, self.alo)
        hi_leaf = 2 * np.searchsorted(self.E, self.ahi)
        for i in range(segs.shape[0]):
            self._insert(1, 0, self.size, int(lo_leaf[i]), int(hi_leaf[i]), i)
        for h, lst in self._members.items():
            arr = np.array(lst, np.int64)
            order = np.argsort(self.b[arr], kind="stable")
            self._members[h] = (self.b[arr[order]], arr[order])

    def _insert(self, heap, lo, hi, ql, qh, idx):
        if ql <= lo and hi - 1 <= qh:
            self._members.setdefault(heap, []).append(idx)
            return
        mid = (lo + hi) // 2
        if ql < mid:
            self._insert(2 * heap, lo, mid, ql, qh, idx)
        if qh >= mid:
            self._insert(2 * heap + 1, mid, hi, ql, qh, idx)

    def _leaf_of(self, a):
        j = int(np.searchsorted(self.E, a))
        if j < self.E.shape[0] and self.E[j] == a:
            return 2 * j
        return 2 * j - 1

    def candidates(self, qseg):
        p1 = self.inv @ qseg[0]
        p2 = self.inv @ qseg[1]
        aq = 0.5 * (p1[0] + p2[0])
        b1 = min(p1[1], p2[1]) - self.band
        b2 = max(p1[1], p2[1]) + self.band
        out = set(self.tiny.tolist())
        for a in (aq - self.band, aq + self.band):
            leaf = self._leaf_of(a)
            if leaf < 0 or leaf >= self.nleaf:
                continue
            heap = leaf + self.size
            while heap >= 1:
                nd = self._members.get(heap)
                if nd is not None:
                    bs, idxs = nd
                    i0 = int(np.searchsorted(bs, b1, side="left"))
                    i1 = int(np.searchsorted(bs, b2, side="right"))
                    out.update(idxs[i0:i1].tolist())
                heap >>= 1
        return out


class ChordIndex:
    """Find a stored canonical chord crossing a canonical query segment."""

    def __init__(self, segs, owners, alpha: float = DEFAULT_ALPHA,
                 dirs=None):
        self.segs = np.ascontiguousarray(np.asarray(segs, float))
        self.owners = np.ascontiguousarray(np.asarray(owners, np.int64))
        self.alpha = float(alpha)
        self._by_dir = {}
        for i in range(self.segs.shape[0]):
            if dirs is not None:
                # caller-supplied direction, exact by construction
                th = float(dirs[i]) % (2.0 * math.pi)
            else:
                d = self.segs[i, 1] - self.segs[i, 0]
                th = math.atan2(d[1], d[0]) % (2.0 * math.pi)
            key = direction_key(th, self.alpha)
            # snapped direction: keeps parallel detection exact
            self._by_dir.setdefault(key, ([], key * self.alpha / 2.0))[0] \
                .append(i)
        self._oblique = {}
        self._parallel = {}

    def _klass(self, qkey, q_dir, dkey):
        idxs, d_dir = self._by_dir[dkey]
        if abs(math.sin(q_dir - d_dir)) <= 1e-12:
            st = self._parallel.get(dkey)
            if st is None:
                sub = np.array(idxs, np.int64)
                ud = np.array([math.cos(d_dir), math.sin(d_dir)])
                mid = self.segs[sub].mean(axis=1)
                off = ud[0] * mid[:, 1] - ud[1] * mid[:, 0]
                order = np.argsort(off, kind="stable")
                st = (off[order], sub[order])
                self._parallel[dkey] = st
            return ("parallel", st)
        key = (qkey, dkey)
        tree = self._oblique.get(key)
        if tree is None:
            sub = np.array(idxs, np.int64)
            tree = _ObliqueSegTree(self.segs[sub], self.owners[sub],
                                   d_dir, q_dir)
            tree.sub = sub
            self._oblique[key] = tree
        return ("oblique", tree)

    def query(self, seg, qdir=None):
        """Lowest owner id of a stored chord intersecting seg, or -1."""
        seg = np.asarray(seg, dtype=float)
        if qdir is None:
            d = seg[1] - seg[0]
            qdir = math.atan2(d[1], d[0]) % (2.0 * math.pi)
        qkey = direction_key(qdir, self.alpha)
        qdir = qkey * self.alpha / 2.0
        best = -1
        for dkey in self._by_dir:
            mode, st = self._klass(qkey, qdir, dkey)
            if mode == "parallel":
                offs, sub = st
                ud_x, ud_y = math.cos(self._by_dir[dkey][1]), \
                    math.sin(self._by_dir[dkey][1])
                mid = 0.5 * (seg[0] + seg[1])
                oq = ud_x * mid[1] - ud_y * mid[0]
                scale = float(np.abs(offs).max()) if offs.shape[0] else 1.0
                band = _BAND * max(scale, 1.0)
                i0 = int(np.searchsorted(offs, oq - band, side="left"))
                i1 = int(np.searchsorted(offs, oq + band, side="right"))
                cand = sub[i0:i1]
            else:
                cand = st.sub[sorted(st.candidates(seg))]
            for i in np.asarray(cand, np.int64):
                own = int(self.owners[i])
                if best >= 0 and own >= best:
                    continue
                s2 = self.segs[i]
                if segments_intersect(seg[0, 0], seg[0, 1], seg[1, 0],
                                      seg[1, 1], s2[0, 0], s2[0, 1],
                                      s2[1, 0], s2[1, 1]):
                    best = own
        return best
