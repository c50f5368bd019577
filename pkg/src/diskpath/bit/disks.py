"""Disk-vs-disk intersection reporting over a tree of red centers.

The red centers are sorted in Morton order and grouped into a compressed
quadtree with bucketed leaves. Every node keeps the tight bounding box of
its member centers, the largest member radius, and the smallest member
id. A blue query walks the tree best-lowest-id first, pruning nodes
whose box cannot contain a center within blue_radius + max_radius, so
the returned witness is the lowest red id whose disk intersects the
blue one. The same tree answers additively weighted nearest-neighbor
queries (min over reds of |q - c| - r) with an admissible bound
dist(q, box) - max_radius.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

from .._kernels import _lca_depth, _lower_bound, njit
from ..geom import DISK_TOL
from ..grids import to_lattice
from ..quadtree import morton_keys

BUCKET = 16


@njit(cache=True)
def _build_tree(khi, klo, sx, sy, sr, sid, cap):
    n = khi.shape[0]
    maxn = 2 * n + 2
    lo = np.empty(maxn, np.int64)
    hi = np.empty(maxn, np.int64)
    nch = np.zeros(maxn, np.int64)
    ch = np.full((maxn, 4), -1, np.int64)
    x0 = np.empty(maxn)
    x1 = np.empty(maxn)
    y0 = np.empty(maxn)
    y1 = np.empty(maxn)
    mr = np.empty(maxn)
    mid = np.empty(maxn, np.int64)

    stack = np.empty((256, 4), np.int64)
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = -1
    stack[0, 3] = 0
    top = 1
    m = 0
    while top > 0:
        top -= 1
        l = stack[top, 0]
        r = stack[top, 1]
        par = stack[top, 2]
        slot = stack[top, 3]
        nid = m
        m += 1
        lo[nid] = l
        hi[nid] = r
        if par >= 0:
            ch[par, slot] = nid
        d = _lca_depth(khi[l], klo[l], khi[r - 1], klo[r - 1])
        if r - l <= cap or d >= 53:
            continue
        s = l
        cnt = 0
        for q in range(1, 4):
            e = _lower_bound(khi, klo, s, r, d, q)
            if e > s:
                stack[top, 0] = s
                stack[top, 1] = e
                stack[top, 2] = nid
                stack[top, 3] = cnt
                top += 1
                cnt += 1
            s = e
        if r > s:
            stack[top, 0] = s
            stack[top, 1] = r
            stack[top, 2] = nid
            stack[top, 3] = cnt
            top += 1
            cnt += 1
        nch[nid] = cnt

    for nid in range(m - 1, -1, -1):
        if nch[nid] == 0:
            a = lo[nid]
            b = hi[nid]
            vx0 = sx[a]
            vx1 = sx[a]
            vy0 = sy[a]
            vy1 = sy[a]
            vr = sr[a]
            vi = sid[a]
            for j in range(a + 1, b):
                if sx[j] < vx0:
                    vx0 = sx[j]
                if sx[j] > vx1:
                    vx1 = sx[j]
                if sy[j] < vy0:
                    vy0 = sy[j]
                if sy[j] > vy1:
                    vy1 = sy[j]
                if sr[j] > vr:
                    vr = sr[j]
                if sid[j] < vi:
                    vi = sid[j]
        else:
            c0 = ch[nid, 0]
            vx0 = x0[c0]
            vx1 = x1[c0]
            vy0 = y0[c0]
            vy1 = y1[c0]
            vr = mr[c0]
            vi = mid[c0]
            for k in range(1, nch[nid]):
                c = ch[nid, k]
                if x0[c] < vx0:
                    vx0 = x0[c]
                if x1[c] > vx1:
                    vx1 = x1[c]
                if y0[c] < vy0:
                    vy0 = y0[c]
                if y1[c] > vy1:
                    vy1 = y1[c]
                if mr[c] > vr:
                    vr = mr[c]
                if mid[c] < vi:
                    vi = mid[c]
        x0[nid] = vx0
        x1[nid] = vx1
        y0[nid] = vy0
        y1[nid] = vy1
        mr[nid] = vr
        mid[nid] = vi

    return (lo[:m].copy(), hi[:m].copy(), nch[:m].copy(), ch[:m].copy(),
            x0[:m].copy(), x1[:m].copy(), y0[:m].copy(), y1[:m].copy(),
            mr[:m].copy(), mid[:m].copy())


@njit(cache=True)
def _query_tree(lo, hi, nch, ch, x0, x1, y0, y1, mr, mid,
                sx, sy, sr, sid, bx, by, br):
    nb = bx.shape[0]
    nr = sx.shape[0]
    out = np.full(nb, -1, np.int64)
    stack = np.empty(256, np.int64)
    tmp = np.empty(4, np.int64)
    for i in range(nb):
        cx = bx[i]
        cy = by[i]
        rad = br[i]
        best = nr
        stack[0] = 0
        top = 1
        while top > 0:
            top -= 1
            nid = stack[top]
            if mid[nid] >= best:
                continue
            dx = 0.0
            if cx < x0[nid]:
                dx = x0[nid] - cx
            elif cx > x1[nid]:
                dx = cx - x1[nid]
            dy = 0.0
            if cy < y0[nid]:
                dy = y0[nid] - cy
            elif cy > y1[nid]:
                dy = cy - y1[nid]
            s = rad + mr[nid]
            if dx * dx + dy * dy > s * s * (1.0 + DISK_TOL):
                continue
            if nch[nid] == 0:
                for j in range(lo[nid], hi[nid]):
                    if sid[j] < best:
                        ddx = cx - sx[j]
                        ddy = cy - sy[j]
                        ss = rad + sr[j]
                        if ddx * ddx + ddy * ddy <= ss * ss * (1.0 + DISK_TOL):
                            best = sid[j]
            else:
                k = nch[nid]
                for q in range(k):
                    tmp[q] = ch[nid, q]
                # push largest minid first so the lowest pops first
                for a in range(k):
                    pick = a
                    for b in range(a + 1, k):
                        if mid[tmp[b]] > mid[tmp[pick]]:
                            pick = b
                    t = tmp[a]
                    tmp[a] = tmp[pick]
                    tmp[pick] = t
                    stack[top] = tmp[a]
                    top += 1
        if best < nr:
            out[i] = best
    return out


class DiskIndex:
    """Immutable index over red disks; lowest-id witnesses and AW-nearest."""

    def __init__(self, rx, ry, rr):
        rx = np.ascontiguousarray(rx, dtype=float)
        ry = np.ascontiguousarray(ry, dtype=float)
        rr = np.ascontiguousarray(rr, dtype=float)
        self.n = rx.shape[0]
        if self.n == 0:
            return
        # Morton order needs coordinates inside the unit square; the
        # rescale only fixes the sort order, queries use raw coordinates
        ox = float(rx.min())
        oy = float(ry.min())
        span = max(float(rx.max()) - ox, float(ry.max()) - oy, 1e-300)
        u, v = to_lattice(0.05 + 0.9 * (rx - ox) / span,
                         0.05 + 0.9 * (ry - oy) / span, 0)
        khi, klo = morton_keys(u, v)
        order = np.lexsort((klo, khi))
        self._sx = rx[order]
        self._sy = ry[order]
        self._sr = rr[order]
        self._sid = order.astype(np.int64)
        self._nodes = _build_tree(khi[order], klo[order], self._sx, self._sy,
                                  self._sr, self._sid, BUCKET)

    def query(self, bx, by, br):
        """Lowest red id intersecting each blue disk, -1 when none."""
        bx = np.ascontiguousarray(bx, dtype=float)
        by = np.ascontiguousarray(by, dtype=float)
        br = np.ascontiguousarray(br, dtype=float)
        if self.n == 0 or bx.shape[0] == 0:
            return np.full(bx.shape[0], -1, np.int64)
        return _query_tree(*self._nodes, self._sx, self._sy, self._sr,
                           self._sid, bx, by, br)

    def nearest(self, qx, qy):
        """(red id, additively weighted distance, nodes expanded).

        Minimizes |q - c| - r over the red disks; exact by admissibility
        of the bound dist(q, node box) - max_radius(node).
        """
        if self.n == 0:
            return -1, math.inf, 0
        lo, hi, nch, ch, x0, x1, y0, y1, mr, _mid = self._nodes

        def bound(nid):
            dx = max(x0[nid] - qx, qx - x1[nid], 0.0)
            dy = max(y0[nid] - qy, qy - y1[nid], 0.0)
            return math.hypot(dx, dy) - mr[nid]

        best_d = math.inf
        best_i = -1
        pops = 0
        heap = [(bound(0), 0)]
        while heap:
            b, nid = heapq.heappop(heap)
            if b > best_d:
                break
            pops += 1
            if nch[nid] == 0:
                for j in range(lo[nid], hi[nid]):
                    d = math.hypot(qx - self._sx[j],
                                   qy - self._sy[j]) - self._sr[j]
                    if d < best_d or (d == best_d and self._sid[j] < best_i):
                        best_d = d
                        best_i = int(self._sid[j])
            else:
                for k in range(nch[nid]):
                    c = int(ch[nid, k])
                    heapq.heappush(heap, (bound(c), c))
        return best_i, best_d, pops


def bit_disks(bx, by, br, rx, ry, rr):
    """Witness array: lowest red disk id intersecting each blue, else -1."""
    return DiskIndex(rx, ry, rr).query(bx, by, br)


def aw_nearest(qx, qy, rx, ry, rr):
    """Red id minimizing |q - c| - r, with the achieved value."""
    idx, d, _ = DiskIndex(rx, ry, rr).nearest(float(qx), float(qy))
    return idx, d
