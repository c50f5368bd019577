"""Compiled inner loops for the contraction build and the BFS.

Each kernel reproduces the exact arithmetic of the vectorized routine it
replaces (same formulas, same tolerances), so either route gives the same
output; the vectorized routes stay in place both as the no-numba fallback
and as the reference side in tests.

The join kernels never materialize candidate pairs: a pair of boxes is
processed only in the grid cell that contains the lower-left corner of
their bbox intersection. Both boxes register that cell, so every
overlapping pair is seen exactly once and no dedup pass is needed.
"""

from __future__ import annotations

import math

import numpy as np

from ._kernels import HAVE_NUMBA, njit
from .geom import DISK_TOL, ORIENT_TOL, TWO_PI

_RESCAN_BAND = 1e-9     # must match flowers._RESCAN_BAND
_KEY31 = np.int64((1 << 31) - 1)


# --------------------------------------------------------------------
# piece-pair enumeration (mirrors buckets' level/cell scheme)


@njit(cache=True, inline="always")
def _find_group(uci, ucj, ci, cj):
    """Index of cell (ci, cj) in the lexsorted group arrays, or -1."""
    lo = 0
    hi = uci.shape[0]
    while lo < hi:
        mid = (lo + hi) >> 1
        if uci[mid] < ci or (uci[mid] == ci and ucj[mid] < cj):
            lo = mid + 1
        else:
            hi = mid
    if lo < uci.shape[0] and uci[lo] == ci and ucj[lo] == cj:
        return lo
    return -1


@njit(cache=True, inline="always")
def _pair_admit(i, j, ci, cj, inv, bx0, by0, bx1, by1, cliq):
    """Overlapping cross-clique pair, charged to its canonical cell.

    Callers guarantee x-overlap already (sorted sweep), so only the y
    test, the clique filter, and the canonical-cell charge remain.
    """
    if by0[i] > by1[j] or by0[j] > by1[i]:
        return False
    if cliq[i] == cliq[j]:
        return False
    px = bx0[i] if bx0[i] > bx0[j] else bx0[j]
    py = by0[i] if by0[i] > by0[j] else by0[j]
    if int(math.floor(px * inv)) != ci or int(math.floor(py * inv)) != cj:
        return False
    return True


@njit(cache=True, inline="always")
def _window_start(rids, lo, hi, bx0, bound):
    """First slot in the x-sorted group slice with bx0 >= bound."""
    while lo < hi:
        mid = (lo + hi) >> 1
        if bx0[rids[mid]] < bound:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, inline="always")
def _arc_pair_count(i, j, scx, scy, sr, a0, span, full):
    """Crossing-point count for two disk boundary pieces."""
    x1 = scx[i]
    y1 = scy[i]
    r1 = sr[i]
    x2 = scx[j]
    y2 = scy[j]
    r2 = sr[j]
    dx = x2 - x1
    dy = y2 - y1
    d2 = dx * dx + dy * dy
    scale = r1 + r2
    tol = 1e-14 * scale
    if abs(dx) <= tol and abs(dy) <= tol and abs(r1 - r2) <= tol:
        if ((a0[j] - a0[i]) % TWO_PI <= span[i] + 1e-9
                or (a0[i] - a0[j]) % TWO_PI <= span[j] + 1e-9):
            return 1
        return 0
    if d2 <= 0.0:
        return 0
    d = math.sqrt(d2)
    if not (d < r1 + r2 and d > abs(r1 - r2)):
        return 0
    a = (d2 + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if not h2 > 0.0:
        return 0
    h = math.sqrt(h2)
    ux = dx / d
    uy = dy / d
    mx = x1 + a * ux
    my = y1 + a * uy
    count = 0
    for s in range(2):
        if s == 0:
            zx = mx - h * uy
            zy = my + h * ux
        else:
            zx = mx + h * uy
            zy = my - h * ux
        f1 = math.atan2(zy - y1, zx - x1)
        f2 = math.atan2(zy - y2, zx - x2)
        on1 = full[i] != 0 or (f1 - a0[i]) % TWO_PI <= span[i] + 1e-9
        on2 = full[j] != 0 or (f2 - a0[j]) % TWO_PI <= span[j] + 1e-9
        if on1 and on2:
            count += 1
    return count


@njit(cache=True, inline="always")
def _osign(ax, ay, bx, by, cx, cy):
    """Orientation sign with the relative slack band."""
    t1 = (bx - ax) * (cy - ay)
    t2 = (by - ay) * (cx - ax)
    c = t1 - t2
    slack = ORIENT_TOL * (abs(t1) + abs(t2))
    if c > slack:
        return 1
    if c < -slack:
        return -1
    return 0


@njit(cache=True, inline="always")
def _pt_in_tri(V, t, px, py):
    """Closed membership with the orientation slack, CCW triangle t."""
    for i in range(3):
        ax = V[t, i, 0]
        ay = V[t, i, 1]
        f = i + 1 if i < 2 else 0
        bx = V[t, f, 0]
        by = V[t, f, 1]
        t1 = (bx - ax) * (py - ay)
        t2 = (by - ay) * (px - ax)
        c = t1 - t2
        slack = ORIENT_TOL * (abs(t1) + abs(t2))
        if not c >= -slack:
            return False
    return True


@njit(cache=True, inline="always")
def _seg_box(cx, cy, ax, ay, bx, by):
    ex = ORIENT_TOL * (abs(ax) + abs(bx) + abs(cx))
    ey = ORIENT_TOL * (abs(ay) + abs(by) + abs(cy))
    mnx = ax if ax < bx else bx
    mxx = ax if ax > bx else bx
    mny = ay if ay < by else by
    mxy = ay if ay > by else by
    return (cx >= mnx - ex and cx <= mxx + ex
            and cy >= mny - ey and cy <= mxy + ey)


@njit(cache=True, inline="always")
def _segs_hit(p1x, p1y, p2x, p2y, q1x, q1y, q2x, q2y):
    """Closed segment intersection, collinear overlap included."""
    d1 = _osign(q1x, q1y, q2x, q2y, p1x, p1y)
    d2 = _osign(q1x, q1y, q2x, q2y, p2x, p2y)
    d3 = _osign(p1x, p1y, p2x, p2y, q1x, q1y)
    d4 = _osign(p1x, p1y, p2x, p2y, q2x, q2y)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and _seg_box(p1x, p1y, q1x, q1y, q2x, q2y):
        return True
    if d2 == 0 and _seg_box(p2x, p2y, q1x, q1y, q2x, q2y):
        return True
    if d3 == 0 and _seg_box(q1x, q1y, p1x, p1y, p2x, p2y):
        return True
    if d4 == 0 and _seg_box(q2x, q2y, p1x, p1y, p2x, p2y):
        return True
    return False


@njit(cache=True, inline="always")
def _tris_hit(V, a, b):
    """Closed intersection of member triangles a and b (rows of V)."""
    for kk in range(3):
        if _pt_in_tri(V, a, V[b, kk, 0], V[b, kk, 1]):
            return True
        if _pt_in_tri(V, b, V[a, kk, 0], V[a, kk, 1]):
            return True
    for i in range(3):
        i2 = i + 1 if i < 2 else 0
        for j in range(3):
            j2 = j + 1 if j < 2 else 0
            if _segs_hit(V[a, i, 0], V[a, i, 1], V[a, i2, 0], V[a, i2, 1],
                         V[b, j, 0], V[b, j, 1], V[b, j2, 0], V[b, j2, 1]):
                return True
    return False


@njit(cache=True, inline="always")
def _seg_pair_hit(i, j, seg):
    """Closed intersection flag for two sub-segments (bboxes overlap)."""
    ax0 = seg[i, 0]
    ay0 = seg[i, 1]
    ax1 = seg[i, 2]
    ay1 = seg[i, 3]
    bx0 = seg[j, 0]
    by0 = seg[j, 1]
    bx1 = seg[j, 2]
    by1 = seg[j, 3]
    d1 = (bx1 - bx0) * (ay0 - by0) - (by1 - by0) * (ax0 - bx0)
    d2 = (bx1 - bx0) * (ay1 - by0) - (by1 - by0) * (ax1 - bx0)
    d3 = (ax1 - ax0) * (by0 - ay0) - (ay1 - ay0) * (bx0 - ax0)
    d4 = (ax1 - ax0) * (by1 - ay0) - (ay1 - ay0) * (bx1 - ax0)
    return d1 * d2 <= 0 and d3 * d4 <= 0


@njit(cache=True)
def _disk_join_level(rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax,
                     bx0, by0, bx1, by1, cliq,
                     scx, scy, sr, a0, span, full,
                     mcx, mcy, mr, tol,
                     ok_keys, fail_keys):
    """Same-level pairs plus probe pairs at one grid level, for disks.

    Group slices are sorted by bx0, so a sweep visits only x-overlapping
    pairs (registered widths stay below wmax). Emits confirmed crossing
    pairs as clique-pair keys (min << 31 | max) and unconfirmed
    detections into fail_keys. Returns required output counts so the
    caller can retry with larger buffers on overflow.
    """
    cand = 0
    k = 0
    nok = 0
    nfail = 0
    cap_ok = ok_keys.shape[0]
    cap_fail = fail_keys.shape[0]
    for g in range(uci.shape[0]):
        ci = uci[g]
        cj = ucj[g]
        hi = ptr[g + 1]
        for u in range(ptr[g], hi):
            i = rids[u]
            xi1 = bx1[i]
            for v in range(u + 1, hi):
                j = rids[v]
                if bx0[j] > xi1:
                    break
                if not _pair_admit(i, j, ci, cj, inv,
                                   bx0, by0, bx1, by1, cliq):
                    continue
                cand += 1
                cnt = _arc_pair_count(i, j, scx, scy, sr, a0, span, full)
                if cnt == 0:
                    continue
                k += cnt
                dx = mcx[i] - mcx[j]
                dy = mcy[i] - mcy[j]
                s = mr[i] + mr[j]
                ca = cliq[i]
                cb = cliq[j]
                if ca > cb:
                    ca, cb = cb, ca
                key = ca << 31 | cb
                if dx * dx + dy * dy <= s * s * (1.0 + tol):
                    if nok < cap_ok:
                        ok_keys[nok] = key
                    nok += 1
                else:
                    if nfail < cap_fail:
                        fail_keys[nfail] = key
                    nfail += 1
    for t in range(pid.shape[0]):
        g = _find_group(uci, ucj, pci[t], pcj[t])
        if g < 0:
            continue
        i = pid[t]
        xi1 = bx1[i]
        v0 = _window_start(rids, ptr[g], ptr[g + 1], bx0, bx0[i] - wmax)
        for v in range(v0, ptr[g + 1]):
            j = rids[v]
            if bx0[j] > xi1:
                break
            if bx1[j] < bx0[i]:
                continue
            if not _pair_admit(i, j, pci[t], pcj[t], inv,
                               bx0, by0, bx1, by1, cliq):
                continue
            cand += 1
            cnt = _arc_pair_count(i, j, scx, scy, sr, a0, span, full)
            if cnt == 0:
                continue
            k += cnt
            dx = mcx[i] - mcx[j]
            dy = mcy[i] - mcy[j]
            s = mr[i] + mr[j]
            ca = cliq[i]
            cb = cliq[j]
            if ca > cb:
                ca, cb = cb, ca
            key = ca << 31 | cb
            if dx * dx + dy * dy <= s * s * (1.0 + tol):
                if nok < cap_ok:
                    ok_keys[nok] = key
                nok += 1
            else:
                if nfail < cap_fail:
                    fail_keys[nfail] = key
                nfail += 1
    return cand, k, nok, nfail


@njit(cache=True)
def _tri_join_level(rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax,
                    bx0, by0, bx1, by1, cliq, seg, psrc, V,
                    ok_keys, fail_keys):
    """Triangle analog of _disk_join_level.

    The member confirm runs inline on the source triangles (rows of V
    via psrc), splitting hits into confirmed clique-pair keys and
    rescue candidates exactly like the disk kernel.
    """
    cand = 0
    k = 0
    nok = 0
    nfail = 0
    cap_ok = ok_keys.shape[0]
    cap_fail = fail_keys.shape[0]
    for g in range(uci.shape[0]):
        ci = uci[g]
        cj = ucj[g]
        hi = ptr[g + 1]
        for u in range(ptr[g], hi):
            i = rids[u]
            xi1 = bx1[i]
            for v in range(u + 1, hi):
                j = rids[v]
                if bx0[j] > xi1:
                    break
                if not _pair_admit(i, j, ci, cj, inv,
                                   bx0, by0, bx1, by1, cliq):
                    continue
                cand += 1
                if not _seg_pair_hit(i, j, seg):
                    continue
                k += 1
                ca = cliq[i]
                cb = cliq[j]
                if ca > cb:
                    ca, cb = cb, ca
                key = ca << 31 | cb
                if _tris_hit(V, psrc[i], psrc[j]):
                    if nok < cap_ok:
                        ok_keys[nok] = key
                    nok += 1
                else:
                    if nfail < cap_fail:
                        fail_keys[nfail] = key
                    nfail += 1
    for t in range(pid.shape[0]):
        g = _find_group(uci, ucj, pci[t], pcj[t])
        if g < 0:
            continue
        i = pid[t]
        xi1 = bx1[i]
        v0 = _window_start(rids, ptr[g], ptr[g + 1], bx0, bx0[i] - wmax)
        for v in range(v0, ptr[g + 1]):
            j = rids[v]
            if bx0[j] > xi1:
                break
            if bx1[j] < bx0[i]:
                continue
            if not _pair_admit(i, j, pci[t], pcj[t], inv,
                               bx0, by0, bx1, by1, cliq):
                continue
            cand += 1
            if not _seg_pair_hit(i, j, seg):
                continue
            k += 1
            ca = cliq[i]
            cb = cliq[j]
            if ca > cb:
                ca, cb = cb, ca
            key = ca << 31 | cb
            if _tris_hit(V, psrc[i], psrc[j]):
                if nok < cap_ok:
                    ok_keys[nok] = key
                nok += 1
            else:
                if nfail < cap_fail:
                    fail_keys[nfail] = key
                nfail += 1
    return cand, k, nok, nfail


def _level_batches(bbox):
    """Per-level (registered groups, probe cells) prep, like self_join.

    Each cell group's slice comes sorted by bbox x-min so the kernels
    can sweep; wmax bounds the registered widths at the level.
    """
    from . import buckets

    lv = buckets._levels_of(bbox)
    for L in np.unique(lv):
        own = np.nonzero(lv == L)[0].astype(np.int64)
        rid, rci, rcj = buckets._cells(bbox[own], own, L)
        rids, uci, ucj, ptr = buckets._group_cells(rid, rci, rcj)
        grp = np.repeat(np.arange(uci.shape[0]), np.diff(ptr))
        rids = rids[np.lexsort((bbox[rids, 0], grp))]
        wmax = float((bbox[own, 2] - bbox[own, 0]).max()) if own.size else 0.0
        below = np.nonzero(lv < L)[0].astype(np.int64)
        if below.shape[0]:
            pid, pci, pcj = buckets._cells(bbox[below], below, L)
        else:
            pid = np.empty(0, np.int64)
            pci = np.empty(0, np.int64)
            pcj = np.empty(0, np.int64)
        inv = float(np.ldexp(1.0, -int(L)))
        yield rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax


def disk_crossing_hits(fs, inst):
    """All crossing disk piece pairs, folded straight to clique keys.

    Returns (confirmed clique-pair keys, unconfirmed clique-pair keys,
    total crossing count, candidate pair count).
    """
    bbox = fs.bbox
    bx0 = np.ascontiguousarray(bbox[:, 0])
    by0 = np.ascontiguousarray(bbox[:, 1])
    bx1 = np.ascontiguousarray(bbox[:, 2])
    by1 = np.ascontiguousarray(bbox[:, 3])
    cliq = fs.clique_of
    cx, cy, r = fs.geom
    scx = cx[fs.src]
    scy = cy[fs.src]
    sr = r[fs.src]
    span = np.where(fs.full, TWO_PI, (fs.arc1 - fs.arc0) % TWO_PI)
    full = fs.full.astype(np.uint8)
    mcx = inst.centers[fs.src, 0]
    mcy = inst.centers[fs.src, 1]
    mr = inst.radii[fs.src]
    ok_parts = []
    fail_parts = []
    k = 0
    cand = 0
    cap_ok = max(1 << 20, 16 * bbox.shape[0])
    cap_fail = 1 << 12
    ok_buf = np.empty(cap_ok, np.int64)
    fail_buf = np.empty(cap_fail, np.int64)
    for batch in _level_batches(bbox):
        rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax = batch
        while True:
            c, kk, nok, nfail = _disk_join_level(
                rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax,
                bx0, by0, bx1, by1, cliq,
                scx, scy, sr, fs.arc0, span, full,
                mcx, mcy, mr, DISK_TOL, ok_buf, fail_buf)
            if nok <= cap_ok and nfail <= cap_fail:
                break
            while cap_ok < nok:
                cap_ok *= 2
            while cap_fail < nfail:
                cap_fail *= 2
            ok_buf = np.empty(cap_ok, np.int64)
            fail_buf = np.empty(cap_fail, np.int64)
        cand += c
        k += kk
        if nok:
            ok_parts.append(ok_buf[:nok].copy())
        if nfail:
            fail_parts.append(fail_buf[:nfail].copy())
    ok = (np.concatenate(ok_parts) if ok_parts else np.empty(0, np.int64))
    fail = (np.concatenate(fail_parts) if fail_parts
            else np.empty(0, np.int64))
    return ok, fail, k, cand


def tri_crossing_hits(fs, inst):
    """Crossing triangle piece pairs folded to confirmed clique keys.

    Same return shape as disk_crossing_hits: (confirmed keys,
    unconfirmed keys, crossing count, candidate count).
    """
    bbox = fs.bbox
    bx0 = np.ascontiguousarray(bbox[:, 0])
    by0 = np.ascontiguousarray(bbox[:, 1])
    bx1 = np.ascontiguousarray(bbox[:, 2])
    by1 = np.ascontiguousarray(bbox[:, 3])
    cliq = fs.clique_of
    seg = np.ascontiguousarray(fs.seg)
    V = np.ascontiguousarray(inst.verts)
    ok_parts = []
    fail_parts = []
    k = 0
    cand = 0
    cap_ok = max(1 << 20, 16 * bbox.shape[0])
    cap_fail = 1 << 12
    ok_buf = np.empty(cap_ok, np.int64)
    fail_buf = np.empty(cap_fail, np.int64)
    for batch in _level_batches(bbox):
        rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax = batch
        while True:
            c, kk, nok, nfail = _tri_join_level(
                rids, ptr, uci, ucj, pid, pci, pcj, inv, wmax,
                bx0, by0, bx1, by1, cliq, seg, fs.src, V,
                ok_buf, fail_buf)
            if nok <= cap_ok and nfail <= cap_fail:
                break
            while cap_ok < nok:
                cap_ok *= 2
            while cap_fail < nfail:
                cap_fail *= 2
            ok_buf = np.empty(cap_ok, np.int64)
            fail_buf = np.empty(cap_fail, np.int64)
        cand += c
        k += kk
        if nok:
            ok_parts.append(ok_buf[:nok].copy())
        if nfail:
            fail_parts.append(fail_buf[:nfail].copy())
    ok = (np.concatenate(ok_parts) if ok_parts else np.empty(0, np.int64))
    fail = (np.concatenate(fail_parts) if fail_parts
            else np.empty(0, np.int64))
    return ok, fail, k, cand


# --------------------------------------------------------------------
# point-in-flower walk


@njit(cache=True, inline="always")
def _flower_has_disk(c, qx, qy, stabx, staby, indptr, tstart,
                     pscx, pscy, psr):
    """contains_points for one (flower, point) pair, disk pieces."""
    px = stabx[c]
    py = staby[c]
    th = math.atan2(qy - py, qx - px)
    lo = indptr[c]
    hi = indptr[c + 1]
    w = hi - lo
    # rightmost piece with tstart <= th, wrapping below the first
    l = lo
    r = hi
    while l < r:
        mid = (l + r) >> 1
        if tstart[mid] <= th:
            l = mid + 1
        else:
            r = mid
    idx = l - 1 - lo
    if idx < 0:
        idx = w - 1
    pid = lo + idx
    for sh in range(-1, 2):
        p = lo + (idx + sh) % w
        dx = qx - pscx[p]
        dy = qy - pscy[p]
        if dx * dx + dy * dy <= psr[p] * psr[p]:
            return True
    # numeric winner flips near the envelope: rescan the whole clique
    dist = math.hypot(qx - px, qy - py)
    ex = pscx[pid] - px
    ey = pscy[pid] - py
    b = ex * math.cos(th) + ey * math.sin(th)
    h2 = psr[pid] * psr[pid] - (ex * ex + ey * ey - b * b)
    reach = b + math.sqrt(h2 if h2 > 0.0 else 0.0)
    if dist <= reach * (1.0 + _RESCAN_BAND) + 1e-15:
        for p in range(lo, hi):
            dx = qx - pscx[p]
            dy = qy - pscy[p]
            if dx * dx + dy * dy <= psr[p] * psr[p]:
                return True
    return False


@njit(cache=True, inline="always")
def _in_tri(p, qx, qy, pverts):
    for e in range(3):
        ax = pverts[p, e, 0]
        ay = pverts[p, e, 1]
        f = (e + 1) % 3
        bx = pverts[p, f, 0]
        by = pverts[p, f, 1]
        if (bx - ax) * (qy - ay) - (by - ay) * (qx - ax) < 0.0:
            return False
    return True


@njit(cache=True, inline="always")
def _flower_has_tri(c, qx, qy, stabx, staby, indptr, tstart,
                    pverts, pedge):
    """contains_points for one (flower, point) pair, triangle pieces."""
    px = stabx[c]
    py = staby[c]
    th = math.atan2(qy - py, qx - px)
    lo = indptr[c]
    hi = indptr[c + 1]
    w = hi - lo
    l = lo
    r = hi
    while l < r:
        mid = (l + r) >> 1
        if tstart[mid] <= th:
            l = mid + 1
        else:
            r = mid
    idx = l - 1 - lo
    if idx < 0:
        idx = w - 1
    pid = lo + idx
    for sh in range(-1, 2):
        if _in_tri(lo + (idx + sh) % w, qx, qy, pverts):
            return True
    dist = math.hypot(qx - px, qy - py)
    e0 = pedge[pid]
    ax = pverts[pid, e0, 0]
    ay = pverts[pid, e0, 1]
    e1 = (e0 + 1) % 3
    ex = pverts[pid, e1, 0] - ax
    ey = pverts[pid, e1, 1] - ay
    dx = math.cos(th)
    dy = math.sin(th)
    den = dx * ey - dy * ex
    if den != 0.0:
        s = ((ax - px) * dy - (ay - py) * dx) / den
        if not math.isfinite(s):
            s = 0.0
        elif s < 0.0:
            s = 0.0
        elif s > 1.0:
            s = 1.0
    else:
        s = 0.0
    reach = math.hypot(ax + s * ex - px, ay + s * ey - py)
    if dist <= reach * (1.0 + _RESCAN_BAND) + 1e-15:
        for p in range(lo, hi):
            if _in_tri(p, qx, qy, pverts):
                return True
    return False


@njit(cache=True)
def _walk_chunk(kind_disk, paths, child_indptr, child_list, nptr, order,
                stamp, tag0, fb0, fb1, fb2, fb3,
                stabx, staby, indptr, tstart,
                pscx, pscy, psr, pverts, pedge,
                qxs, qys, out_q, out_c):
    """Candidate cliques along each query's search path, tested exactly.

    For every query: its path nodes, their refine children, and the
    cliques homed there, deduplicated with a per-query stamp; emits
    (local query index, clique) for flowers containing the point.
    """
    m = 0
    cap = out_q.shape[0]
    npl = paths.shape[0]
    nq = paths.shape[1]
    for q in range(nq):
        tag = tag0 + q
        qx = qxs[q]
        qy = qys[q]
        for lvl in range(npl):
            node = paths[lvl, q]
            base = child_indptr[node]
            nkids = child_indptr[node + 1] - base
            for slot in range(-1, nkids):
                nd = node if slot < 0 else child_list[base + slot]
                for ii in range(nptr[nd], nptr[nd + 1]):
                    c = order[ii]
                    if stamp[c] == tag:
                        continue
                    stamp[c] = tag
                    if qx < fb0[c] or qx > fb2[c]:
                        continue
                    if qy < fb1[c] or qy > fb3[c]:
                        continue
                    if kind_disk:
                        hit = _flower_has_disk(c, qx, qy, stabx, staby,
                                               indptr, tstart,
                                               pscx, pscy, psr)
                    else:
                        hit = _flower_has_tri(c, qx, qy, stabx, staby,
                                              indptr, tstart,
                                              pverts, pedge)
                    if hit:
                        if m < cap:
                            out_q[m] = q
                            out_c[m] = c
                        m += 1
    return m


def point_flower_pairs(fs, trees, cliques, px, py, chunk):
    """Fast route for the per-grid containment walk; same output."""
    nq = px.shape[0]
    if fs.kind == "disks":
        cx, cy, r = fs.geom
        pscx = cx[fs.src]
        pscy = cy[fs.src]
        psr = r[fs.src]
        pverts = np.empty((1, 3, 2))
        pedge = np.zeros(1, np.int64)
        kind_disk = True
    else:
        (verts,) = fs.geom
        pverts = np.ascontiguousarray(verts[fs.src])
        pedge = fs.edge.astype(np.int64)
        pscx = np.empty(0)
        pscy = np.empty(0)
        psr = np.empty(0)
        kind_disk = False
    fb0 = np.ascontiguousarray(fs.flower_bbox[:, 0])
    fb1 = np.ascontiguousarray(fs.flower_bbox[:, 1])
    fb2 = np.ascontiguousarray(fs.flower_bbox[:, 2])
    fb3 = np.ascontiguousarray(fs.flower_bbox[:, 3])
    stabx = np.ascontiguousarray(fs.stab[:, 0])
    staby = np.ascontiguousarray(fs.stab[:, 1])
    stamp = np.full(cliques.n_cliques, -1, np.int64)
    tag0 = 0
    out_q, out_c = [], []
    cap = 1 << 16
    buf_q = np.empty(cap, np.int64)
    buf_c = np.empty(cap, np.int64)
    for g, tree in trees.items():
        cg = np.nonzero(cliques.grid == g)[0]
        if cg.shape[0] == 0:
            continue
        order = cg[np.argsort(cliques.node[cg], kind="stable")]
        nptr = np.zeros(tree.n_nodes + 1, np.int64)
        np.cumsum(np.bincount(cliques.node[order],
                              minlength=tree.n_nodes), out=nptr[1:])
        for s in range(0, nq, chunk):
            qs = np.arange(s, min(s + chunk, nq), dtype=np.int64)
            paths = tree.search_paths(px[qs], py[qs])
            qxs = np.ascontiguousarray(px[qs])
            qys = np.ascontiguousarray(py[qs])
            while True:
                m = _walk_chunk(kind_disk, paths, tree.child_indptr,
                                tree.child_list, nptr, order, stamp,
                                tag0, fb0, fb1, fb2, fb3,
                                stabx, staby, fs.indptr, fs.tstart,
                                pscx, pscy, psr, pverts, pedge,
                                qxs, qys, buf_q, buf_c)
                if m <= cap:
                    break
                while cap < m:
                    cap *= 2
                buf_q = np.empty(cap, np.int64)
                buf_c = np.empty(cap, np.int64)
            tag0 += qs.shape[0]
            if m:
                key = np.sort(buf_q[:m] << np.int64(31) | buf_c[:m])
                out_q.append(qs[key >> np.int64(31)])
                out_c.append(key & _KEY31)
    if not out_q:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(out_q), np.concatenate(out_c)


# --------------------------------------------------------------------
# adjacency fill


@njit(cache=True)
def _fill_adjacency(pa, pb, indptr, out):
    cur = indptr[:-1].copy()
    for e in range(pa.shape[0]):
        a = pa[e]
        b = pb[e]
        out[cur[a]] = b
        cur[a] += 1
        out[cur[b]] = a
        cur[b] += 1
    for v in range(indptr.shape[0] - 1):
        seg = out[indptr[v]:indptr[v + 1]]
        seg.sort()


def adjacency(nc, pairs):
    """CSR adjacency from unique undirected pairs; rows sorted."""
    indptr = np.zeros(nc + 1, np.int64)
    if pairs.shape[0] == 0:
        return indptr, np.empty(0, np.int64)
    deg = (np.bincount(pairs[:, 0], minlength=nc)
           + np.bincount(pairs[:, 1], minlength=nc))
    np.cumsum(deg, out=indptr[1:])
    adj = np.empty(2 * pairs.shape[0], np.int64)
    _fill_adjacency(np.ascontiguousarray(pairs[:, 0]),
                    np.ascontiguousarray(pairs[:, 1]), indptr, adj)
    return indptr, adj


# --------------------------------------------------------------------
# BFS candidate walk


@njit(cache=True)
def _candidate_walk(frontier, membership, adj_indptr, adj_list,
                    mem_indptr, mem_list, ready,
                    nbhd_stamp, front_stamp, epoch,
                    out_cliq, out_cand):
    """Not-ready members of cliques adjacent to the frontier's cliques.

    front_stamp marks the frontier's own cliques, nbhd_stamp the closed
    neighborhood already harvested; both persist across levels and use
    the level number as the epoch. Returns required output sizes.
    """
    nf = 0
    m = 0
    capf = out_cliq.shape[0]
    capm = out_cand.shape[0]
    for t in range(frontier.shape[0]):
        c = membership[frontier[t]]
        if front_stamp[c] == epoch:
            continue
        front_stamp[c] = epoch
        if nf < capf:
            out_cliq[nf] = c
        nf += 1
        if nbhd_stamp[c] != epoch:
            nbhd_stamp[c] = epoch
            for ii in range(mem_indptr[c], mem_indptr[c + 1]):
                u = mem_list[ii]
                if not ready[u]:
                    if m < capm:
                        out_cand[m] = u
                    m += 1
        for jj in range(adj_indptr[c], adj_indptr[c + 1]):
            d = adj_list[jj]
            if nbhd_stamp[d] == epoch:
                continue
            nbhd_stamp[d] = epoch
            for ii in range(mem_indptr[d], mem_indptr[d + 1]):
                u = mem_list[ii]
                if not ready[u]:
                    if m < capm:
                        out_cand[m] = u
                    m += 1
    return nf, m
