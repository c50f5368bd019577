"""Overlap joins for axis-aligned boxes via hierarchical grids.

Each box registers in the grid level matching its own size, covering at
most four cells there. Same-level contacts come from shared cells, and
strictly finer boxes probe coarser occupied levels: for any two
overlapping boxes the larger one's level grid has a cell containing a
common point, the larger box registers it and the smaller box probes it,
so every overlapping pair is produced. Candidates then pass an exact
bounds test, so the output is precisely the overlapping pairs.
"""

from __future__ import annotations

import numpy as np

from .grids import ceil_log2

MIN_LEVEL = -50
MAX_LEVEL = 1
_CHUNK = 1 << 20


def _levels_of(bbox):
    w = bbox[:, 2] - bbox[:, 0]
    h = bbox[:, 3] - bbox[:, 1]
    side = np.maximum(np.maximum(w, h), 1e-300)
    return np.clip(ceil_log2(side), MIN_LEVEL, MAX_LEVEL)


def _cells(bbox, ids, level):
    """Grid cells of one level overlapped by each box; (ids, ci, cj) rows.

    Boxes must have sides <= the cell size, so each spans at most 2x2.
    """
    inv = float(np.ldexp(1.0, -int(level)))
    ci0 = np.floor(bbox[:, 0] * inv).astype(np.int64)
    cj0 = np.floor(bbox[:, 1] * inv).astype(np.int64)
    ci1 = np.floor(bbox[:, 2] * inv).astype(np.int64)
    cj1 = np.floor(bbox[:, 3] * inv).astype(np.int64)
    parts = [(ids, ci0, cj0)]
    mx = ci1 > ci0
    my = cj1 > cj0
    if np.any(mx):
        parts.append((ids[mx], ci1[mx], cj0[mx]))
    if np.any(my):
        parts.append((ids[my], ci0[my], cj1[my]))
    both = mx & my
    if np.any(both):
        parts.append((ids[both], ci1[both], cj1[both]))
    out_i = np.concatenate([p[0] for p in parts])
    out_ci = np.concatenate([p[1] for p in parts])
    out_cj = np.concatenate([p[2] for p in parts])
    return out_i, out_ci, out_cj


def _group_cells(ids, ci, cj):
    """Sort rows by cell; returns (ids sorted, unique ci, cj, group ptr)."""
    order = np.lexsort((cj, ci))
    ids, ci, cj = ids[order], ci[order], cj[order]
    if ids.shape[0] == 0:
        return ids, ci, cj, np.zeros(1, np.int64)
    new = np.empty(ids.shape[0], bool)
    new[0] = True
    new[1:] = (ci[1:] != ci[:-1]) | (cj[1:] != cj[:-1])
    starts = np.nonzero(new)[0]
    ptr = np.concatenate([starts, [ids.shape[0]]]).astype(np.int64)
    return ids, ci[starts], cj[starts], ptr


def _ragged_arange(counts):
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, np.int64)
    starts = np.concatenate([[0], np.cumsum(counts[:-1])])
    return np.arange(total, dtype=np.int64) - np.repeat(starts, counts)


def _pairs_in_groups(ids, ptr):
    """All unordered pairs inside each group of the sorted id array."""
    sizes = np.diff(ptr)
    grp = np.repeat(np.arange(sizes.shape[0]), sizes)
    pos = np.arange(ids.shape[0], dtype=np.int64) - np.repeat(ptr[:-1], sizes)
    counts = sizes[grp] - pos - 1
    a = np.repeat(ids, counts)
    b_idx = np.repeat(np.arange(ids.shape[0], dtype=np.int64) + 1, counts)
    b = ids[b_idx + _ragged_arange(counts)]
    return a, b


def _match(pids, pci, pcj, uci, ucj, ptr, rids):
    """Probe rows against grouped registrations of the same level."""
    if pids.shape[0] == 0 or uci.shape[0] == 0:
        return (np.empty(0, np.int64),) * 2
    # compound searchsorted on (ci, cj)
    nb = uci.shape[0]
    hh = np.concatenate([uci, pci])
    ll = np.concatenate([ucj, pcj])
    tie = np.zeros(hh.shape[0], np.int8)
    tie[nb:] = 1
    order = np.lexsort((tie, ll, hh))
    isq = tie[order] == 1
    cum = np.cumsum(~isq)
    qpos = np.nonzero(isq)[0]
    slot = np.full(pids.shape[0], -1, np.int64)
    slot[order[qpos] - nb] = cum[qpos] - 1
    ok = slot >= 0
    ok[ok] &= (uci[slot[ok]] == pci[ok]) & (ucj[slot[ok]] == pcj[ok])
    pid = pids[ok]
    g = slot[ok]
    counts = ptr[g + 1] - ptr[g]
    a = np.repeat(pid, counts)
    b = rids[np.repeat(ptr[g], counts) + _ragged_arange(counts)]
    return a, b


def _dedup_pairs(a, b, ordered=False):
    if a.shape[0] == 0:
        return a, b
    if not ordered:
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
    else:
        lo, hi = a, b
    key = lo << np.int64(31) | hi     # ids < 2^31
    key = np.unique(key)
    return key >> np.int64(31), key & np.int64((1 << 31) - 1)


def _overlapping(bbox_a, bbox_b, a, b):
    return ((bbox_a[a, 0] <= bbox_b[b, 2]) & (bbox_b[b, 0] <= bbox_a[a, 2])
            & (bbox_a[a, 1] <= bbox_b[b, 3]) & (bbox_b[b, 1] <= bbox_a[a, 3]))


def self_join(bbox):
    """Candidate pairs (a < b) among boxes with overlapping bounds."""
    n = bbox.shape[0]
    if n < 2:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    lv = _levels_of(bbox)
    levels = np.unique(lv)
    parts_a, parts_b = [], []
    for L in levels:
        own = np.nonzero(lv == L)[0].astype(np.int64)
        rid, rci, rcj = _cells(bbox[own], own, L)
        rids, uci, ucj, ptr = _group_cells(rid, rci, rcj)
        a, b = _pairs_in_groups(rids, ptr)
        parts_a.append(a)
        parts_b.append(b)
        below = np.nonzero(lv < L)[0].astype(np.int64)
        for s in range(0, below.shape[0], _CHUNK):
            ch = below[s:s + _CHUNK]
            pid, pci, pcj = _cells(bbox[ch], ch, L)
            a, b = _match(pid, pci, pcj, uci, ucj, ptr, rids)
            parts_a.append(a)
            parts_b.append(b)
    a = np.concatenate(parts_a)
    b = np.concatenate(parts_b)
    keep = (a != b) & _overlapping(bbox, bbox, a, b)
    return _dedup_pairs(a[keep], b[keep])


def join(bbox_a, bbox_b):
    """Candidate (ia, ib) pairs across two box sets."""
    na, nb = bbox_a.shape[0], bbox_b.shape[0]
    if na == 0 or nb == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    lva = _levels_of(bbox_a)
    lvb = _levels_of(bbox_b)
    levels = np.unique(np.concatenate([lva, lvb]))
    parts_a, parts_b = [], []
    for L in levels:
        own_a = np.nonzero(lva == L)[0].astype(np.int64)
        own_b = np.nonzero(lvb == L)[0].astype(np.int64)
        aid, aci, acj = _cells(bbox_a[own_a], own_a, L)
        bid, bci, bcj = _cells(bbox_b[own_b], own_b, L)
        aids, auci, aucj, aptr = _group_cells(aid, aci, acj)
        bids, buci, bucj, bptr = _group_cells(bid, bci, bcj)
        # same level: A rows against B's cell groups
        pa, pb = _match(aid, aci, acj, buci, bucj, bptr, bids)
        parts_a.append(pa)
        parts_b.append(pb)
        # finer boxes probe this level
        below_a = np.nonzero(lva < L)[0].astype(np.int64)
        for s in range(0, below_a.shape[0], _CHUNK):
            ch = below_a[s:s + _CHUNK]
            pid, pci, pcj = _cells(bbox_a[ch], ch, L)
            pa, pb = _match(pid, pci, pcj, buci, bucj, bptr, bids)
            parts_a.append(pa)
            parts_b.append(pb)
        below_b = np.nonzero(lvb < L)[0].astype(np.int64)
        for s in range(0, below_b.shape[0], _CHUNK):
            ch = below_b[s:s + _CHUNK]
            pid, pci, pcj = _cells(bbox_b[ch], ch, L)
            pb2, pa2 = _match(pid, pci, pcj, auci, aucj, aptr, aids)
            parts_a.append(pa2)
            parts_b.append(pb2)
    a = np.concatenate(parts_a)
    b = np.concatenate(parts_b)
    if a.shape[0] == 0:
        return a, b
    keep = _overlapping(bbox_a, bbox_b, a, b)
    key = np.unique(a[keep] << np.int64(31) | b[keep])
    return key >> np.int64(31), key & np.int64((1 << 31) - 1)


def points_join(px, py, bbox):
    """Candidate (point, box) pairs with the point inside the box bounds."""
    npts = px.shape[0]
    nb = bbox.shape[0]
    if npts == 0 or nb == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    lv = _levels_of(bbox)
    parts_p, parts_b = [], []
    ids = np.arange(npts, dtype=np.int64)
    for L in np.unique(lv):
        own = np.nonzero(lv == L)[0].astype(np.int64)
        bid, bci, bcj = _cells(bbox[own], own, L)
        bids, uci, ucj, ptr = _group_cells(bid, bci, bcj)
        inv = float(np.ldexp(1.0, -int(L)))
        pci = np.floor(px * inv).astype(np.int64)
        pcj = np.floor(py * inv).astype(np.int64)
        pp, bb = _match(ids, pci, pcj, uci, ucj, ptr, bids)
        parts_p.append(pp)
        parts_b.append(bb)
    p = np.concatenate(parts_p)
    b = np.concatenate(parts_b)
    if p.shape[0] == 0:
        return p, b
    keep = ((bbox[b, 0] <= px[p]) & (px[p] <= bbox[b, 2])
            & (bbox[b, 1] <= py[p]) & (py[p] <= bbox[b, 3]))
    key = np.unique(p[keep] << np.int64(31) | b[keep])
    return key >> np.int64(31), key & np.int64((1 << 31) - 1)
