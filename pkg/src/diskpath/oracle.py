"""Brute-force reference implementations.

Everything here is deliberately quadratic and kept free of the indexing
machinery, so the fast path can be checked against an independent route:
explicit graph construction, plain BFS, an all-pairs bichromatic
intersection scan, and an all-pairs clique-edge scan.
"""

from __future__ import annotations

import numpy as np

from . import geom
from .instances import Instance

EXPLICIT_CAP = 5000
_BLOCK = 512


class ExplicitGraph:
    """CSR adjacency of the intersection graph; symmetric, no self-loops."""

    __slots__ = ("n", "indptr", "indices")

    def __init__(self, n, indptr, indices):
        self.n = n
        self.indptr = indptr
        self.indices = indices

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def edge_count(self):
        return len(self.indices) // 2

    def edges(self):
        """Sorted (u, v) pairs with u < v."""
        out = []
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    out.append((u, int(v)))
        return out


def intersection_matrix_blocks(inst: Instance, rows, cols):
    """Boolean intersection block for row ids x col ids (dense)."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if inst.kind == "disks":
        cx = inst.centers[:, 0]
        cy = inst.centers[:, 1]
        rr = inst.radii
        dx = cx[rows, None] - cx[None, cols]
        dy = cy[rows, None] - cy[None, cols]
        s = rr[rows, None] + rr[None, cols]
        return dx * dx + dy * dy <= s * s * (1.0 + geom.DISK_TOL)
    out = np.zeros((len(rows), len(cols)), dtype=bool)
    bb = inst.bboxes()
    for k, i in enumerate(rows):
        near = (bb[cols, 0] <= bb[i, 2]) & (bb[cols, 2] >= bb[i, 0]) \
            & (bb[cols, 1] <= bb[i, 3]) & (bb[cols, 3] >= bb[i, 1])
        cand = cols[near]
        if len(cand) == 0:
            continue
        A = np.broadcast_to(inst.verts[i], (len(cand), 3, 2))
        out[k, near] = geom.triangles_intersect_pairs(A, inst.verts[cand])
    return out


def build_explicit(inst: Instance, cap: int = EXPLICIT_CAP) -> ExplicitGraph:
    """All-pairs intersection graph; refuses instances above the cap."""
    n = inst.n
    if n > cap:
        raise ValueError("explicit construction capped at %d objects, got %d" % (cap, n))
    all_ids = np.arange(n, dtype=np.int64)
    rows_i = []
    rows_j = []
    for a in range(0, n, _BLOCK):
        b = min(a + _BLOCK, n)
        blk = intersection_matrix_blocks(inst, all_ids[a:b], all_ids)
        ii, jj = np.nonzero(blk)
        ii += a
        keep = ii != jj
        rows_i.append(ii[keep])
        rows_j.append(jj[keep])
    src = np.concatenate(rows_i) if rows_i else np.empty(0, dtype=np.int64)
    dst = np.concatenate(rows_j) if rows_j else np.empty(0, dtype=np.int64)
    order = np.lexsort((dst, src))
    src = src[order]
    dst = dst[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    np.cumsum(indptr, out=indptr)
    return ExplicitGraph(n, indptr, dst.astype(np.int64))


def bfs(graph: ExplicitGraph, sources):
    """Level-synchronous BFS.

    parent[v] is the lowest-id neighbor of v in the previous level, matching
    the witness tie-break of the fast path. Sources get parent -1.
    """
    sources = np.atleast_1d(np.asarray(sources, dtype=np.int64))
    if len(sources) == 0:
        raise ValueError("need at least one source")
    if np.any((sources < 0) | (sources >= graph.n)):
        raise ValueError("source id out of range")
    dist = np.full(graph.n, -1, dtype=np.int64)
    parent = np.full(graph.n, -1, dtype=np.int64)
    frontier = np.unique(sources)
    dist[frontier] = 0
    level = 0
    while len(frontier):
        counts = graph.indptr[frontier + 1] - graph.indptr[frontier]
        if counts.sum() == 0:
            break
        srcs = np.repeat(frontier, counts)
        tgts = np.concatenate([graph.neighbors(u) for u in frontier])
        fresh = dist[tgts] == -1
        srcs = srcs[fresh]
        tgts = tgts[fresh]
        if len(tgts) == 0:
            break
        best = np.full(graph.n, graph.n, dtype=np.int64)
        np.minimum.at(best, tgts, srcs)
        frontier = np.unique(tgts)
        dist[frontier] = level + 1
        parent[frontier] = best[frontier]
        level += 1
    return dist, parent


def bit_brute(inst: Instance, blue_ids, red_ids):
    """Bichromatic intersection witnesses by full scan.

    Returns an int64 array aligned with blue_ids: the lowest red id whose
    object intersects the blue one, or -1.
    """
    blue_ids = np.asarray(blue_ids, dtype=np.int64)
    red_ids = np.unique(np.asarray(red_ids, dtype=np.int64))
    out = np.full(len(blue_ids), -1, dtype=np.int64)
    if len(blue_ids) == 0 or len(red_ids) == 0:
        return out
    for a in range(0, len(blue_ids), _BLOCK):
        b = min(a + _BLOCK, len(blue_ids))
        blk = intersection_matrix_blocks(inst, blue_ids[a:b], red_ids)
        any_hit = blk.any(axis=1)
        first = blk.argmax(axis=1)
        out[a:b][any_hit] = red_ids[first[any_hit]]
    return out


def clique_edges_brute(inst: Instance, membership):
    """Edges of the clique graph by scanning all object pairs.

    membership[i] is the clique id of object i; returns sorted unique
    (cu, cv) pairs with cu < cv such that some object pair across the two
    cliques intersects.
    """
    membership = np.asarray(membership, dtype=np.int64)
    n = inst.n
    pairs = set()
    all_ids = np.arange(n, dtype=np.int64)
    for a in range(0, n, _BLOCK):
        b = min(a + _BLOCK, n)
        blk = intersection_matrix_blocks(inst, all_ids[a:b], all_ids)
        ii, jj = np.nonzero(blk)
        ii += a
        cu = membership[ii]
        cv = membership[jj]
        keep = cu != cv
        lo = np.minimum(cu[keep], cv[keep])
        hi = np.maximum(cu[keep], cv[keep])
        pairs.update(zip(lo.tolist(), hi.tolist()))
    return sorted(pairs)
