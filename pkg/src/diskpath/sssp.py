"""Level-synchronous shortest paths on implicit intersection graphs.

The frontier L_l is expanded without listing edges: the clique
contraction proposes candidate objects (not-ready members of the
frontier cliques and their contraction neighbors), and a blue/red
intersection test against L_l keeps the ones actually adjacent. Every
candidate object shows up in at most three iterations, so the total
candidate volume is bounded by 3n; the loop enforces that as a hard
runtime check, not a debug assert.

Backends bundle the candidate generator with the intersection test so
the whole pipeline can be swapped for the quadratic oracle (--algo
brute in the CLI) while the driver stays identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _fastpath
from .bit import DiskIndex, bit_triangles
from .contraction import build_contraction
from .instances import Instance
from .oracle import build_explicit

UNREACHABLE = -1


@dataclass
class ShortestPathTree:
    """Distances, parent witnesses, and the level decomposition."""

    dist: np.ndarray
    parent: np.ndarray
    levels: List[np.ndarray] = field(default_factory=list)
    candidate_total: int = 0

    @property
    def unreachable(self):
        return np.nonzero(self.dist == UNREACHABLE)[0]


class FastBackend:
    """Clique contraction + geometric intersection testing.

    Works on the normalized copy of the instance carried by the
    contraction graph; candidate completeness needs clique edges and
    the intersection test to agree on one set of coordinates.
    """

    def __init__(self, inst: Instance):
        self.graph = build_contraction(inst)
        self._inst = self.graph.inst
        self.kind = inst.kind
        self.n = self.graph.membership.shape[0]
        self.membership = self.graph.membership
        self.n_cliques = self.graph.n_cliques
        if self.kind == "disks":
            self._cx = self._inst.centers[:, 0]
            self._cy = self._inst.centers[:, 1]
            self._r = self._inst.radii

    def members(self, cid: int):
        return self.graph.cliques.members_of(cid)

    def neighbors(self, cid: int):
        return self.graph.neighbors(cid)

    def csr(self):
        g = self.graph
        return (self.membership, g.adj_indptr, g.adj_list,
                g.cliques.indptr, g.cliques.members)

    def bit(self, blue_ids, red_ids):
        """Witness array over blue_ids: lowest intersecting red id."""
        reds = np.sort(red_ids)
        if self.kind == "disks":
            idx = DiskIndex(self._cx[reds], self._cy[reds], self._r[reds])
            w = idx.query(self._cx[blue_ids], self._cy[blue_ids],
                          self._r[blue_ids])
        else:
            w = bit_triangles(self._inst.verts[blue_ids],
                              self._inst.verts[reds], self._inst.alpha)
        return np.where(w >= 0, reds[np.maximum(w, 0)], -1)


class BruteBackend:
    """Oracle pipeline: singleton cliques over the explicit graph."""

    def __init__(self, inst: Instance, cap: Optional[int] = None):
        self.graph = build_explicit(inst) if cap is None \
            else build_explicit(inst, cap)
        self._inst = inst
        self.n = self.graph.n
        self.membership = np.arange(self.n, dtype=np.int64)
        self.n_cliques = self.n

    def members(self, cid: int):
        return np.array([cid], dtype=np.int64)

    def neighbors(self, cid: int):
        return self.graph.neighbors(cid)

    def csr(self):
        ids = np.arange(self.n + 1, dtype=np.int64)
        return (self.membership, self.graph.indptr, self.graph.indices,
                ids, ids[:-1])

    def bit(self, blue_ids, red_ids):
        from .oracle import bit_brute
        return bit_brute(self._inst, blue_ids, np.sort(red_ids))


def candidate_set(backend, cliques, ready, stamp, epoch: int):
    """Not-ready members of the given cliques and their neighbors.

    stamp is a per-clique epoch array reused across iterations; a
    clique is collected when first stamped with the current epoch.
    Cliques partition the objects, so no object-level dedup is needed.
    """
    chunks = []
    for c in cliques:
        c = int(c)
        if stamp[c] != epoch:
            stamp[c] = epoch
            chunks.append(backend.members(c))
        for nb in backend.neighbors(c):
            nb = int(nb)
            if stamp[nb] != epoch:
                stamp[nb] = epoch
                chunks.append(backend.members(nb))
    if not chunks:
        return np.empty(0, dtype=np.int64)
    cand = np.concatenate(chunks)
    return cand[~ready[cand]]


def _frontier_cliques(membership, frontier, stamp, epoch: int):
    out = []
    for c in membership[frontier]:
        c = int(c)
        if stamp[c] != epoch:
            stamp[c] = epoch
            out.append(c)
    return np.array(out, dtype=np.int64)


def _run(backend, sources) -> ShortestPathTree:
    n = backend.n
    sources = np.unique(np.atleast_1d(np.asarray(sources, dtype=np.int64)))
    if sources.size == 0:
        raise ValueError("need at least one source")
    if sources[0] < 0 or sources[-1] >= n:
        raise ValueError("source id out of range")
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    ready = np.zeros(n, dtype=bool)
    dist[sources] = 0
    ready[sources] = True
    levels = [sources]
    nbhd_stamp = np.full(backend.n_cliques, -1, dtype=np.int64)
    front_stamp = np.full(backend.n_cliques, -1, dtype=np.int64)
    cand_total = 0
    budget = 3 * n
    # the compiled walk fuses the frontier-clique dedup and the
    # neighborhood harvest; same visit order as the plain route
    fused = _fastpath.HAVE_NUMBA
    if fused:
        member_arrays = backend.csr()
        buf_cliq = np.empty(backend.n_cliques, dtype=np.int64)
        buf_cand = np.empty(budget + 8, dtype=np.int64)
    else:
        cliques = _frontier_cliques(backend.membership, sources,
                                    front_stamp, 0)
    frontier = sources
    level = 0
    while frontier.size:
        if fused:
            membership, a_ptr, a_lst, m_ptr, m_lst = member_arrays
            _, m = _fastpath._candidate_walk(
                frontier, membership, a_ptr, a_lst, m_ptr, m_lst,
                ready, nbhd_stamp, front_stamp, level,
                buf_cliq, buf_cand)
            cand = buf_cand[:min(m, buf_cand.shape[0])].copy()
            cand_total += m
        else:
            cand = candidate_set(backend, cliques, ready, nbhd_stamp,
                                 level)
            cand_total += cand.size
        if cand_total > budget:
            raise AssertionError(
                "candidate volume %d exceeds 3n=%d" % (cand_total, budget))
        if cand.size == 0:
            break
        wit = backend.bit(cand, frontier)
        hit = wit >= 0
        nxt = cand[hit]
        if nxt.size == 0:
            break
        level += 1
        dist[nxt] = level
        parent[nxt] = wit[hit]
        ready[nxt] = True
        levels.append(nxt)
        frontier = nxt
        if not fused:
            cliques = _frontier_cliques(backend.membership, frontier,
                                        front_stamp, level)
    return ShortestPathTree(dist, parent, levels, cand_total)


def sssp(inst: Instance, source: int, backend=None) -> ShortestPathTree:
    """Exact hop distances from one source object."""
    source = int(source)
    if source < 0 or source >= inst.n:
        raise ValueError("source id out of range")
    if backend is None:
        backend = FastBackend(inst)
    return _run(backend, [source])


def sssp_multi(inst: Instance, sources, backend=None) -> ShortestPathTree:
    """Exact hop distances to the nearest of several sources."""
    if backend is None:
        backend = FastBackend(inst)
    return _run(backend, sources)
