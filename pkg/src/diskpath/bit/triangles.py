"""Fat-triangle intersection testing, blue set vs red set.

Production path: candidate pairs from the hierarchical-grid bounding
box join, confirmed with the exact triangle predicate, lowest red id
kept per blue. The structure path dispatches the three-way condition
split (a blue containing a red vertex, a boundary point of the blue
inside a red, or crossing canonical chords) over the query structures;
it returns a valid witness but not necessarily the lowest one, and
exists as an independently testable reference.
"""

from __future__ import annotations

import numpy as np

from .. import buckets
from ..geom import (DEFAULT_ALPHA, canonical_chords, min_angles,
                    triangles_intersect_pairs)
from .structures import (ChordIndex, EmptinessIndex, StabbingIndex,
                         _require_fat)


def _bboxes(verts):
    return np.concatenate([verts.min(axis=1), verts.max(axis=1)], axis=1)


def _bit_join(bverts, rverts):
    ib, ir = buckets.join(_bboxes(bverts), _bboxes(rverts))
    out = np.full(bverts.shape[0], -1, np.int64)
    if ib.shape[0] == 0:
        return out
    hit = triangles_intersect_pairs(bverts[ib], rverts[ir])
    if not hit.any():
        return out
    sentinel = np.full(bverts.shape[0], rverts.shape[0], np.int64)
    np.minimum.at(sentinel, ib[hit], ir[hit])
    found = sentinel < rverts.shape[0]
    out[found] = sentinel[found]
    return out


class TriangleBitIndex:
    """Three exact substructures over the red set, queried per blue."""

    def __init__(self, rverts, alpha: float = DEFAULT_ALPHA):
        rverts = np.ascontiguousarray(np.asarray(rverts, float))
        _require_fat(rverts, alpha)
        self.alpha = float(alpha)
        self.rverts = rverts
        n = rverts.shape[0]
        self.emptiness = EmptinessIndex(rverts.reshape(-1, 2), alpha)
        self._vert_owner = np.repeat(np.arange(n, dtype=np.int64), 3)
        self.stabbing = StabbingIndex(rverts, alpha)
        segs = np.empty((3 * n, 2, 2))
        dirs = np.empty(3 * n)
        for i in range(n):
            chords, cd, _ = canonical_chords(rverts[i], alpha)
            segs[3 * i:3 * i + 3] = chords
            dirs[3 * i:3 * i + 3] = cd
        self.chords = ChordIndex(segs, self._vert_owner, alpha, dirs=dirs)

    def query(self, verts):
        """A red id intersecting the blue triangle, or -1."""
        verts = np.asarray(verts, dtype=float)
        hits = []
        # (i) some red vertex inside the blue triangle
        pid = self.emptiness.query(verts)
        if pid >= 0:
            hits.append(int(self._vert_owner[pid]))
        # (ii) a chord endpoint of the blue inside a red triangle
        _, _, pts = canonical_chords(verts, self.alpha)
        stabs = self.stabbing.query_many(pts[:, 0], pts[:, 1])
        hits.extend(int(w) for w in stabs if w >= 0)
        # (iii) canonical chords crossing
        bchords, bdirs, _ = canonical_chords(verts, self.alpha)
        for k in range(3):
            w = self.chords.query(bchords[k], qdir=bdirs[k])
            if w >= 0:
                hits.append(int(w))
        for w in sorted(set(hits)):
            if triangles_intersect_pairs(verts[None], self.rverts[w][None])[0]:
                return w
        return -1

    def query_many(self, bverts):
        bverts = np.asarray(bverts, dtype=float)
        _require_fat(bverts, self.alpha)
        return np.array([self.query(bverts[i])
                         for i in range(bverts.shape[0])], dtype=np.int64)


def bit_triangles(bverts, rverts, alpha: float = DEFAULT_ALPHA,
                  method: str = "join"):
    """Witness array: lowest red id intersecting each blue, else -1.

    method "join" is the production path; "structures" routes through
    TriangleBitIndex (witnesses valid but not id-minimal).
    """
    bverts = np.ascontiguousarray(np.asarray(bverts, float).reshape(-1, 3, 2))
    rverts = np.ascontiguousarray(np.asarray(rverts, float).reshape(-1, 3, 2))
    if bverts.shape[0]:
        _require_fat(bverts, alpha)
    if rverts.shape[0]:
        _require_fat(rverts, alpha)
    if bverts.shape[0] == 0 or rverts.shape[0] == 0:
        return np.full(bverts.shape[0], -1, np.int64)
    if method == "join":
        return _bit_join(bverts, rverts)
    if method != "structures":
        raise ValueError("unknown method %r" % (method,))
    return TriangleBitIndex(rverts, alpha).query_many(bverts)
