import time

import numpy as np

from diskpath.bit import TriangleBitIndex, bit_triangles
from diskpath.bit.structures import ChordIndex
from diskpath.geom import DEFAULT_ALPHA, min_angles, triangles_intersect_pairs
from diskpath.instances import generate
from diskpath.oracle import bit_brute

ALPHA = DEFAULT_ALPHA
rng = np.random.default_rng(3)

# criterion-6 style: splits of a generated instance, join vs brute
t0 = time.perf_counter()
for trial in range(10):
    inst = generate("triangles", 1000, seed=trial, alpha=ALPHA)
    order = rng.permutation(1000)
    bid, rid = np.sort(order[:500]), np.sort(order[500:])
    bverts, rverts = inst.verts[bid], inst.verts[rid]
    w = bit_triangles(bverts, rverts)
    exp = bit_brute(inst, bid, rid)
    got_global = np.where(w >= 0, rid[np.maximum(w, 0)], -1)
    assert np.array_equal(got_global, exp), trial
print(f"join vs bit_brute 10x500/500: ok ({time.perf_counter() - t0:.1f}s)")

# structure path at 500/500, one trial, set + witness validity
inst = generate("triangles", 1000, seed=99, alpha=ALPHA)
bverts, rverts = inst.verts[:500], inst.verts[500:]
t0 = time.perf_counter()
tbi = TriangleBitIndex(rverts, ALPHA)
t1 = time.perf_counter()
ws = tbi.query_many(bverts)
t2 = time.perf_counter()
wj = bit_triangles(bverts, rverts)
assert ((ws >= 0) == (wj >= 0)).all()
for i in np.where(ws >= 0)[0]:
    assert triangles_intersect_pairs(bverts[i][None],
                                     rverts[ws[i]][None])[0], i
print(f"structure path 500/500: ok (build {t1 - t0:.2f}s, "
      f"query {t2 - t1:.2f}s, hits={int((ws >= 0).sum())})")

# error paths
thin = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 1e-4]])
try:
    bit_triangles(thin[None], rverts)
    raise SystemExit("missing fat check")
except ValueError:
    pass
try:
    TriangleBitIndex(thin[None], ALPHA)
    raise SystemExit("missing fat check (index)")
except ValueError:
    pass

segs = np.array([[[0.0, 0.0], [1.0, 0.0]]])
ci = ChordIndex(segs, np.array([0], np.int64), ALPHA)
try:
    ci.query(np.array([[0.0, 0.0], [1.0, 0.123456]]))
    raise SystemExit("missing canonical-direction check")
except ValueError:
    pass
# vertical query crossing the horizontal data chord
assert ci.query(np.array([[0.5, -1.0], [0.5, 1.0]])) == 0
# parallel, not collinear -> none
assert ci.query(np.array([[0.0, 0.5], [1.0, 0.5]])) == -1
# collinear overlapping -> hit
assert ci.query(np.array([[0.5, 0.0], [2.0, 0.0]])) == 0
print("error paths + chord pinned cases: ok")

# degenerate scales: tiny triangles far apart, huge coordinate offsets
for off in (0.0, 1e6):
    b = np.array([[[0.0, 0.0], [1e-5, 0.0], [5e-6, 1e-5]]]) + off
    r = b + np.array([2e-6, 0.0])
    assert (min_angles(b) >= ALPHA).all()
    assert bit_triangles(b, r).tolist() == [0]
    assert TriangleBitIndex(r, ALPHA).query(b[0]) == 0
print("scale robustness: ok")
