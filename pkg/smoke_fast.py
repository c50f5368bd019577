import numpy as np

import diskpath._fastpath as fp
import diskpath.contraction as con
from diskpath import buckets
from diskpath.instances import generate, normalize
from diskpath.sssp import FastBackend, BruteBackend, sssp, sssp_multi

assert fp.HAVE_NUMBA

rng = np.random.default_rng(7)
for trial in range(40):
    kind = ("disks", "triangles")[trial % 2]
    profile = ("uniform", "cluster", "path")[trial % 3]
    n = int(rng.integers(2, 400))
    inst = generate(kind, n, profile=profile, seed=1000 + trial)
    nin, _ = normalize(inst)
    trees, cliques, diag = con.build_cliques(nin)
    fs = con.flowers_of(nin, cliques)

    # A/B the crossing join
    p1, k1, d1 = con.boundary_crossing_pairs(fs, nin)
    p2, k2, d2 = con.boundary_crossing_pairs(
        fs, nin, piece_pairs=buckets.self_join(fs.bbox))
    assert np.array_equal(p1, p2), (trial, kind, n, "pairs")
    assert k1 == k2, (trial, kind, n, k1, k2)
    # numpy default path (diag counts included)
    fp.HAVE_NUMBA = False
    p3, k3, d3 = con.boundary_crossing_pairs(fs, nin)
    fp.HAVE_NUMBA = True
    assert np.array_equal(p1, p3) and k1 == k3
    assert d1["piece_pairs"] == d3["piece_pairs"], (trial, d1, d3)
    assert d1["rescued"] == d3["rescued"], (trial, d1, d3)

    # A/B the containment walk on stab points + random queries
    qx = np.concatenate([cliques.stab[:, 0], rng.uniform(0, 1, 50)])
    qy = np.concatenate([cliques.stab[:, 1], rng.uniform(0, 1, 50)])
    w1 = con._point_flower_pairs(fs, trees, cliques, qx, qy)
    fp.HAVE_NUMBA = False
    w2 = con._point_flower_pairs(fs, trees, cliques, qx, qy)
    fp.HAVE_NUMBA = True
    assert np.array_equal(w1[0], w2[0]) and np.array_equal(w1[1], w2[1]), \
        (trial, kind, n, w1[0].shape, w2[0].shape)

    # A/B adjacency
    if p1.shape[0]:
        a1 = fp.adjacency(cliques.n_cliques, p1)
        fp.HAVE_NUMBA = False
        a2 = con._adjacency(cliques.n_cliques, p1)
        fp.HAVE_NUMBA = True
        assert np.array_equal(a1[0], a2[0]) and np.array_equal(a1[1], a2[1])

    # full pipeline equality, fused vs plain
    g1 = con.build_contraction(inst)
    fp.HAVE_NUMBA = False
    g2 = con.build_contraction(inst)
    fp.HAVE_NUMBA = True
    assert g1.diag == g2.diag, (trial, g1.diag, g2.diag)
    assert np.array_equal(g1.adj_indptr, g2.adj_indptr)
    assert np.array_equal(g1.adj_list, g2.adj_list)

    # sssp equality across fused/plain and vs brute backend
    src = int(rng.integers(0, n))
    t1 = sssp(inst, src)
    fp.HAVE_NUMBA = False
    t2 = sssp(inst, src)
    fp.HAVE_NUMBA = True
    assert np.array_equal(t1.dist, t2.dist)
    assert np.array_equal(t1.parent, t2.parent)
    assert t1.candidate_total == t2.candidate_total
    tb = sssp(inst, src, backend=BruteBackend(inst))
    assert np.array_equal(t1.dist, tb.dist)
    srcs = rng.integers(0, n, size=min(3, n))
    m1 = sssp_multi(inst, srcs)
    mb = sssp_multi(inst, srcs, backend=BruteBackend(inst))
    assert np.array_equal(m1.dist, mb.dist)
    print(f"trial {trial:2d} {kind:9s} {profile:7s} n={n:4d} "
          f"k={k1:6d} edges={g1.diag['edges']:6d} OK")
print("all fused-vs-plain comparisons passed")
