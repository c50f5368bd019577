"""Clique partition, flower adjacency, and contraction graph tests."""

import math

import numpy as np
import pytest

from diskpath import oracle
from diskpath.contraction import (KIND_SINGLE, boundary_crossing_pairs,
                                  build_cliques, build_contraction,
                                  containment_pairs, flowers_of, ply_of)
from diskpath.geom import objects_intersect, point_in_disk, point_in_triangle
from diskpath.instances import Instance, generate, normalize

TWO_PI = 2.0 * math.pi


def disks(centers, radii):
    return Instance("disks", centers=np.asarray(centers, float),
                    radii=np.asarray(radii, float))


def clique_edge_set(graph):
    out = set()
    for c in range(graph.n_cliques):
        for d in graph.neighbors(c):
            out.add((min(c, int(d)), max(c, int(d))))
    return out


def assert_partition_and_stabs(graph):
    inst = graph.inst
    mem = graph.membership
    assert mem.shape == (inst.n,)
    assert (mem >= 0).all() and (mem < graph.n_cliques).all()
    counts = np.zeros(graph.n_cliques, np.int64)
    for c in range(graph.n_cliques):
        sq = graph.clique(c)
        counts[c] = len(sq.members)
        px, py = sq.stab
        for m in sq.members:
            assert mem[m] == c
            o = inst.object(int(m))
            if inst.kind == "disks":
                assert point_in_disk(px, py, o.x, o.y, o.r)
            else:
                assert point_in_triangle(o.verts, px, py)
    assert counts.sum() == inst.n


# ---------------------------------------------------------------- cliques


def test_two_far_disks_two_singletons():
    g = build_contraction(disks([[0.1, 0.1], [0.9, 0.9]], [0.05, 0.05]))
    assert g.n_cliques == 2
    assert g.diag["edges"] == 0
    assert_partition_and_stabs(g)


def test_common_point_disks_group_into_few_cliques():
    # equal disks all containing the center are assigned to a handful of
    # coarse nodes; the lattice grouping must keep the clique count
    # bounded by the occupied nodes, not by k
    rng = np.random.default_rng(0)
    k = 3000
    ang = rng.uniform(0, TWO_PI, k)
    d = rng.uniform(0, 0.2, k)
    inst = disks(np.stack([0.5 + d * np.cos(ang), 0.5 + d * np.sin(ang)], 1),
                 np.full(k, 0.2))
    for c, dd in zip(inst.centers, inst.radii):
        assert (c[0] - 0.5) ** 2 + (c[1] - 0.5) ** 2 <= dd * dd
    g = build_contraction(inst)
    assert_partition_and_stabs(g)
    occupied = len({(int(q.home_node[0]), int(q.home_node[1]))
                    for q in (g.clique(c) for c in range(g.n_cliques))})
    assert g.n_cliques <= 400 * occupied
    assert g.n_cliques <= 400


FIG1_CENTERS = [[0.18, 0.86], [0.35, 0.80], [0.42, 0.74],
                [0.35, 0.68], [0.80, 0.20]]
FIG1_RADII = [0.1, 0.1, 0.1, 0.1, 0.05]


def test_figure_one_topology():
    inst = disks(FIG1_CENTERS, FIG1_RADII)
    # coordinates must realize A-B, B-C, B-D, C-D, E isolated
    want = {(0, 1), (1, 2), (1, 3), (2, 3)}
    assert set(oracle.build_explicit(inst).edges()) == want

    g = build_contraction(inst)
    assert_partition_and_stabs(g)
    mem = g.membership
    e_clique = int(mem[4])
    assert list(g.clique(e_clique).members) == [4]
    assert len(g.neighbors(e_clique)) == 0
    # A reaches B, C, D through the contraction but never E
    seen = {int(mem[0])}
    stack = [int(mem[0])]
    while stack:
        for nb in g.neighbors(stack.pop()):
            if int(nb) not in seen:
                seen.add(int(nb))
                stack.append(int(nb))
    assert {int(mem[i]) for i in range(4)} <= seen
    assert e_clique not in seen


def test_build_cliques_standalone():
    inst, _ = normalize(generate("disks", 120, seed=2))
    trees, cliques, diag = build_cliques(inst)
    assert cliques.membership.shape == (120,)
    assert cliques.indptr[-1] == 120
    assert set(trees) == set(np.unique(cliques.grid).tolist())


# ------------------------------------------------------- crossing pairs


def test_crossing_disks_reported():
    g = build_contraction(disks([[0.4, 0.5], [0.58, 0.5]], [0.12, 0.12]))
    assert g.diag["edges_crossing"] == 1
    assert clique_edge_set(g) == {(0, 1)}


def test_nested_disks_containment_only():
    g = build_contraction(disks([[0.5, 0.5], [0.52, 0.5]], [0.3, 0.01]))
    assert g.diag["edges_crossing"] == 0
    assert g.diag["edges_containment"] == 1
    assert clique_edge_set(g) == {(0, 1)}


def brute_arc_crossings(fs):
    """All-pairs arc crossing tester over the piece arrays."""
    P = fs.n_pieces
    px = fs.stab[fs.clique_of, 0]
    py = fs.stab[fs.clique_of, 1]
    cx, cy, r = fs.geom
    ccx, ccy, cr = cx[fs.src], cy[fs.src], r[fs.src]
    span = np.where(fs.full, TWO_PI, np.mod(fs.arc1 - fs.arc0, TWO_PI))
    pairs = set()
    k = 0
    for i in range(P):
        for j in range(i + 1, P):
            if fs.clique_of[i] == fs.clique_of[j]:
                continue
            dx, dy = ccx[j] - ccx[i], ccy[j] - ccy[i]
            d = math.hypot(dx, dy)
            if d < 1e-15 or d > cr[i] + cr[j] or d < abs(cr[i] - cr[j]):
                continue
            a = (cr[i] ** 2 - cr[j] ** 2 + d * d) / (2 * d)
            h2 = cr[i] ** 2 - a * a
            if h2 <= 0:
                continue
            h = math.sqrt(h2)
            mx, my = ccx[i] + a * dx / d, ccy[i] + a * dy / d
            hits = 0
            for sgn in (1.0, -1.0):
                qx = mx + sgn * h * -dy / d
                qy = my + sgn * h * dx / d
                ok = True
                for p in (i, j):
                    if fs.full[p]:
                        continue
                    ang = math.atan2(qy - ccy[p], qx - ccx[p])
                    off = (ang - fs.arc0[p]) % TWO_PI
                    if off > span[p] + 1e-9:
                        ok = False
                if ok:
                    hits += 1
            if hits:
                a_, b_ = int(fs.clique_of[i]), int(fs.clique_of[j])
                pairs.add((min(a_, b_), max(a_, b_)))
                k += hits
    return pairs, k


def test_random_crossings_match_brute_tester():
    inst = generate("disks", 500, seed=5)
    g = build_contraction(inst)
    fs = g.flowers
    got, k, _ = boundary_crossing_pairs(fs, g.inst)
    want, k_want = brute_arc_crossings(fs)
    assert {(int(a), int(b)) for a, b in got} == want
    assert k == k_want


def brute_seg_crossings(fs):
    seg = fs.seg
    pairs = set()
    k = 0

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    for i in range(fs.n_pieces):
        a1, a2 = seg[i, :2], seg[i, 2:]
        for j in range(i + 1, fs.n_pieces):
            if fs.clique_of[i] == fs.clique_of[j]:
                continue
            b1, b2 = seg[j, :2], seg[j, 2:]
            d1 = cross(b1, b2, a1)
            d2 = cross(b1, b2, a2)
            d3 = cross(a1, a2, b1)
            d4 = cross(a1, a2, b2)
            if d1 * d2 <= 0 and d3 * d4 <= 0:
                bb_ok = (min(a1[0], a2[0]) <= max(b1[0], b2[0])
                         and min(b1[0], b2[0]) <= max(a1[0], a2[0])
                         and min(a1[1], a2[1]) <= max(b1[1], b2[1])
                         and min(b1[1], b2[1]) <= max(a1[1], a2[1]))
                if bb_ok:
                    a_, b_ = int(fs.clique_of[i]), int(fs.clique_of[j])
                    pairs.add((min(a_, b_), max(a_, b_)))
                    k += 1
    return pairs, k


def test_random_triangle_crossings_match_brute_tester():
    inst = generate("triangles", 300, seed=6)
    g = build_contraction(inst)
    got, k, _ = boundary_crossing_pairs(g.flowers, g.inst)
    want, k_want = brute_seg_crossings(g.flowers)
    assert {(int(a), int(b)) for a, b in got} == want
    assert k == k_want


def test_crossing_pairs_deduplicated():
    inst = generate("disks", 300, seed=7, profile="cluster")
    g = build_contraction(inst)
    pairs, _, _ = boundary_crossing_pairs(g.flowers, g.inst)
    seen = {(int(a), int(b)) for a, b in pairs}
    assert len(seen) == pairs.shape[0]
    assert all(a < b for a, b in seen)


# ---------------------------------------------------- containment pairs


def test_disjoint_flowers_no_containment():
    inst = disks([[0.2, 0.2], [0.8, 0.8]], [0.1, 0.1])
    g = build_contraction(inst)
    pairs = containment_pairs(g.flowers, g.trees, g.cliques)
    assert pairs.shape[0] == 0


def test_containment_superset_of_nested():
    # several tiny disks strictly inside one big disk
    rng = np.random.default_rng(8)
    ang = rng.uniform(0, TWO_PI, 6)
    d = rng.uniform(0, 0.15, 6)
    centers = np.vstack([[0.5, 0.5],
                         np.stack([0.5 + d * np.cos(ang),
                                   0.5 + d * np.sin(ang)], 1)])
    radii = np.concatenate([[0.3], np.full(6, 0.004)])
    g = build_contraction(disks(centers, radii))
    mem = g.membership
    pairs = {(int(a), int(b))
             for a, b in containment_pairs(g.flowers, g.trees, g.cliques)}
    big = int(mem[0])
    for i in range(1, 7):
        c = int(mem[i])
        if c != big:
            assert (min(big, c), max(big, c)) in pairs


# ------------------------------------------------------ full contraction


def test_chain_edges():
    inst = disks([[0.0, 0.0], [1.8, 0.0], [3.6, 0.0]], [1.0, 1.0, 1.0])
    g = build_contraction(inst)
    mem = g.membership
    ab = (min(int(mem[0]), int(mem[1])), max(int(mem[0]), int(mem[1])))
    bc = (min(int(mem[1]), int(mem[2])), max(int(mem[1]), int(mem[2])))
    assert clique_edge_set(g) == {ab, bc}


def test_all_disjoint_zero_edges():
    xs = np.linspace(0.05, 0.95, 12)
    centers = np.stack([np.repeat(xs, 12), np.tile(xs, 12)], 1)
    g = build_contraction(disks(centers, np.full(144, 0.015)))
    assert g.diag["edges"] == 0
    assert g.n_cliques == 144


@pytest.mark.parametrize("kind,n,seed,profile", [
    ("disks", 500, 1, "uniform"),
    ("disks", 400, 2, "cluster"),
    ("disks", 800, 3, "uniform"),
    ("triangles", 400, 4, "uniform"),
    ("triangles", 300, 5, "cluster"),
])
def test_edges_complete_and_sound(kind, n, seed, profile):
    inst = generate(kind, n, seed=seed, profile=profile)
    g = build_contraction(inst)
    assert_partition_and_stabs(g)
    got = clique_edge_set(g)
    want = set(oracle.clique_edges_brute(g.inst, g.membership))
    assert got == want


def test_mixed_scales_with_nested_clusters():
    # two-scale mixture: tight knots of tiny disks under a few large ones
    rng = np.random.default_rng(9)
    knots = rng.uniform(0.2, 0.8, (6, 2))
    tiny = np.concatenate([k + rng.normal(0, 0.004, (60, 2)) for k in knots])
    big = rng.uniform(0.25, 0.75, (14, 2))
    centers = np.vstack([tiny, big])
    radii = np.concatenate([rng.uniform(0.0005, 0.003, 360),
                            rng.uniform(0.08, 0.2, 14)])
    g = build_contraction(disks(centers, radii))
    assert_partition_and_stabs(g)
    assert clique_edge_set(g) == set(
        oracle.clique_edges_brute(g.inst, g.membership))


def test_piece_counts_within_caps():
    for kind, cap in (("disks", 6), ("triangles", 20)):
        inst = generate(kind, 400, seed=10, profile="cluster")
        g = build_contraction(inst)
        sizes = np.diff(g.cliques.indptr)
        pieces = np.diff(g.flowers.indptr)
        assert (pieces <= cap * sizes).all()


def test_ply_within_logarithmic_bound():
    for kind in ("disks", "triangles"):
        inst = generate(kind, 2000, seed=11)
        g = build_contraction(inst)
        p = ply_of(g)
        assert p >= 1
        assert p <= 12 * (1 + math.log2(inst.n))


def test_contraction_deterministic():
    inst = generate("disks", 600, seed=12)
    g1 = build_contraction(inst)
    g2 = build_contraction(inst)
    assert np.array_equal(g1.membership, g2.membership)
    assert np.array_equal(g1.adj_indptr, g2.adj_indptr)
    assert np.array_equal(g1.adj_list, g2.adj_list)
    assert np.array_equal(g1.cliques.stab, g2.cliques.stab)


def test_edge_soundness_member_pairs():
    inst = generate("disks", 500, seed=13)
    g = build_contraction(inst)
    inst = g.inst
    for a, b in clique_edge_set(g):
        ma = g.clique(a).members
        mb = g.clique(b).members
        assert any(
            objects_intersect(inst.object(int(u)), inst.object(int(v)))
            for u in ma for v in mb)


def test_singleton_fallbacks_still_partition():
    # degenerate thin triangles exercise the centroid fallback path
    inst = generate("triangles", 200, seed=14, alpha=0.05)
    g = build_contraction(inst)
    assert_partition_and_stabs(g)
    assert clique_edge_set(g) == set(
        oracle.clique_edges_brute(g.inst, g.membership))
