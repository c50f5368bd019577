"""Brute-force reference path: explicit graph, BFS, all-pairs scans."""

import numpy as np
import pytest

from diskpath import geom, oracle
from diskpath.instances import Instance, generate

# A(0,0) r1 -- B(1.8,0) r1 -- C(3.3,0) r0.8 / D(3.0,1.0) r0.9 in a triangle
# with B and C; E far away.
FIG = Instance("disks",
               centers=[(0, 0), (1.8, 0), (3.3, 0), (3.0, 1.0), (6, 3)],
               radii=[1, 1, 0.8, 0.9, 0.5])


def test_two_disk_edge():
    inst = Instance("disks", centers=[(0, 0), (1.5, 0)], radii=[1, 1])
    g = oracle.build_explicit(inst)
    assert g.edges() == [(0, 1)]


def test_disjoint_disks_no_edges():
    inst = Instance("disks", centers=[(0, 0), (5, 0), (0, 5)], radii=[1, 1, 1])
    assert oracle.build_explicit(inst).edges() == []


def test_figure_topology_edges():
    g = oracle.build_explicit(FIG)
    assert g.edges() == [(0, 1), (1, 2), (1, 3), (2, 3)]


def test_figure_bfs():
    g = oracle.build_explicit(FIG)
    dist, parent = oracle.bfs(g, 0)
    assert dist.tolist() == [0, 1, 2, 2, -1]
    assert parent.tolist() == [-1, 0, 1, 1, -1]


def test_cap_refusal():
    inst = generate("disks", 30, 0)
    with pytest.raises(ValueError):
        oracle.build_explicit(inst, cap=10)


def test_explicit_order_invariance():
    inst = generate("disks", 120, 8)
    perm = np.random.default_rng(1).permutation(inst.n)
    permuted = Instance("disks", centers=inst.centers[perm], radii=inst.radii[perm])
    g1 = oracle.build_explicit(inst)
    g2 = oracle.build_explicit(permuted)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(inst.n)
    remapped = sorted(tuple(sorted((perm[u], perm[v]))) for u, v in g2.edges())
    assert remapped == g1.edges()


def test_bfs_single_node():
    inst = Instance("disks", centers=[(0, 0)], radii=[1])
    dist, parent = oracle.bfs(oracle.build_explicit(inst), 0)
    assert dist.tolist() == [0] and parent.tolist() == [-1]


def test_bfs_chain_and_multi_source():
    inst = Instance("disks", centers=[(x, 0) for x in (0, 1.8, 3.6, 5.4)],
                    radii=[1] * 4)
    g = oracle.build_explicit(inst)
    assert oracle.bfs(g, 0)[0].tolist() == [0, 1, 2, 3]
    assert oracle.bfs(g, [0, 3])[0].tolist() == [0, 1, 1, 0]
    assert oracle.bfs(g, [0, 1, 2, 3])[0].tolist() == [0, 0, 0, 0]


def test_bfs_source_validation():
    g = oracle.build_explicit(FIG)
    with pytest.raises(ValueError):
        oracle.bfs(g, 9)
    with pytest.raises(ValueError):
        oracle.bfs(g, [])


def test_bfs_triangle_inequality_and_parents():
    inst = generate("disks", 300, 4)
    g = oracle.build_explicit(inst)
    dist, parent = oracle.bfs(g, 0)
    for u, v in g.edges():
        if dist[u] >= 0 and dist[v] >= 0:
            assert abs(dist[u] - dist[v]) <= 1
    for v in range(inst.n):
        if dist[v] > 0:
            p = parent[v]
            assert dist[p] == dist[v] - 1
            assert geom.objects_intersect(inst.object(v), inst.object(p))
            # lowest-id tie-break among previous-level neighbors
            prev = [u for u in g.neighbors(v) if dist[u] == dist[v] - 1]
            assert p == min(prev)


def test_bit_brute_entries():
    w = oracle.bit_brute(FIG, [0, 2, 4], [1, 3])
    assert w.tolist() == [1, 1, -1]
    # lowest red id wins
    w2 = oracle.bit_brute(FIG, [2], [3, 1])
    assert w2.tolist() == [1]
    assert oracle.bit_brute(FIG, [0], []).tolist() == [-1]
    assert oracle.bit_brute(FIG, [], [0]).tolist() == []


def test_bit_brute_self_pair():
    inst = Instance("disks", centers=[(0, 0), (1.0, 0)], radii=[1, 1])
    w = oracle.bit_brute(inst, [0, 1], [0, 1])
    assert w.tolist() == [0, 0]


def test_bit_brute_triangles():
    inst = generate("triangles", 120, 13)
    ids = np.arange(inst.n)
    blue = ids[::2]
    red = ids[1::2]
    w = oracle.bit_brute(inst, blue, red)
    for b, ww in zip(blue, w):
        hits = [r for r in red if geom.objects_intersect(inst.object(b), inst.object(r))]
        assert (ww == -1 and not hits) or (hits and ww == min(hits))


def test_clique_edges_brute():
    # two groups of pairwise-far disks; one cross pair intersects
    inst = Instance("disks",
                    centers=[(0, 0), (0.5, 0), (10, 0), (10.5, 0)],
                    radii=[1, 1, 1, 1])
    membership = [0, 0, 1, 1]
    assert oracle.clique_edges_brute(inst, membership) == []
    inst2 = Instance("disks",
                     centers=[(0, 0), (0.5, 0), (2.2, 0), (10.5, 0)],
                     radii=[1, 1, 1, 1])
    assert oracle.clique_edges_brute(inst2, membership) == [(0, 1)]
