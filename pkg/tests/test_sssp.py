"""BFS engine tests: pinned topologies, oracle equality, budget, locality."""

import numpy as np
import pytest

from diskpath import _fastpath, oracle
from diskpath.geom import objects_intersect
from diskpath.instances import Instance, generate
from diskpath.sssp import (UNREACHABLE, BruteBackend, FastBackend,
                           _frontier_cliques, candidate_set, sssp,
                           sssp_multi)


def disks(centers, radii):
    return Instance("disks", centers=np.asarray(centers, float),
                    radii=np.asarray(radii, float))


def chain4():
    # unit disks on a line; consecutive gaps 1.8 < 2, skips 3.6 > 2
    return disks([[0.0, 0.0], [1.8, 0.0], [3.6, 0.0], [5.4, 0.0]],
                 [1.0, 1.0, 1.0, 1.0])


def assert_valid_tree(inst, tree, sources):
    """Structural witness check: parents form shortest-path chains."""
    g = oracle.build_explicit(inst)
    dist, parent = tree.dist, tree.parent
    src = np.zeros(inst.n, bool)
    src[list(sources)] = True
    assert np.all(dist[src] == 0)
    assert np.all(parent[src] == -1)
    for v in range(inst.n):
        if src[v]:
            continue
        if dist[v] == UNREACHABLE:
            assert parent[v] == -1
            continue
        p = int(parent[v])
        assert 0 <= p < inst.n
        assert dist[p] == dist[v] - 1
        assert v in g.neighbors(p)
    # level decomposition mirrors dist
    for ell, row in enumerate(tree.levels):
        assert np.array_equal(np.sort(row), np.nonzero(dist == ell)[0])
    assert len(tree.levels) == (dist.max() + 1 if dist.max() >= 0 else 0)


# ---------------------------------------------------------------- pinned


def test_single_object():
    t = sssp(disks([[0.5, 0.5]], [0.1]), 0)
    assert t.dist.tolist() == [0]
    assert t.parent.tolist() == [-1]
    assert len(t.levels) == 1


def test_chain_distances():
    t = sssp(chain4(), 0)
    assert t.dist.tolist() == [0, 1, 2, 3]
    assert t.parent.tolist() == [-1, 0, 1, 2]
    assert t.unreachable.size == 0


def test_edge_triangle_isolated():
    # A-B edge, B-C-D mutual triangle, E alone; A is the source
    inst = disks([[0.0, 0.0], [1.8, 0.0], [3.4, 0.6], [3.4, -0.6],
                  [9.0, 9.0]],
                 [1.0, 1.0, 1.0, 1.0, 0.5])
    g = oracle.build_explicit(inst)
    assert g.edges() == [(0, 1), (1, 2), (1, 3), (2, 3)]
    t = sssp(inst, 0)
    assert t.dist.tolist() == [0, 1, 2, 2, UNREACHABLE]
    od, _ = oracle.bfs(g, [0])
    assert np.array_equal(t.dist, od)
    assert t.unreachable.tolist() == [4]
    assert_valid_tree(inst, t, [0])


def test_source_id_checked():
    inst = chain4()
    with pytest.raises(ValueError):
        sssp(inst, -1)
    with pytest.raises(ValueError):
        sssp(inst, 4)
    with pytest.raises(ValueError):
        sssp_multi(inst, [])
    with pytest.raises(ValueError):
        sssp_multi(inst, [0, 7])


# ---------------------------------------------------------------- multi


def test_multi_chain_ends():
    t = sssp_multi(chain4(), [0, 3])
    assert t.dist.tolist() == [0, 1, 1, 0]
    assert_valid_tree(chain4(), t, [0, 3])


def test_multi_all_sources():
    inst = generate("disks", 60, seed=5)
    t = sssp_multi(inst, np.arange(60))
    assert np.all(t.dist == 0)
    assert np.all(t.parent == -1)
    assert len(t.levels) == 1


def test_multi_duplicate_sources_ok():
    t = sssp_multi(chain4(), [2, 2, 0])
    assert t.dist.tolist() == [0, 1, 0, 1]


@pytest.mark.parametrize("kind,seed", [("disks", 11), ("disks", 12),
                                       ("triangles", 13)])
def test_multi_matches_oracle(kind, seed):
    inst = generate(kind, 150, seed=seed)
    rng = np.random.default_rng(seed)
    srcs = rng.choice(150, size=4, replace=False)
    t = sssp_multi(inst, srcs)
    od, _ = oracle.bfs(oracle.build_explicit(inst), srcs)
    assert np.array_equal(t.dist, od)
    assert_valid_tree(inst, t, srcs)


# ---------------------------------------------------------------- random


@pytest.mark.parametrize("kind", ["disks", "triangles"])
@pytest.mark.parametrize("profile", ["uniform", "cluster", "path"])
@pytest.mark.parametrize("n,seed", [(40, 1), (150, 2), (400, 3)])
def test_matches_oracle(kind, profile, n, seed):
    inst = generate(kind, n, seed=seed, profile=profile)
    src = seed % n
    t = sssp(inst, src)
    od, _ = oracle.bfs(oracle.build_explicit(inst), [src])
    assert np.array_equal(t.dist, od)
    assert_valid_tree(inst, t, [src])
    assert t.candidate_total <= 3 * n


def test_brute_backend_agrees():
    inst = generate("disks", 200, seed=21)
    a = sssp(inst, 7)
    b = sssp(inst, 7, backend=BruteBackend(inst))
    assert np.array_equal(a.dist, b.dist)
    assert_valid_tree(inst, b, [7])


def test_plain_route_matches_fused(monkeypatch):
    # same backend, compiled walk versus the interpreted one
    inst = generate("triangles", 250, seed=31)
    backend = FastBackend(inst)
    fused = sssp(inst, 3, backend=backend)
    monkeypatch.setattr(_fastpath, "HAVE_NUMBA", False)
    plain = sssp(inst, 3, backend=backend)
    assert np.array_equal(fused.dist, plain.dist)
    assert np.array_equal(fused.parent, plain.parent)
    assert fused.candidate_total == plain.candidate_total


# ---------------------------------------------------------------- candidates


def test_candidates_empty_after_isolated_source():
    inst = disks([[0.1, 0.1], [0.9, 0.9]], [0.05, 0.05])
    backend = FastBackend(inst)
    ready = np.zeros(2, bool)
    ready[0] = True
    stamp = np.full(backend.n_cliques, -1, np.int64)
    cliques = _frontier_cliques(backend.membership, np.array([0]), stamp, 0)
    nstamp = np.full(backend.n_cliques, -1, np.int64)
    assert candidate_set(backend, cliques, ready, nstamp, 0).size == 0


def test_candidates_cover_neighbor_members():
    # star: center intersects three leaves that miss each other
    inst = disks([[0.0, 0.0], [1.5, 0.0], [-1.5, 0.0], [0.0, 1.5]],
                 [1.0, 0.6, 0.6, 0.6])
    backend = BruteBackend(inst)
    ready = np.zeros(4, bool)
    ready[0] = True
    stamp = np.full(backend.n_cliques, -1, np.int64)
    cand = candidate_set(backend, np.array([0]), ready, stamp, 0)
    assert sorted(cand.tolist()) == [1, 2, 3]


def test_candidates_include_source_co_members():
    # pick a clique with several members; its not-ready co-members must
    # surface at the very first iteration
    inst = generate("disks", 200, seed=4, profile="cluster")
    backend = FastBackend(inst)
    sizes = np.bincount(backend.membership, minlength=backend.n_cliques)
    c = int(sizes.argmax())
    assert sizes[c] >= 2
    members = backend.graph.cliques.members_of(c)
    src = int(members[0])
    ready = np.zeros(inst.n, bool)
    ready[src] = True
    stamp = np.full(backend.n_cliques, -1, np.int64)
    cand = set(candidate_set(backend, np.array([c]), ready, stamp,
                             0).tolist())
    assert set(int(m) for m in members[1:]) <= cand
    assert src not in cand


@pytest.mark.parametrize("kind,seed", [("disks", 41), ("triangles", 42)])
def test_candidates_cover_next_level(kind, seed):
    """Every true next-level object shows up among the candidates."""
    inst = generate(kind, 300, seed=seed)
    backend = FastBackend(inst)
    od, _ = oracle.bfs(oracle.build_explicit(inst), [0])
    top = od.max()
    for ell in range(top):
        front = np.nonzero(od == ell)[0]
        ready = (od >= 0) & (od <= ell)
        fstamp = np.full(backend.n_cliques, -1, np.int64)
        nstamp = np.full(backend.n_cliques, -1, np.int64)
        cliques = _frontier_cliques(backend.membership, front, fstamp, ell)
        cand = set(candidate_set(backend, cliques, ready, nstamp,
                                 ell).tolist())
        want = set(np.nonzero(od == ell + 1)[0].tolist())
        assert want <= cand


# ---------------------------------------------------------------- locality


def touched_cliques(backend, levels):
    """Closed contraction neighborhood of each level's clique set."""
    out = []
    for row in levels:
        seen = set(int(c) for c in backend.membership[row])
        for c in list(seen):
            seen.update(int(d) for d in backend.graph.neighbors(c))
        out.append(seen)
    return out


@pytest.mark.parametrize("kind,seed", [("disks", 51), ("triangles", 52)])
def test_clique_locality(kind, seed):
    """Touched cliques sit within two levels of the frontier that saw them,
    and objects in adjacent cliques differ by at most 3 in distance."""
    inst = generate(kind, 350, seed=seed)
    backend = FastBackend(inst)
    t = sssp(inst, 0, backend=backend)
    od, _ = oracle.bfs(oracle.build_explicit(inst), [0])
    assert np.array_equal(t.dist, od)
    cd = np.full(backend.n_cliques, -1, np.int64)
    for c in range(backend.n_cliques):
        dd = od[backend.graph.cliques.members_of(c)]
        if np.all(dd >= 0):
            cd[c] = dd.min()
    for ell, seen in enumerate(touched_cliques(backend, t.levels)):
        for c in seen:
            if cd[c] >= 0:
                assert ell - 2 <= cd[c] <= ell + 2
    g = backend.graph
    for c in range(backend.n_cliques):
        dc = od[g.cliques.members_of(c)]
        for d in g.neighbors(c):
            dd = od[g.cliques.members_of(int(d))]
            if dc.min() >= 0 and dd.min() >= 0:
                assert dc.max() - dd.min() <= 3


def test_budget_reported():
    inst = generate("disks", 500, seed=61, profile="cluster")
    t = sssp(inst, 0)
    assert 0 < t.candidate_total <= 3 * 500
