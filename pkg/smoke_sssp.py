import time

import numpy as np

from diskpath import BruteBackend, FastBackend, sssp, sssp_multi
from diskpath.instances import Instance, generate
from diskpath.oracle import bfs, build_explicit

# chain of 4 unit disks
inst = Instance("disks", centers=[[0, 0], [1.8, 0], [3.6, 0], [5.4, 0]],
                radii=[1, 1, 1, 1])
t = sssp(inst, 0)
assert t.dist.tolist() == [0, 1, 2, 3], t.dist
assert t.parent.tolist() == [-1, 0, 1, 2]
t2 = sssp_multi(inst, [0, 3])
assert t2.dist.tolist() == [0, 1, 1, 0], t2.dist

# Figure-like topology: A-B edge, B-C-D triangle, E isolated
inst = Instance("disks",
                centers=[[0.18, 0.86], [0.35, 0.80], [0.42, 0.74],
                         [0.35, 0.68], [0.80, 0.20]],
                radii=[0.1, 0.1, 0.1, 0.1, 0.05])
t = sssp(inst, 0)
assert t.dist.tolist() == [0, 1, 2, 2, -1], t.dist
assert t.unreachable.tolist() == [4]

# brute backend agrees
tb = sssp(inst, 0, backend=BruteBackend(inst))
assert np.array_equal(t.dist, tb.dist)
assert np.array_equal(t.parent, tb.parent)

# randoms vs oracle, both kinds
rng = np.random.default_rng(0)
for kind in ("disks", "triangles"):
    for trial in range(12):
        n = int(rng.integers(5, 400))
        kw = {"alpha": np.pi / 6} if kind == "triangles" else {}
        inst = generate(kind, n, seed=trial * 7 + 1, **kw)
        src = int(rng.integers(n))
        t = sssp(inst, src)
        g = build_explicit(inst)
        d, p = bfs(g, [src])
        assert np.array_equal(t.dist, d), (kind, trial, n)
        assert np.array_equal(t.parent, p), (kind, trial, n)
        assert t.candidate_total <= 3 * n
        # multi-source
        k = int(rng.integers(1, min(n, 5) + 1))
        srcs = rng.choice(n, size=k, replace=False)
        tm = sssp_multi(inst, srcs)
        dm, _ = bfs(g, srcs)
        assert np.array_equal(tm.dist, dm), (kind, trial)
    print(f"{kind}: 12 random instances vs oracle ok")

# errors
try:
    sssp(inst, -1)
    raise SystemExit("missing source check")
except ValueError:
    pass
try:
    sssp_multi(inst, [])
    raise SystemExit("missing empty-sources check")
except ValueError:
    pass
print("error paths ok")

# timing probe, medium size
inst = generate("disks", 1 << 16, seed=1)
t0 = time.perf_counter()
be = FastBackend(inst)
t1 = time.perf_counter()
tree = sssp(inst, 0, backend=be)
t2 = time.perf_counter()
print(f"n=2^16 disks: build {t1 - t0:.2f}s, sssp {t2 - t1:.2f}s, "
      f"levels={len(tree.levels)}, reach={int((tree.dist >= 0).sum())}, "
      f"cand={tree.candidate_total} (3n={3 * inst.n})")
