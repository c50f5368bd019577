import time

import numpy as np

from diskpath.bit import DiskIndex, aw_nearest, bit_disks
from diskpath.geom import DISK_TOL

rng = np.random.default_rng(7)

# pinned example: B={disk((0,0),1)}, R={disk((1,1),0.5)} -> witness 0
w = bit_disks(np.array([0.0]), np.array([0.0]), np.array([1.0]),
              np.array([1.0]), np.array([1.0]), np.array([0.5]))
assert w.tolist() == [0], w

# empty red set
w = bit_disks(np.array([0.0]), np.array([0.0]), np.array([1.0]),
              np.array([]), np.array([]), np.array([]))
assert w.tolist() == [-1], w

# random vs brute predicate
for trial in range(30):
    nb = int(rng.integers(1, 60))
    nr = int(rng.integers(1, 60))
    bx, by = rng.random(nb), rng.random(nb)
    rx, ry = rng.random(nr), rng.random(nr)
    br = rng.random(nb) * 0.2 + 1e-4
    rr = rng.random(nr) * 0.2 + 1e-4
    got = bit_disks(bx, by, br, rx, ry, rr)
    d2 = (bx[:, None] - rx) ** 2 + (by[:, None] - ry) ** 2
    s2 = (br[:, None] + rr) ** 2 * (1.0 + DISK_TOL)
    hit = d2 <= s2
    exp = np.where(hit.any(axis=1), hit.argmax(axis=1), -1)
    assert np.array_equal(got, exp), (trial, got, exp)
print("bit_disks random vs brute: ok")

# aw_nearest exactness
for trial in range(50):
    nr = int(rng.integers(1, 200))
    rx, ry = rng.random(nr), rng.random(nr)
    rr = rng.random(nr) * 0.3
    qx, qy = rng.random(), rng.random()
    i, d = aw_nearest(qx, qy, rx, ry, rr)
    dist = np.hypot(qx - rx, qy - ry) - rr
    j = int(dist.argmin())
    assert abs(d - dist[j]) <= 1e-12, (trial, d, dist[j])
    assert abs(dist[i] - dist[j]) <= 1e-12
print("aw_nearest vs scan: ok")

# expansion soft bound
n = 1 << 17
rx, ry = rng.random(n), rng.random(n)
rr = rng.random(n) * 0.01
idx = DiskIndex(rx, ry, rr)
pops = []
for _ in range(200):
    _, _, p = idx.nearest(rng.random(), rng.random())
    pops.append(p)
bound = 30 * np.log2(n)
print(f"expansions n=2^17: mean={np.mean(pops):.1f} max={max(pops)} "
      f"soft bound={bound:.1f}")

# throughput
nb = 1 << 17
bx, by = rng.random(nb), rng.random(nb)
br = rng.random(nb) * 0.01
t0 = time.perf_counter()
idx2 = DiskIndex(rx, ry, rr)
t1 = time.perf_counter()
w = idx2.query(bx, by, br)
t2 = time.perf_counter()
print(f"build {t1 - t0:.2f}s, query 2^17 blues {t2 - t1:.2f}s, "
      f"hits={int((w >= 0).sum())}")
