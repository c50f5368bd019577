import sys
import time

import numpy as np

from diskpath.contraction import build_contraction, ply_of
from diskpath.instances import generate
from diskpath.sssp import FastBackend, _run

kind = sys.argv[1] if len(sys.argv) > 1 else "disks"
lo = int(sys.argv[2]) if len(sys.argv) > 2 else 14
hi = int(sys.argv[3]) if len(sys.argv) > 3 else 20

# warm the jit cache on a tiny instance first
for wk in ("disks", "triangles"):
    wi = generate(wk, 400, seed=1)
    b = FastBackend(wi)
    _run(b, [0])

prev = None
for e in range(lo, hi + 1):
    n = 1 << e
    t0 = time.perf_counter()
    inst = generate(kind, n, seed=5)
    t_gen = time.perf_counter() - t0
    t0 = time.perf_counter()
    backend = FastBackend(inst)
    t_build = time.perf_counter() - t0
    t0 = time.perf_counter()
    tree = _run(backend, [0])
    t_sssp = time.perf_counter() - t0
    total = t_build + t_sssp
    d = backend.graph.diag
    ratio = total / prev if prev else float("nan")
    reach = int(np.sum(tree.dist >= 0))
    print(f"n=2^{e} gen={t_gen:6.1f}s build={t_build:6.1f}s "
          f"sssp={t_sssp:5.1f}s total={total:6.1f}s ratio={ratio:4.2f} "
          f"k={d['crossings_k']:>9d} edges={d['edges']:>9d} "
          f"cliques={backend.n_cliques:>8d} reach={reach:>8d} "
          f"cand={tree.candidate_total:>8d}", flush=True)
    prev = total
