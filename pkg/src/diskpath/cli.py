"""Command line frontend: generate, solve, verify, and benchmark.

Exit status is 0 on success and 1 on I/O errors, verification
mismatches, or invariant failures. Set DISKPATH_ASSERT=1 to re-check
every emitted tree against the geometric intersection predicate.
"""

import argparse
import csv
import os
import sys
import time

import numpy as np

from .contraction import ply_of
from .geom import objects_intersect
from .instances import format_result, generate, load_instance, save_instance
from .sssp import UNREACHABLE, BruteBackend, FastBackend, sssp_multi

_BENCH_COLUMNS = ("kind", "n", "seed", "build_ms", "sssp_ms", "edges_H",
                  "cliques", "max_ply", "crossings_k", "candidate_sum")


def _size_list(text):
    try:
        sizes = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("sizes must be integers")
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("need positive sizes")
    return sizes


def _check_witnesses(inst, tree, sources):
    """Index of the first object whose tree entry is inconsistent, or -1."""
    src = set(int(s) for s in sources)
    for v in range(inst.n):
        d, p = int(tree.dist[v]), int(tree.parent[v])
        if v in src:
            ok = d == 0 and p == -1
        elif d == UNREACHABLE:
            ok = p == -1
        else:
            ok = (0 <= p < inst.n and int(tree.dist[p]) == d - 1
                  and objects_intersect(inst.object(v), inst.object(p)))
        if not ok:
            return v
    return -1


def _maybe_assert(inst, tree, sources):
    if os.environ.get("DISKPATH_ASSERT") != "1":
        return
    bad = _check_witnesses(inst, tree, sources)
    if bad >= 0:
        raise AssertionError("inconsistent tree entry at object %d" % bad)


def _source_ids(args):
    ids = []
    if args.source is not None:
        ids.append(args.source)
    if args.sources:
        ids.extend(int(tok) for tok in args.sources.split(",") if tok.strip())
    if not ids:
        raise ValueError("need --source or --sources")
    return ids


def _cmd_gen(args):
    kwargs = {} if args.alpha is None else {"alpha": args.alpha}
    inst = generate(args.kind, args.n, seed=args.seed,
                    profile=args.profile, **kwargs)
    save_instance(args.out, inst)
    return 0


def _cmd_solve(args):
    inst = load_instance(args.input)
    ids = _source_ids(args)
    backend = BruteBackend(inst) if args.algo == "brute" \
        else FastBackend(inst)
    tree = sssp_multi(inst, ids, backend=backend)
    _maybe_assert(inst, tree, ids)
    text = format_result(tree.dist, tree.parent)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args):
    inst = load_instance(args.input)
    fast = sssp_multi(inst, [args.source])
    brute = sssp_multi(inst, [args.source], backend=BruteBackend(inst))
    if not np.array_equal(fast.dist, brute.dist):
        bad = int(np.nonzero(fast.dist != brute.dist)[0][0])
        print("verify: distance mismatch at object %d (fast %d, brute %d)"
              % (bad, fast.dist[bad], brute.dist[bad]), file=sys.stderr)
        return 1
    bad = _check_witnesses(inst, fast, [args.source])
    if bad >= 0:
        print("verify: invalid witness chain at object %d" % bad,
              file=sys.stderr)
        return 1
    reach = int(np.sum(fast.dist >= 0))
    print("verify: ok, %d objects, %d reachable, eccentricity %d"
          % (inst.n, reach, int(fast.dist.max())))
    return 0


def _cmd_bench(args):
    rows = []
    for n in args.sizes:
        for seed in range(args.seeds):
            inst = generate(args.kind, n, seed=seed)
            t0 = time.monotonic()
            backend = FastBackend(inst)
            t1 = time.monotonic()
            tree = sssp_multi(inst, [0], backend=backend)
            t2 = time.monotonic()
            _maybe_assert(inst, tree, [0])
            if tree.candidate_total > 3 * n:
                raise AssertionError("candidate_sum %d above 3n on n=%d"
                                     % (tree.candidate_total, n))
            g = backend.graph
            rows.append((args.kind, n, seed,
                         "%.3f" % (1e3 * (t1 - t0)),
                         "%.3f" % (1e3 * (t2 - t1)),
                         g.diag["edges"], g.n_cliques, ply_of(g),
                         g.diag["crossings_k"], tree.candidate_total))
    with open(args.csv, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_BENCH_COLUMNS)
        writer.writerows(rows)
    return 0


def _build_parser():
    p = argparse.ArgumentParser(
        prog="diskpath",
        description="Shortest-path trees on disk and fat-triangle "
                    "intersection graphs without building the edge set.")
    sub = p.add_subparsers(dest="mode", required=True)

    g = sub.add_parser("gen", help="write a random instance file")
    g.add_argument("--kind", choices=("disks", "triangles"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--profile", choices=("uniform", "cluster", "path"),
                   default="uniform")
    g.add_argument("--alpha", type=float, default=None,
                   help="triangle fatness angle in radians")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("solve", help="compute one shortest-path tree")
    s.add_argument("--input", required=True)
    s.add_argument("--source", type=int, default=None)
    s.add_argument("--sources", default=None,
                   help="comma separated extra source ids")
    s.add_argument("--algo", choices=("fast", "brute"), default="fast")
    s.add_argument("--out", default=None,
                   help="result path; stdout when omitted")
    s.set_defaults(func=_cmd_solve)

    v = sub.add_parser("verify",
                       help="diff the fast solver against the oracle")
    v.add_argument("--input", required=True)
    v.add_argument("--source", type=int, default=0)
    v.set_defaults(func=_cmd_verify)

    b = sub.add_parser("bench", help="timing and size counters as CSV")
    b.add_argument("--kind", choices=("disks", "triangles"), required=True)
    b.add_argument("--sizes", type=_size_list, required=True,
                   help="comma separated instance sizes")
    b.add_argument("--seeds", type=int, default=1,
                   help="seeds 0..k-1 per size")
    b.add_argument("--csv", required=True)
    b.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except AssertionError as exc:
        print("invariant violated: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
