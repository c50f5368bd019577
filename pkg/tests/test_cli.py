"""End-to-end checks of the command line modes."""

import numpy as np
import pytest

from diskpath.cli import main
from diskpath.instances import (Instance, emit_instance, load_instance,
                                parse_result, save_instance)


def chain3(path):
    inst = Instance("disks", centers=[[0.0, 0.0], [1.8, 0.0], [3.6, 0.0]],
                    radii=[1.0, 1.0, 1.0])
    save_instance(str(path), inst)
    return str(path)


def test_gen_deterministic(tmp_path):
    a, b = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
    assert main(["gen", "--kind", "disks", "--n", "30", "--seed", "7",
                 "--out", a]) == 0
    assert main(["gen", "--kind", "disks", "--n", "30", "--seed", "7",
                 "--out", b]) == 0
    assert open(a, "rb").read() == open(b, "rb").read()


def test_gen_roundtrip(tmp_path):
    f = str(tmp_path / "t.txt")
    assert main(["gen", "--kind", "triangles", "--n", "25", "--seed", "3",
                 "--profile", "cluster", "--out", f]) == 0
    inst = load_instance(f)
    assert inst.kind == "triangles" and inst.n == 25
    assert emit_instance(inst) == open(f).read()


def test_solve_brute_chain_stdout(tmp_path, capsys):
    f = chain3(tmp_path / "c.txt")
    assert main(["solve", "--input", f, "--source", "0",
                 "--algo", "brute"]) == 0
    assert capsys.readouterr().out == "0 0 -1\n1 1 0\n2 2 1\n"


def test_solve_fast_matches_brute(tmp_path):
    f = str(tmp_path / "i.txt")
    main(["gen", "--kind", "disks", "--n", "120", "--seed", "5", "--out", f])
    rf, rb = str(tmp_path / "f.txt"), str(tmp_path / "b.txt")
    assert main(["solve", "--input", f, "--source", "3", "--out", rf]) == 0
    assert main(["solve", "--input", f, "--source", "3", "--algo", "brute",
                 "--out", rb]) == 0
    df, _ = parse_result(open(rf).read())
    db, _ = parse_result(open(rb).read())
    assert np.array_equal(df, db)


def test_solve_multi_source_union(tmp_path, capsys):
    inst = Instance("disks",
                    centers=[[0.0, 0.0], [1.8, 0.0], [3.6, 0.0], [5.4, 0.0]],
                    radii=[1.0, 1.0, 1.0, 1.0])
    f = str(tmp_path / "c4.txt")
    save_instance(f, inst)
    assert main(["solve", "--input", f, "--source", "0",
                 "--sources", "3"]) == 0
    dist, _ = parse_result(capsys.readouterr().out)
    assert dist.tolist() == [0, 1, 1, 0]


def test_solve_needs_some_source(tmp_path, capsys):
    f = chain3(tmp_path / "c.txt")
    assert main(["solve", "--input", f]) == 1
    assert "source" in capsys.readouterr().err


def test_solve_asserts_when_requested(tmp_path, monkeypatch):
    monkeypatch.setenv("DISKPATH_ASSERT", "1")
    f = str(tmp_path / "i.txt")
    main(["gen", "--kind", "triangles", "--n", "60", "--seed", "2",
          "--out", f])
    assert main(["solve", "--input", f, "--source", "1",
                 "--out", str(tmp_path / "r.txt")]) == 0


@pytest.mark.parametrize("kind", ["disks", "triangles"])
def test_verify_ok(tmp_path, kind, capsys):
    f = str(tmp_path / "i.txt")
    main(["gen", "--kind", kind, "--n", "150", "--seed", "11", "--out", f])
    assert main(["verify", "--input", f, "--source", "4"]) == 0
    assert "ok" in capsys.readouterr().out


def test_verify_rejects_bad_source(tmp_path, capsys):
    f = chain3(tmp_path / "c.txt")
    assert main(["verify", "--input", f, "--source", "9"]) == 1
    assert "error" in capsys.readouterr().err


def test_missing_input_fails(tmp_path, capsys):
    assert main(["solve", "--input", str(tmp_path / "nope.txt"),
                 "--source", "0"]) == 1
    assert capsys.readouterr().err.startswith("error")


def test_bench_csv(tmp_path):
    out = str(tmp_path / "b.csv")
    assert main(["bench", "--kind", "disks", "--sizes", "40,90",
                 "--seeds", "2", "--csv", out]) == 0
    rows = [ln.split(",") for ln in open(out).read().splitlines()]
    assert rows[0] == list(("kind", "n", "seed", "build_ms", "sssp_ms",
                            "edges_H", "cliques", "max_ply", "crossings_k",
                            "candidate_sum"))
    body = rows[1:]
    assert len(body) == 4
    for r in body:
        assert r[0] == "disks"
        assert int(r[9]) <= 3 * int(r[1])


def test_bench_deterministic_counters(tmp_path):
    a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
    for out in (a, b):
        assert main(["bench", "--kind", "triangles", "--sizes", "60",
                     "--seeds", "2", "--csv", out]) == 0
    strip = lambda p: [[c for i, c in enumerate(ln.split(","))
                        if i not in (3, 4)]
                       for ln in open(p).read().splitlines()]
    assert strip(a) == strip(b)


def test_bad_flag_exits_via_argparse(tmp_path):
    with pytest.raises(SystemExit):
        main(["gen", "--kind", "squares", "--n", "3",
              "--out", str(tmp_path / "x.txt")])
