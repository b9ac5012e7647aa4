import json

import pytest

from shallowtree.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, EXIT_VERIFY, main
from shallowtree.datasets import (generate_dataset, generate_queries, read_results, write_points,
                                  write_queries)
from shallowtree.geom import oracle_report


@pytest.fixture
def workdir(tmp_path):
    ds = generate_dataset("clustered", 200, 4)
    write_points(tmp_path / "pts.txt", ds.points)
    queries = generate_queries(ds, 25, 5)
    write_queries(tmp_path / "q.txt", queries)
    return tmp_path, ds, queries


@pytest.mark.parametrize("structure", ["linear", "fast"])
def test_build_query_round_trip(workdir, structure, capsys):
    d, ds, queries = workdir
    idx = d / "idx.rrk"
    assert main(["build", "--input", str(d / "pts.txt"), "--structure", structure,
                 "--out", str(idx)]) == EXIT_OK
    assert main(["query", "--index", str(idx), "--queries", str(d / "q.txt"),
                 "--out", str(d / "r.txt"), "--stats", str(d / "s.json")]) == EXIT_OK
    got = [set(r) for r in read_results(d / "r.txt")]
    assert got == [oracle_report(ds.points, q) for q in queries]
    stats = json.loads((d / "s.json").read_text())
    assert len(stats["queries"]) == len(queries) and stats["structure"] == structure


def test_verify_and_stats(workdir, capsys):
    d, _, _ = workdir
    idx = d / "idx.rrk"
    main(["build", "--input", str(d / "pts.txt"), "--rho", "2", "--t0", "8", "--out", str(idx)])
    assert main(["verify", "--index", str(idx), "--queries", "20"]) == EXIT_OK
    assert main(["verify", "--input", str(d / "pts.txt"), "--t", "1,8"]) == EXIT_OK
    capsys.readouterr()
    assert main(["stats", "--index", str(idx)]) == EXIT_OK
    info = json.loads(capsys.readouterr().out)
    assert info["rho"] == 2 and info["t0"] == 8 and info["space"]["design_bits_total"] > 0


def test_verify_reports_corruption(workdir, monkeypatch):
    d, _, _ = workdir
    idx = d / "idx.rrk"
    main(["build", "--input", str(d / "pts.txt"), "--rho", "2", "--t0", "8", "--out", str(idx)])
    from shallowtree import audit, cli, serialize
    meta, index, ranks = serialize.read_index_file(idx)
    audit.inject_fault(index, "decode")
    monkeypatch.setattr(cli, "read_index_file", lambda path: (meta, index, ranks))
    assert main(["verify", "--index", str(idx)]) == EXIT_VERIFY


def test_bench_report(tmp_path):
    out = tmp_path / "bench.json"
    assert main(["bench", "--sizes", "32", "--kinds", "uniform", "--queries", "5",
                 "--report", str(out)]) == EXIT_OK
    rows = json.loads(out.read_text())
    assert {r["structure"] for r in rows} == {"linear", "fast"}


def test_exit_codes(workdir, tmp_path):
    d, _, _ = workdir
    assert main(["build", "--input", str(tmp_path / "missing.txt"), "--out", "x"]) == EXIT_IO
    assert main(["build", "--input", str(d / "pts.txt"), "--rho", "1",
                 "--out", str(d / "x")]) == EXIT_CONFIG
    (d / "junk.rrk").write_bytes(b"not an index")
    assert main(["stats", "--index", str(d / "junk.rrk")]) == EXIT_IO
    assert main(["bench", "--kinds", "spiral"]) == EXIT_CONFIG
    assert main(["bench", "--structures", "quadtree"]) == EXIT_CONFIG
    assert main(["nonsense"]) == EXIT_CONFIG
    assert main(["verify", "--input", str(d / "pts.txt"), "--max-n", "10"]) == EXIT_CONFIG
    bad = d / "bad.txt"
    bad.write_text("1 2 3\n")
    assert main(["build", "--input", str(bad), "--out", str(d / "y")]) == EXIT_IO
