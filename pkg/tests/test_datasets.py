from collections import Counter

import pytest

from shallowtree.datasets import (KINDS, Dataset, generate_dataset, generate_queries, read_dataset,
                                  read_points, read_queries, read_results, write_points,
                                  write_queries, write_results)
from shallowtree.geom import Point4, Query5, oracle_report


def test_diagonal_four():
    ds = generate_dataset("diagonal", 4)
    assert [p[:4] for p in ds.points] == [(i, i, i, i) for i in range(1, 5)]


def test_uniform_is_reproducible(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    write_points(a, generate_dataset("uniform", 1000, 7).points)
    write_points(b, generate_dataset("uniform", 1000, 7).points)
    assert a.read_bytes() == b.read_bytes()
    write_points(b, generate_dataset("uniform", 1000, 8).points)
    assert a.read_bytes() != b.read_bytes()


@pytest.mark.parametrize("n", [8, 100, 1000])
def test_adversarial_duplicates_tie_heavily(n):
    ds = generate_dataset("adversarial-duplicates", n, 3)
    counts = Counter(p.x for p in ds.points)
    tied = sum(c for c in counts.values() if c > 1)
    assert tied >= n / 2


@pytest.mark.parametrize("kind", KINDS)
def test_every_kind_rank_reduces(kind):
    ds = generate_dataset(kind, 300, 1)
    assert ds.n == 300 and len(ds.rank_points) == 300
    for q in generate_queries(ds, 30, 2):
        assert oracle_report(ds.points, q) == oracle_report(ds.rank_points, ds.to_rank_query(q))


def test_bad_arguments():
    with pytest.raises(ValueError):
        generate_dataset("spiral", 10)
    with pytest.raises(ValueError):
        generate_dataset("uniform", 0)
    with pytest.raises(ValueError):
        Dataset.from_points([Point4(1, 1, 1, 1, 5)])


def test_file_round_trips(tmp_path):
    ds = generate_dataset("clustered", 50, 2)
    write_points(tmp_path / "p.txt", ds.points, header="clustered")
    assert read_points(tmp_path / "p.txt") == ds.points
    qs = generate_queries(ds, 10, 3)
    write_queries(tmp_path / "q.txt", qs)
    assert read_queries(tmp_path / "q.txt") == qs
    results = [oracle_report(ds.points, q) for q in qs]
    write_results(tmp_path / "r.txt", results)
    assert [set(r) for r in read_results(tmp_path / "r.txt")] == results


def test_parse_errors_name_the_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("# comment\n1 2 3 4\n1 2 3\n")
    with pytest.raises(ValueError, match="bad.txt:3"):
        read_points(p)
    p.write_text("1 2 x 4\n")
    with pytest.raises(ValueError, match="bad.txt:1"):
        read_points(p)
    p.write_text("# nothing\n")
    with pytest.raises(ValueError):
        read_dataset(p)


def test_query_file_accepts_comments_and_floats(tmp_path):
    p = tmp_path / "q.txt"
    p.write_text("1 2.5 3 0 10  # trailing\n\n")
    assert read_queries(p) == [Query5.of(1, 2.5, 3, 0, 10)]
