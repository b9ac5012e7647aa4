import random

from hypothesis import given
from hypothesis import strategies as st

from shallowtree.geom import (Point4, Query5, dominates, in_query, level, oracle_report,
                              query_to_rank_space, rank_reduce)


def test_dominates_examples():
    assert dominates((3, 5, 2), (3, 4, 2))
    assert not dominates((3, 5, 2), (4, 1, 1))
    assert dominates((7, 7, 7), (7, 7, 7))


def test_level_examples():
    S = [(1, 1, 1), (2, 2, 2), (3, 3, 3)]
    assert level((2, 2, 2), S) == 2
    assert level((0, 0, 0), S) == 0
    # (3,1,3) only dominates (1,1,1): independent count by filtering
    assert level((3, 1, 3), S) == len([p for p in S if p[1] <= 1]) == 1


def pts_x(xs):
    return [Point4(x, 0, 0, 0, i + 1) for i, x in enumerate(xs)]


def test_rank_reduce_distinct_values_keep_order():
    reduced, _ = rank_reduce(pts_x([5, 9, 12]))
    assert [p.x for p in reduced] == [1, 2, 3]


def test_rank_reduce_ties_broken_by_id():
    pts = pts_x([5, 5, 9])
    reduced, rd = rank_reduce(pts)
    assert [p.x for p in reduced] == [1, 2, 3]
    # same answers before and after reduction for every upper bound
    for bound in (4, 5, 6, 9, 10):
        q = Query5.of(bound, 0, 0, 0, 0)
        assert oracle_report(pts, q) == oracle_report(reduced, query_to_rank_space(q, rd))


def test_rank_reduce_single_point():
    reduced, _ = rank_reduce([Point4(3.5, -2, 7, 1, 1)])
    assert reduced[0][:4] == (1, 1, 1, 1)


def test_query_translation_examples():
    _, rd = rank_reduce([Point4(v, v, v, v, i + 1) for i, v in enumerate([5, 9, 12])])
    assert rd.rank_upper(0, 11) == 2
    assert rd.rank_upper(0, 12) == 3
    q = query_to_rank_space(Query5.of(12, 12, 12, 13, 20), rd)
    assert q.wlo == rd.n + 1 and q.is_empty_range()


def test_oracle_examples():
    assert oracle_report([], Query5.of(1, 1, 1, 0, 1)) == set()
    rng = random.Random(3)
    pts = [Point4(*(rng.random() for _ in range(4)), i + 1) for i in range(8)]
    assert oracle_report(pts, Query5.of(1, 1, 1, 0, 1)) == set(range(1, 9))
    q = Query5.of(0.5, 0.6, 0.7, 0.2, 0.9)
    assert oracle_report(pts, q) == {p.id for p in pts if in_query(p, q)}


coords = st.integers(min_value=-5, max_value=5)


@given(st.lists(st.tuples(coords, coords, coords, coords), min_size=1, max_size=25),
       st.lists(st.tuples(coords, coords, coords, coords, coords), min_size=1, max_size=10))
def test_rank_reduction_preserves_answers(rows, queries):
    pts = [Point4(*r, i + 1) for i, r in enumerate(rows)]
    reduced, rd = rank_reduce(pts)
    for axis in range(4):
        assert sorted(p[axis] for p in reduced) == list(range(1, len(pts) + 1))
        assert [rd.original(p)[axis] for p in reduced] == [p[axis] for p in pts]
    for a, b, c, lo, hi in queries:
        q = Query5.of(a, b, c, lo, hi)
        assert oracle_report(pts, q) == oracle_report(reduced, query_to_rank_space(q, rd))
