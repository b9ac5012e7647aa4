import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shallowtree.smalldom import (SmallDomBatch, SmallDomConfig, build_many, build_small,
                                  inspect_small, query_small)
from shallowtree.stats import QueryStats


def random_set(m, seed):
    rng = random.Random(seed)
    ys = list(range(1, m + 1))
    zs = list(range(1, m + 1))
    rng.shuffle(ys)
    rng.shuffle(zs)
    return [(x + 1, ys[x], zs[x]) for x in range(m)]


def brute(pts, a, b, c):
    return sorted(p[0] for p in pts if p[0] <= a and p[1] <= b and p[2] <= c)


def check_invariants(node, cfg, depth=0):
    """Occupancy, sortedness and partition invariants; returns the depth."""
    if node.base:
        assert len(node.points) <= cfg.base_threshold or depth == 0
        return 0
    size = len(node.points)
    cap = math.ceil(size / cfg.arity)
    assert all(len(col) <= cap for col in node.columns)
    assert all(len(row) <= cap for row in node.rows)
    listed = []
    for (i, j), lst in node.lists.items():
        zs = [z for z, _ in lst]
        assert zs == sorted(zs)
        listed.extend(x for _, x in lst)
    assert sorted(listed) == sorted(p[0] for p in node.points)
    metas = [z for _, _, z in node.meta]
    assert metas == sorted(metas)
    for i, j, z in node.meta:
        assert z == node.lists[(i, j)][0][0]
    sub = [check_invariants(ch, cfg, depth + 1) for ch in node.col_children + node.row_children]
    return 1 + max(sub)


def test_single_point_is_base():
    sd = build_small([(1, 1, 1)])
    node = inspect_small(sd)
    assert node.base and node.points == [(1, 1, 1)]


def test_25_points_one_grid_level():
    cfg = SmallDomConfig(t_prime=25)
    pts = random_set(25, 0)
    node = inspect_small(build_small(pts, cfg))
    assert not node.base
    assert len(node.columns) == 5 and len(node.rows) == 5
    assert all(len(c) == 5 for c in node.columns) and all(len(r) == 5 for r in node.rows)
    assert all(ch.base for ch in node.col_children + node.row_children)


@pytest.mark.parametrize("m", [100, 144, 576])
def test_t0_sized_set_invariants(m):
    cfg = SmallDomConfig()
    node = inspect_small(build_small(random_set(m, m), cfg))
    assert check_invariants(node, cfg) <= 5


def test_full_and_empty_queries():
    pts = random_set(60, 1)
    sd = build_small(pts)
    assert sorted(query_small(sd, 60, 60, 60)) == list(range(1, 61))
    assert query_small(sd, 0, 0, 0) == []
    assert query_small(sd, 60, 60, 0) == []


def test_fifty_points_fifty_queries():
    rng = random.Random(5)
    pts = random_set(50, 5)
    sd = build_small(pts)
    for _ in range(50):
        a, b, c = (rng.randint(0, 51) for _ in range(3))
        assert sorted(query_small(sd, a, b, c)) == brute(pts, a, b, c)


def test_batch_matches_single_builds():
    sets = [random_set(m, m) for m in (1, 3, 17, 40, 90)]
    batch = SmallDomBatch(max_points=50)
    targets = [type("T", (), {"sd": None})() for _ in sets]
    for t, pts in zip(targets, sets):
        batch.add(t, [p[1] for p in pts], [p[2] for p in pts])
    batch.flush()
    for t, pts in zip(targets, sets):
        assert list(t.sd.data) == list(build_small(pts).data)


def test_empty_set():
    (sd,) = build_many([([], [])])
    assert query_small(sd, 5, 5, 5) == []


def test_config_validation():
    with pytest.raises(ValueError):
        SmallDomConfig(t_prime=3)


@st.composite
def small_sets(draw, max_m=40):
    m = draw(st.integers(1, max_m))
    ys = draw(st.permutations(range(1, m + 1)))
    zs = draw(st.permutations(range(1, m + 1)))
    return [(x + 1, ys[x], zs[x]) for x in range(m)]


@given(small_sets(), st.data(), st.sampled_from([4, 9, 16, 25]), st.integers(1, 16))
def test_query_matches_brute_force(pts, data, tp, base):
    cfg = SmallDomConfig(t_prime=tp, base_threshold=base)
    sd = build_small(pts, cfg)
    m = len(pts)
    check_invariants(inspect_small(sd), cfg)
    for _ in range(10):
        a, b, c = (data.draw(st.integers(0, m + 1)) for _ in range(3))
        st_ = QueryStats()
        got = query_small(sd, a, b, c, st_)
        assert sorted(got) == brute(pts, a, b, c)
        assert len(got) == len(set(got))


@given(small_sets(200), st.data())
def test_touched_entries_proportional_to_output(pts, data):
    sd = build_small(pts)
    m = len(pts)
    for _ in range(10):
        a, b, c = (data.draw(st.integers(0, m)) for _ in range(3))
        stats = QueryStats()
        k = len(query_small(sd, a, b, c, stats))
        assert stats.touched <= 64 * (k + 1)
