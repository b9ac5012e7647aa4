import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import rank_points
from shallowtree.audit import audit_fast
from shallowtree.fast import (FastConfig, FastIndex, FastRef, build_fast, canonical_pairs,
                              decode_fast, hop_limit, query_fast, realized_eps)
from shallowtree.geom import Query5, oracle_report
from shallowtree.space import space_report
from shallowtree.stats import QueryStats


def test_single_point():
    idx = build_fast(rank_points(1, 0))
    assert idx.units == {}
    assert {p.id for p in query_fast(idx, Query5.of(1, 1, 1, 1, 1))} == {1}


def test_all_pair_cuttings_valid_n64():
    idx = build_fast(rank_points(64, 1), rho=4)
    tr = idx.tree
    for u in tr.internal_nodes():
        k = len(tr.children[u])
        assert sum(1 for key in idx.units if key[0] == u) == k * (k + 1) // 2
    rep = audit_fast(idx, exhaustive_cuttings=64)
    assert rep.ok, rep.violations
    assert rep.checked["cuttings_verified"] == len(idx.units)


def test_space_within_budget_n64():
    n, rho = 64, 4
    idx = build_fast(rank_points(n, 2), rho=rho)
    budget = 4 * math.log2(n) ** (3 * realized_eps(n, rho))
    assert space_report(idx).total_words / n <= budget


def test_hop_limit_formula():
    # log2 n = 16, rho = 4: eps = 1/2, so ceil(1/eps) + 1 = 3
    assert realized_eps(2 ** 16, 4) == pytest.approx(0.5)
    assert hop_limit(2 ** 16, 4) == 3
    assert hop_limit(2, 4) == 1


def test_full_range_pairs():
    idx = build_fast(rank_points(100, 3), rho=3)
    triples = canonical_pairs(idx, 1, 100)
    assert triples == [(0, 0, len(idx.tree.children[0]) - 1)]
    assert len(triples) <= 2 * idx.height + 1


def test_leaf_level_cell_decodes_in_one_hop():
    idx = build_fast(rank_points(256, 4), rho=4, t0=4)
    tr = idx.tree
    u = next(u for u in tr.internal_nodes() if all(tr.is_leaf(v) for v in tr.children[u]))
    unit = idx.units[(u, 0, 0)]
    pos, hops = idx.decode_hops(unit, 0, 0)
    assert hops == 1 and pos == tr.lo[tr.children[u][0]]
    assert decode_fast(idx, FastRef(u, 0, 0, 0, 1)) == idx.point_at(pos)


def test_all_refs_round_trip_at_4096():
    idx = build_fast(rank_points(4096, 5))
    rep = audit_fast(idx)
    assert rep.ok, rep.violations
    assert rep.checked["roundtrips"] >= 4096


def test_deep_chains_respect_hop_bound():
    idx = build_fast(rank_points(1024, 6), rho=2, t0=4)
    rep = audit_fast(idx)
    assert rep.ok, rep.violations


def test_predecessor_accelerated_equals_plain():
    idx = build_fast(rank_points(2000, 7), config=FastConfig(key_bits=4))
    assert idx.key_shift > 0
    rng = random.Random(2)
    keys = rng.sample(sorted(idx.units), 40)
    for key in keys:
        unit = idx.units[key]
        for g in range(len(unit.ccells)):
            for axis in range(3):
                bound = rng.randint(0, 2001)
                st_fast, st_plain = QueryStats(), QueryStats()
                fast = idx.predecessor(unit, g, axis, bound, True, st_fast)
                plain = idx.predecessor(unit, g, axis, bound, False, st_plain)
                assert fast == plain
                assert st_fast.probe_decodes <= st_plain.probe_decodes + 1


def test_empty_and_full_queries():
    pts = rank_points(150, 8)
    idx = build_fast(pts)
    assert query_fast(idx, Query5.of(150, 150, 0, 1, 150)) == set()
    assert {p.id for p in query_fast(idx, Query5.of(150, 150, 150, 1, 150))} == set(range(1, 151))


def test_bad_config():
    with pytest.raises(ValueError):
        FastIndex(rank_points(10, 0), FastConfig(rho=1))
    with pytest.raises(ValueError):
        FastIndex(rank_points(10, 0), FastConfig(key_bits=-1))


@given(st.integers(1, 80), st.integers(2, 5), st.integers(4, 12), st.integers(0, 12),
       st.integers(0, 10 ** 6), st.data())
def test_matches_oracle_with_cost_bounds(n, rho, t0, key_bits, seed, data):
    pts = rank_points(n, seed)
    idx = FastIndex(pts, FastConfig(rho=rho, t0=t0, key_bits=key_bits))
    for _ in range(8):
        a, b, c = (data.draw(st.integers(0, n + 1)) for _ in range(3))
        lo = data.draw(st.integers(0, n + 1))
        hi = data.draw(st.integers(0, n + 1))
        q = Query5.of(a, b, c, lo, hi)
        stats = QueryStats()
        got = idx.report(q, stats)
        want = oracle_report(pts, q)
        assert got == want
        assert idx.is_empty(q) == (not want)
        assert stats.nodes_visited <= idx.visit_budget(len(want), stats.units)
        assert stats.hops_max <= idx.hop_bound
