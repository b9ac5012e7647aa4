import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from shallowtree.tree import Skeleton, bitlen, compact, default_rho, default_t0


def leaves_of(tr, nodes):
    out = []
    for u in nodes:
        out.extend(range(tr.lo[u], tr.hi[u]))
    return out


def leaves_of_runs(tr, triples):
    out = []
    for u, l, r in triples:
        ch = tr.children[u]
        if not ch:
            out.append(tr.lo[u])
            continue
        out.extend(range(tr.lo[ch[l]], tr.hi[ch[r]]))
    return out


def test_single_leaf():
    tr = Skeleton(1, 2)
    assert len(tr) == 1 and tr.height == 0 and tr.is_leaf(0)
    assert tr.canonical_nodes(0, 0) == [0]


def test_full_range_is_root():
    tr = Skeleton(100, 3)
    assert tr.canonical_nodes(0, 99) == [0]
    assert sorted(leaves_of_runs(tr, tr.canonical_pairs(0, 99))) == list(range(100))


def test_single_leaf_range():
    tr = Skeleton(50, 4)
    for p in range(50):
        assert leaves_of(tr, tr.canonical_nodes(p, p)) == [p]
        assert leaves_of_runs(tr, tr.canonical_pairs(p, p)) == [p]


def test_adjacent_leaves_pairs():
    tr = Skeleton(64, 4)
    for p in range(63):
        assert sorted(leaves_of_runs(tr, tr.canonical_pairs(p, p + 1))) == [p, p + 1]


@pytest.mark.parametrize("rho", [2, 3, 4, 8])
def test_thousand_random_ranges_partition(rho):
    tr = Skeleton(512, rho)
    rng = random.Random(rho)
    for _ in range(1000):
        lo, hi = sorted((rng.randrange(512), rng.randrange(512)))
        nodes = tr.canonical_nodes(lo, hi)
        covered = leaves_of(tr, nodes)
        assert sorted(covered) == list(range(lo, hi + 1))
        assert len(covered) == len(set(covered))
        triples = tr.canonical_pairs(lo, hi)
        covered = leaves_of_runs(tr, triples)
        assert sorted(covered) == list(range(lo, hi + 1))
        assert len(triples) <= 2 * tr.height + 1


def test_empty_range():
    tr = Skeleton(10, 2)
    assert tr.canonical_nodes(5, 4) == [] and tr.canonical_pairs(7, 2) == []


def test_descendants_at_cover_subtree():
    tr = Skeleton(200, 3)
    for u in tr.internal_nodes()[:30]:
        for d in range(tr.depth[u] + 1, tr.height + 1):
            desc = tr.descendants_at(u, d)
            assert leaves_of(tr, desc) == list(range(tr.lo[u], tr.hi[u]))


def test_balanced_children():
    tr = Skeleton(1000, 4)
    for u in tr.internal_nodes():
        sizes = [tr.size(v) for v in tr.children[u]]
        assert max(sizes) - min(sizes) <= 1


def test_helpers():
    assert bitlen(0) == 1 and bitlen(255) == 8 and bitlen(256) == 9
    assert compact([1, 2, 70000]).typecode == "I"
    assert compact([-1, 3], signed=True).typecode == "h"
    assert default_t0(1) == 4 and default_t0(1024) == 100
    assert default_rho(2 ** 16) == 2 and default_rho(2 ** 81) == 3


@given(st.integers(1, 300), st.integers(2, 6), st.data())
def test_partition_property(n, rho, data):
    tr = Skeleton(n, rho)
    lo = data.draw(st.integers(0, n - 1))
    hi = data.draw(st.integers(lo, n - 1))
    assert leaves_of(tr, tr.canonical_nodes(lo, hi)) == list(range(lo, hi + 1))
    assert leaves_of_runs(tr, tr.canonical_pairs(lo, hi)) == list(range(lo, hi + 1))
