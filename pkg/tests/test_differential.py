"""Cross-structure agreement and determinism."""

import pickle

from hypothesis import given
from hypothesis import strategies as st

from shallowtree.datasets import generate_dataset, generate_queries
from shallowtree.fast import FastConfig, FastIndex
from shallowtree.linear import LinearConfig, LinearIndex
from shallowtree.space import space_report
from shallowtree.suite import SuiteConfig, run_suite


@given(st.sampled_from(["uniform", "clustered", "diagonal", "adversarial-duplicates"]),
       st.integers(1, 150), st.integers(0, 1000))
def test_linear_and_fast_agree(kind, n, seed):
    ds = generate_dataset(kind, n, seed)
    lin = LinearIndex(ds.rank_points, LinearConfig(t0=4))
    fast = FastIndex(ds.rank_points, FastConfig(rho=3, t0=4))
    for q in generate_queries(ds, 15, seed + 1):
        rq = ds.to_rank_query(q)
        assert lin.report(rq) == fast.report(rq)
        assert lin.is_empty(rq) == fast.is_empty(rq)


def test_builds_are_deterministic():
    ds = generate_dataset("clustered", 700, 9)
    for make in (lambda: LinearIndex(ds.rank_points), lambda: FastIndex(ds.rank_points)):
        a, b = make(), make()
        assert pickle.dumps(a) == pickle.dumps(b)
        assert space_report(a).as_dict() == space_report(b).as_dict()


def test_suite_reports_are_deterministic():
    cfg = SuiteConfig(datasets=6, sizes=(17, 90), queries=10, emptiness_queries=100,
                      emptiness_sizes=(30,))
    a = run_suite(cfg, criteria=[1, 5, 6]).as_dict()
    b = run_suite(cfg, criteria=[1, 5, 6]).as_dict()
    for r in a["criteria"] + b["criteria"]:
        r.pop("seconds")
        r["metrics"].pop("seconds", None)
    assert a == b
