"""Property suite and benchmark driver.

``run_suite`` executes the eight acceptance checks and returns a
machine-readable report.  Every failure carries the dataset kind, size and
seed (plus the query index where relevant) needed to reproduce it.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .audit import audit_index, inject_fault
from .cuttings import build_cutting, verify_cutting
from .datasets import KINDS, Dataset, generate_dataset, generate_queries
from .fast import FastConfig, FastIndex, realized_eps
from .geom import Point4, in_query, oracle_report
from .linear import LinearConfig, LinearIndex
from .serialize import dumps_index, loads_index
from .smalldom import build_small, query_small
from .space import space_report
from .stats import QueryStats
from .tree import default_t0

MAX_FAILURES = 25

CRITERIA = {
    1: "oracle equivalence",
    2: "shallow-cutting validity",
    3: "structural audits",
    4: "space scaling",
    5: "query cost instrumentation",
    6: "emptiness agreement",
    7: "small-set structure",
    8: "serialization round trip",
}


@dataclass
class SuiteConfig:
    seed: int = 0
    kinds: Sequence[str] = KINDS
    sizes: Sequence[int] = (1, 2, 17, 256, 1000, 5000)
    datasets: int = 200
    queries: int = 100
    cutting_datasets: int = 50
    cutting_ts: Sequence[int] = (1, 4, 16, 64)
    cutting_n: tuple[int, int] = (64, 512)
    size_const: float = 8.0
    audit_max_n: int = 4096
    audit_extra_n: Sequence[int] = (4096,)
    space_sizes: Sequence[int] = (2 ** 13, 2 ** 14, 2 ** 15, 2 ** 16)
    space_ratio: float = 2.35
    fast_space_sizes: Sequence[int] = (2 ** 12, 2 ** 13)
    c_f: float = 4.0
    c_v: float = 4.0
    emptiness_queries: int = 10_000
    emptiness_sizes: Sequence[int] = (17, 256, 1000)
    small_sets: int = 500
    small_exhaustive: int = 30
    small_t0: int = default_t0(4096)
    small_random_queries: int = 200
    touched_const: int = 64
    serialization_datasets: int = 10
    serialization_sizes: Sequence[int] = (17, 256, 1000, 2000)
    linear: LinearConfig = LinearConfig()
    fast: FastConfig = FastConfig()
    fault: Optional[str] = None  # test hook: corrupt every index after building

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


@dataclass
class CriterionResult:
    key: int
    title: str
    ok: bool = True
    summary: str = ""
    metrics: dict = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    seconds: float = 0.0

    def fail(self, **case) -> None:
        self.ok = False
        self.metrics["failures"] = self.metrics.get("failures", 0) + 1
        if len(self.failures) < MAX_FAILURES:
            self.failures.append(case)

    def line(self) -> str:
        tag = "PASS" if self.ok else "FAIL"
        return f"[{tag}] criterion {self.key} ({self.title}): {self.summary}"


@dataclass
class SuiteReport:
    ok: bool
    results: list[CriterionResult]
    config: dict

    def as_dict(self) -> dict:
        return {"ok": self.ok, "config": self.config,
                "criteria": [asdict(r) for r in self.results]}


def _build(points: Sequence[Point4], structure: str, cfg: SuiteConfig):
    if structure == "linear":
        idx = LinearIndex(points, cfg.linear)
    else:
        idx = FastIndex(points, cfg.fast)
    if cfg.fault:
        try:
            inject_fault(idx, cfg.fault)
        except ValueError:
            pass  # nothing to corrupt in a tiny index
    return idx


STRUCTURES = ("linear", "fast")


class Suite:
    """Runs criteria on demand; criteria 1, 3 and 5 share one oracle pass."""

    def __init__(self, config: Optional[SuiteConfig] = None):
        self.cfg = config or SuiteConfig()
        self._oracle: Optional[dict] = None

    # -- shared oracle pass -------------------------------------------------

    def dataset_plan(self) -> list[tuple[str, int, int]]:
        cfg = self.cfg
        plan = []
        if not cfg.kinds or not cfg.sizes:
            return plan
        for i in range(cfg.datasets):
            kind = cfg.kinds[i % len(cfg.kinds)]
            n = cfg.sizes[(i // len(cfg.kinds)) % len(cfg.sizes)]
            plan.append((kind, n, cfg.seed + i))
        return plan

    def _oracle_pass(self) -> dict:
        if self._oracle is not None:
            return self._oracle
        cfg = self.cfg
        res = {"cases": 0, "mismatch": [], "cost": [], "hops": [], "audits": [],
               "built": 0, "worst_visit_slack": -math.inf, "max_hops": {s: 0 for s in STRUCTURES},
               "seconds": 0.0}
        t_start = time.perf_counter()
        for kind, n, seed in self.dataset_plan():
            ds = generate_dataset(kind, n, seed)
            qseed = seed + 1_000_000
            queries = generate_queries(ds, cfg.queries, qseed)
            expected = [oracle_report(ds.points, q) for q in queries]
            rq = [ds.to_rank_query(q) for q in queries]
            where = {"kind": kind, "n": n, "seed": seed, "query_seed": qseed}
            for structure in STRUCTURES:
                idx = _build(ds.rank_points, structure, cfg)
                res["built"] += 1
                for qi, (q, exp) in enumerate(zip(rq, expected)):
                    st = QueryStats()
                    try:
                        got = idx.report(q, st)
                    except Exception as exc:  # a corrupt index may fail to decode
                        res["mismatch"].append(dict(where, structure=structure, query=qi,
                                                    error=repr(exc)))
                        continue
                    res["cases"] += 1
                    if got != exp:
                        res["mismatch"].append(dict(where, structure=structure, query=qi,
                                                    missing=sorted(exp - got)[:10],
                                                    extra=sorted(got - exp)[:10]))
                    slack = st.nodes_visited - idx.visit_budget(len(exp), st.units, cfg.c_v)
                    res["worst_visit_slack"] = max(res["worst_visit_slack"], slack)
                    if slack > 0:
                        res["cost"].append(dict(where, structure=structure, query=qi,
                                                visited=st.nodes_visited, units=st.units,
                                                k=len(exp)))
                    hm = st.hops_max
                    res["max_hops"][structure] = max(res["max_hops"][structure], hm)
                    if hm > idx.hop_bound:
                        res["hops"].append(dict(where, structure=structure, query=qi, hops=hm,
                                                bound=idx.hop_bound))
                if n <= cfg.audit_max_n:
                    self._audit(idx, dict(where, structure=structure), res["audits"])
        res["seconds"] = time.perf_counter() - t_start
        self._oracle = res
        return res

    @staticmethod
    def _audit(idx, where: dict, out: list) -> None:
        rep = audit_index(idx)
        out.append(dict(where, ok=rep.ok, violations=rep.violations[:3],
                        witness=repr(rep.witness) if rep.witness else None,
                        roundtrips=rep.checked.get("roundtrips", 0)))

    # -- criteria -----------------------------------------------------------

    def criterion_1(self) -> CriterionResult:
        r = CriterionResult(1, CRITERIA[1])
        o = self._oracle_pass()
        for case in o["mismatch"]:
            r.fail(**case)
        r.metrics.update(indexes=o["built"], queries=o["cases"], seconds=round(o["seconds"], 2))
        r.summary = (f"{len(self.dataset_plan())} datasets x {self.cfg.queries} queries x "
                     f"{len(STRUCTURES)} structures, {len(o['mismatch'])} mismatches")
        return r

    def criterion_2(self) -> CriterionResult:
        cfg = self.cfg
        r = CriterionResult(2, CRITERIA[2])
        rng = random.Random(cfg.seed + 2)
        worst = 0.0
        checked = 0
        lo_n, hi_n = cfg.cutting_n
        for i in range(cfg.cutting_datasets):
            kind = cfg.kinds[i % len(cfg.kinds)]
            n = rng.randint(lo_n, hi_n)
            seed = cfg.seed + 20_000 + i
            pts = [p[:3] for p in generate_dataset(kind, n, seed).rank_points]
            for t in cfg.cutting_ts:
                cut = build_cutting(pts, t, bound=(n, n, n))
                rep = verify_cutting(pts, t, cut, universe=n, size_const=cfg.size_const, max_n=hi_n)
                ratio = len(cut) * t / n
                worst = max(worst, ratio)
                checked += 1
                if not rep.ok or ratio > cfg.size_const:
                    r.fail(kind=kind, n=n, seed=seed, t=t, ratio=round(ratio, 3),
                           violations=rep.violations[:3])
        r.metrics.update(cuttings=checked, worst_ratio=round(worst, 3))
        r.summary = f"{checked} cuttings verified exhaustively, worst |cells|*t/n = {worst:.2f}"
        return r

    def criterion_3(self) -> CriterionResult:
        cfg = self.cfg
        r = CriterionResult(3, CRITERIA[3])
        audits = list(self._oracle_pass()["audits"])
        for j, n in enumerate(cfg.audit_extra_n):
            if n > cfg.audit_max_n:
                continue
            for kind in cfg.kinds:
                seed = cfg.seed + 30_000 + j
                ds = generate_dataset(kind, n, seed)
                for structure in STRUCTURES:
                    self._audit(_build(ds.rank_points, structure, cfg),
                                {"kind": kind, "n": n, "seed": seed, "structure": structure},
                                audits)
        for a in audits:
            if not a["ok"]:
                r.fail(**a)
        total = sum(a["roundtrips"] for a in audits)
        r.metrics.update(indexes=len(audits), roundtrips=total)
        r.summary = f"{len(audits)} indexes audited, {total} decode round trips"
        return r

    def criterion_4(self) -> CriterionResult:
        cfg = self.cfg
        r = CriterionResult(4, CRITERIA[4])
        totals = []
        for n in cfg.space_sizes:
            ds = generate_dataset("uniform", n, cfg.seed + 40_000)
            idx = LinearIndex(ds.rank_points, cfg.linear)
            totals.append((n, space_report(idx).total_bits))
            del idx, ds
        ratios = []
        for (n1, b1), (n2, b2) in zip(totals, totals[1:]):
            ratio = b2 / b1
            ratios.append(round(ratio, 4))
            if ratio > cfg.space_ratio:
                r.fail(part="linear", n=n1, next_n=n2, ratio=ratio, limit=cfg.space_ratio,
                       seed=cfg.seed + 40_000)
        fast_rows = []
        for n in cfg.fast_space_sizes:
            ds = generate_dataset("uniform", n, cfg.seed + 41_000)
            idx = FastIndex(ds.rank_points, cfg.fast)
            rep = space_report(idx)
            eps = realized_eps(n, idx.rho)
            budget = cfg.c_f * math.log2(n) ** (3 * eps)
            per_point = rep.total_words / n
            fast_rows.append({"n": n, "rho": idx.rho, "eps": round(eps, 4),
                              "words_per_point": round(per_point, 1), "budget": round(budget, 1)})
            if per_point > budget:
                r.fail(part="fast", n=n, seed=cfg.seed + 41_000, words_per_point=per_point,
                       budget=budget, c_f=cfg.c_f)
            del idx, ds
        r.metrics.update(linear_bits=totals, linear_ratios=ratios, fast=fast_rows)
        worst = max(ratios, default=0.0)
        fast_txt = ", ".join(f"n={f['n']}: {f['words_per_point']} vs {f['budget']}"
                             for f in fast_rows)
        r.summary = (f"linear worst doubling ratio {worst:.3f} (limit {cfg.space_ratio}); "
                     f"fast words/point vs budget: {fast_txt or 'none'}")
        return r

    def criterion_5(self) -> CriterionResult:
        r = CriterionResult(5, CRITERIA[5])
        o = self._oracle_pass()
        for case in o["cost"]:
            r.fail(check="visits", **case)
        for case in o["hops"]:
            r.fail(check="hops", **case)
        slack = o["worst_visit_slack"]
        r.metrics.update(worst_visit_slack=slack, max_hops=o["max_hops"], queries=o["cases"])
        r.summary = (f"worst (visited - budget) = {slack}, max decode hops "
                     f"linear {o['max_hops']['linear']}, fast {o['max_hops']['fast']}")
        return r

    def criterion_6(self) -> CriterionResult:
        cfg = self.cfg
        r = CriterionResult(6, CRITERIA[6])
        per = 500
        nsets = -(-cfg.emptiness_queries // per) if cfg.emptiness_queries else 0
        done = 0
        empties = 0
        for i in range(nsets):
            kind = cfg.kinds[i % len(cfg.kinds)]
            n = cfg.emptiness_sizes[(i // len(cfg.kinds)) % len(cfg.emptiness_sizes)]
            seed = cfg.seed + 60_000 + i
            ds = generate_dataset(kind, n, seed)
            count = min(per, cfg.emptiness_queries - done)
            queries = generate_queries(ds, count, seed + 1_000_000)
            idxs = [_build(ds.rank_points, s, cfg) for s in STRUCTURES]
            for qi, q in enumerate(queries):
                expect = not any(in_query(p, q) for p in ds.points)
                empties += expect
                rq = ds.to_rank_query(q)
                for s, idx in zip(STRUCTURES, idxs):
                    try:
                        got = idx.is_empty(rq)
                    except Exception as exc:
                        got = repr(exc)
                    if got != expect:
                        r.fail(kind=kind, n=n, seed=seed, query_seed=seed + 1_000_000, query=qi,
                               structure=s, expected=expect, got=got)
            done += count
        r.metrics.update(queries=done, empty=empties)
        r.summary = f"{done} queries ({empties} empty) on both structures"
        return r

    def criterion_7(self) -> CriterionResult:
        cfg = self.cfg
        r = CriterionResult(7, CRITERIA[7])
        rng = np.random.default_rng(cfg.seed + 7)
        limit = 4 * cfg.small_t0
        worst = 0.0
        nq = 0
        for i in range(cfg.small_sets):
            # first half stays small enough for exhaustive corner queries
            if i < cfg.small_sets // 2:
                m = int(rng.integers(1, cfg.small_exhaustive + 1))
            else:
                m = int(rng.integers(1, limit + 1))
            ys = rng.permutation(m) + 1
            zs = rng.permutation(m) + 1
            pts = [(x + 1, int(ys[x]), int(zs[x])) for x in range(m)]
            sd = build_small(pts)
            P = np.array(pts, dtype=np.int64)
            if m <= cfg.small_exhaustive:
                qs = [(a, b, c) for a in range(m + 1) for b in range(m + 1) for c in range(m + 1)]
            else:
                qs = [tuple(int(v) for v in rng.integers(0, m + 2, size=3))
                      for _ in range(cfg.small_random_queries)]
            for a, b, c in qs:
                st = QueryStats()
                got = sorted(query_small(sd, a, b, c, st))
                exp = sorted(P[(P[:, 0] <= a) & (P[:, 1] <= b) & (P[:, 2] <= c), 0].tolist())
                nq += 1
                k = len(exp)
                worst = max(worst, st.touched / (k + 1))
                if got != exp or st.touched > cfg.touched_const * (k + 1):
                    r.fail(set=i, m=m, seed=cfg.seed + 7, query=(a, b, c), k=k,
                           touched=st.touched, correct=got == exp)
        r.metrics.update(sets=cfg.small_sets, queries=nq, worst_touched_per_output=round(worst, 2))
        r.summary = (f"{cfg.small_sets} sets, {nq} queries, worst touched/(k+1) = {worst:.2f} "
                     f"(limit {cfg.touched_const})")
        return r

    def criterion_8(self) -> CriterionResult:
        cfg = self.cfg
        r = CriterionResult(8, CRITERIA[8])
        trips = 0
        for i in range(cfg.serialization_datasets):
            kind = cfg.kinds[i % len(cfg.kinds)]
            n = cfg.serialization_sizes[i % len(cfg.serialization_sizes)]
            seed = cfg.seed + 80_000 + i
            ds = generate_dataset(kind, n, seed)
            queries = [ds.to_rank_query(q) for q in generate_queries(ds, cfg.queries, seed + 1)]
            for s in STRUCTURES:
                idx = _build(ds.rank_points, s, cfg)
                _, back, ranks = loads_index(dumps_index(idx, ds.ranks))
                trips += 1
                where = dict(kind=kind, n=n, seed=seed, structure=s)
                if space_report(back).as_dict() != space_report(idx).as_dict():
                    r.fail(check="space report", **where)
                if ranks != ds.ranks:
                    r.fail(check="rank dictionary", **where)
                for qi, q in enumerate(queries):
                    if back.report(q) != idx.report(q):
                        r.fail(check="answers", query=qi, **where)
                        break
        r.metrics.update(roundtrips=trips)
        r.summary = f"{trips} index round trips compared on answers and space reports"
        return r

    def run(self, criteria: Optional[Sequence[int]] = None,
            progress: Optional[Callable[[CriterionResult], None]] = None) -> SuiteReport:
        results = []
        for key in criteria or sorted(CRITERIA):
            t = time.perf_counter()
            res = getattr(self, f"criterion_{key}")()
            res.seconds = round(time.perf_counter() - t, 2)
            results.append(res)
            if progress:
                progress(res)
        return SuiteReport(all(r.ok for r in results), results, self.cfg.to_dict())


def run_suite(config: Optional[SuiteConfig] = None,
              criteria: Optional[Sequence[int]] = None,
              progress: Optional[Callable[[CriterionResult], None]] = None) -> SuiteReport:
    return Suite(config).run(criteria, progress)


BENCH_FIELDS = ("n", "structure", "kind", "seed", "build_ms", "queries", "k_total",
                "nodes_visited", "decode_hops_max", "design_bits_total")


def bench(sizes: Sequence[int], kinds: Sequence[str] = ("uniform",),
          structures: Sequence[str] = STRUCTURES, queries: int = 100, seed: int = 0,
          linear: LinearConfig = LinearConfig(), fast: FastConfig = FastConfig()) -> list[dict]:
    """One row per (kind, n, structure); rows follow the input order."""
    cfg = SuiteConfig(linear=linear, fast=fast)
    rows = []
    for kind in kinds:
        for n in sizes:
            ds: Dataset = generate_dataset(kind, n, seed)
            qs = [ds.to_rank_query(q) for q in generate_queries(ds, queries, seed + 1)]
            for s in structures:
                t = time.perf_counter()
                idx = _build(ds.rank_points, s, cfg)
                build_ms = (time.perf_counter() - t) * 1000
                st = QueryStats()
                k = sum(len(idx.report(q, st)) for q in qs)
                rows.append({
                    "n": n, "structure": s, "kind": kind, "seed": seed,
                    "build_ms": round(build_ms, 1), "queries": len(qs), "k_total": k,
                    "nodes_visited": st.nodes_visited, "decode_hops_max": st.hops_max,
                    "design_bits_total": space_report(idx).total_bits,
                })
    return rows
