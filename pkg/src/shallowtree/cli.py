"""Command line entry point.

Exit codes: 0 ok, 1 verification failure, 2 I/O error, 3 bad configuration.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional, Sequence

from .audit import audit_index
from .cuttings import build_cutting, verify_cutting
from .datasets import KINDS, read_dataset, read_queries, write_results
from .fast import FastConfig, FastIndex
from .geom import Query5, oracle_report, query_to_rank_space
from .linear import LinearConfig, LinearIndex
from .serialize import SerializationError, read_index_file, serialize_index
from .space import space_report
from .stats import QueryStats
from .suite import CRITERIA, SuiteConfig, bench, run_suite

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_IO = 2
EXIT_CONFIG = 3


class CliError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _str_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


def _load_dataset(path: str):
    try:
        return read_dataset(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")
    except ValueError as exc:
        raise CliError(EXIT_IO, str(exc))


def _load_index(path: str):
    try:
        return read_index_file(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")
    except SerializationError as exc:
        raise CliError(EXIT_IO, f"{path}: {type(exc).__name__}: {exc}")


def _write_json(path: Optional[str], payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None or path == "-":
        print(text)
        return
    try:
        Path(path).write_text(text + "\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}")


def cmd_build(args) -> int:
    ds = _load_dataset(args.input)
    try:
        if args.structure == "linear":
            idx = LinearIndex(ds.rank_points, LinearConfig(rho=args.rho, t0=args.t0))
        else:
            cfg = FastConfig(t0=args.t0) if args.rho is None else FastConfig(rho=args.rho, t0=args.t0)
            idx = FastIndex(ds.rank_points, cfg)
    except ValueError as exc:
        raise CliError(EXIT_CONFIG, str(exc))
    try:
        serialize_index(idx, args.out, ds.ranks)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}")
    print(f"built {idx.structure} index: n={idx.n} rho={idx.rho} t0={idx.t0} "
          f"height={idx.height} -> {args.out}")
    return EXIT_OK


def cmd_query(args) -> int:
    _, idx, ranks = _load_index(args.index)
    try:
        queries = read_queries(args.queries)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.queries}: {exc.strerror or exc}")
    except ValueError as exc:
        raise CliError(EXIT_IO, str(exc))
    results, per_query = [], []
    total = QueryStats()
    for q in queries:
        rq = q if ranks is None else query_to_rank_space(q, ranks)
        st = QueryStats()
        results.append(idx.report(rq, st))
        total.merge(st)
        per_query.append(dict(st.as_dict(), k=len(results[-1])))
    try:
        if args.out:
            write_results(args.out, results)
        else:
            for ids in results:
                print(" ".join(str(i) for i in sorted(ids)))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}")
    if args.stats:
        _write_json(args.stats, {"structure": idx.structure, "n": idx.n,
                                 "total": total.as_dict(), "queries": per_query})
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.index:
        _, idx, _ = _load_index(args.index)
        rep = audit_index(idx, exhaustive_cuttings=args.exhaustive)
        pts = idx.points()
        rng = random.Random(args.seed)
        n = idx.n
        bad = 0
        for _ in range(args.queries):
            lo, hi = sorted((rng.randint(1, n), rng.randint(1, n)))
            q = Query5.of(rng.randint(0, n), rng.randint(0, n), rng.randint(0, n), lo, hi)
            if idx.report(q) != oracle_report(pts, q):
                bad += 1
        print(f"audit: {'ok' if rep.ok else 'FAILED'} {json.dumps(rep.checked, sort_keys=True)}")
        for v in rep.violations:
            print(f"  violation: {v}")
        print(f"oracle: {args.queries - bad}/{args.queries} random queries agree")
        return EXIT_OK if rep.ok and not bad else EXIT_VERIFY
    ds = _load_dataset(args.input)
    if ds.n > args.max_n:
        raise CliError(EXIT_CONFIG, f"exhaustive cutting checks need n <= {args.max_n}, got {ds.n}")
    pts = [p[:3] for p in ds.rank_points]
    ok = True
    for t in args.t:
        if t < 1:
            raise CliError(EXIT_CONFIG, f"t must be >= 1, got {t}")
        cut = build_cutting(pts, t, bound=(ds.n, ds.n, ds.n))
        res = verify_cutting(pts, t, cut, universe=ds.n, max_n=args.max_n)
        ok &= res.ok
        ratio = len(cut) * t / ds.n
        print(f"t={t}: {len(cut)} cells, |cells|*t/n={ratio:.2f} {'ok' if res.ok else 'FAILED'}")
        for v in res.violations[:5]:
            print(f"  violation: {v}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(args) -> int:
    for k in args.kinds:
        if k not in KINDS:
            raise CliError(EXIT_CONFIG, f"unknown kind {k!r}; expected one of {', '.join(KINDS)}")
    if any(n < 1 for n in args.sizes):
        raise CliError(EXIT_CONFIG, "sizes must be >= 1")
    rows = bench(args.sizes, args.kinds, args.structures, args.queries, args.seed)
    for r in rows:
        print(f"{r['kind']:>22} n={r['n']:<6} {r['structure']:<6} build {r['build_ms']:>9.1f} ms "
              f"k={r['k_total']:<7} visited={r['nodes_visited']:<7} "
              f"hops={r['decode_hops_max']} bits={r['design_bits_total']}")
    if args.report:
        _write_json(args.report, rows)
    return EXIT_OK


def cmd_stats(args) -> int:
    meta, idx, _ = _load_index(args.index)
    rep = space_report(idx)
    payload = dict(meta, height=idx.height, space=rep.as_dict(),
                   words_per_point=round(rep.total_words / idx.n, 2))
    _write_json(None, payload)
    return EXIT_OK


def cmd_suite(args) -> int:
    cfg = SuiteConfig(seed=args.seed)
    if args.quick:
        cfg = SuiteConfig(seed=args.seed, datasets=24, sizes=(1, 2, 17, 256, 1000), queries=30,
                          cutting_datasets=8, cutting_n=(64, 200), audit_extra_n=(1024,),
                          space_sizes=(2 ** 11, 2 ** 12), fast_space_sizes=(2 ** 10,),
                          emptiness_queries=1000, small_sets=60, serialization_datasets=4)
    for key in args.criteria or ():
        if key not in CRITERIA:
            raise CliError(EXIT_CONFIG, f"unknown criterion {key}")
    rep = run_suite(cfg, args.criteria or None, progress=lambda r: print(r.line(), flush=True))
    if args.report:
        _write_json(args.report, rep.as_dict())
    return EXIT_OK if rep.ok else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shallowtree",
                                description="4D 5-sided range reporting indexes.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build an index from a points file")
    b.add_argument("--input", required=True)
    b.add_argument("--structure", choices=("linear", "fast"), default="linear")
    b.add_argument("--rho", type=int)
    b.add_argument("--t0", type=int)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="answer a query file with a built index")
    q.add_argument("--index", required=True)
    q.add_argument("--queries", required=True)
    q.add_argument("--out", help="results file (default: stdout)")
    q.add_argument("--stats", help="write per-query instrumentation as JSON")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="audit an index or check cuttings of a points file")
    g = v.add_mutually_exclusive_group(required=True)
    g.add_argument("--index")
    g.add_argument("--input")
    v.add_argument("--t", type=_int_list, default=[1, 4, 16, 64],
                   help="cutting parameters for --input (comma-separated)")
    v.add_argument("--max-n", type=int, default=512)
    v.add_argument("--queries", type=int, default=100, help="random oracle queries for --index")
    v.add_argument("--exhaustive", type=int, default=0,
                   help="exhaustively verify cuttings of units up to this size")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="build and query generated datasets")
    be.add_argument("--sizes", type=_int_list, default=[256, 1024, 4096])
    be.add_argument("--kinds", type=_str_list, default=["uniform"])
    be.add_argument("--structures", type=_str_list, default=["linear", "fast"])
    be.add_argument("--queries", type=int, default=100)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("--report", help="write rows as JSON")
    be.set_defaults(func=cmd_bench)

    s = sub.add_parser("stats", help="print metadata and design-bit space of an index")
    s.add_argument("--index", required=True)
    s.set_defaults(func=cmd_stats)

    su = sub.add_parser("suite", help="run the property suite")
    su.add_argument("--criteria", type=_int_list)
    su.add_argument("--quick", action="store_true", help="reduced sizes for a fast smoke run")
    su.add_argument("--seed", type=int, default=0)
    su.add_argument("--report", help="write the machine-readable report as JSON")
    su.set_defaults(func=cmd_suite)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if getattr(args, "structures", None):
        for s in args.structures:
            if s not in ("linear", "fast"):
                print(f"error: unknown structure {s!r}", file=sys.stderr)
                return EXIT_CONFIG
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
