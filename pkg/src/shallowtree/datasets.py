"""Dataset and workload generation plus the plain-text file formats.

Points file: one point per line, ``x y z w``; ``#`` starts a comment.  Ids
are assigned 1..n in file order.  Query file: ``a b c wlo whi`` per line.
Results file: the sorted ids reported for each query, one query per line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .geom import Point4, Query5, RankDictionary, query_to_rank_space, rank_reduce

KINDS = ("uniform", "clustered", "diagonal", "adversarial-duplicates")

Number = Union[int, float]


@dataclass
class Dataset:
    points: list[Point4]
    ranks: RankDictionary
    meta: dict = field(default_factory=dict)
    rank_points: list[Point4] = field(default_factory=list, repr=False)

    @classmethod
    def from_points(cls, points: Sequence[Point4], **meta) -> "Dataset":
        points = list(points)
        ids = sorted(p.id for p in points)
        if ids != list(range(1, len(points) + 1)):
            raise ValueError("dataset ids must be dense 1..n")
        reduced, rd = rank_reduce(points)
        return cls(points, rd, dict(meta), reduced)

    @property
    def n(self) -> int:
        return len(self.points)

    def to_rank_query(self, q: Query5) -> Query5:
        return query_to_rank_space(q, self.ranks)


def _clean(v) -> Number:
    v = v.item() if hasattr(v, "item") else v
    return int(v) if isinstance(v, (int, np.integer)) else float(v)


def _make(rows: Iterable[Sequence], kind: str, n: int, seed: int) -> Dataset:
    pts = [Point4(*(_clean(v) for v in row), i + 1) for i, row in enumerate(rows)]
    return Dataset.from_points(pts, generator=kind, n=n, seed=seed)


def generate_dataset(kind: str, n: int, seed: int = 0) -> Dataset:
    """Reproducible dataset of ``n`` points; see ``KINDS``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "uniform":
        rows = rng.random((n, 4)).round(9)
    elif kind == "clustered":
        k = 1 + n // 200
        centers = rng.random((k, 4))
        which = rng.integers(0, k, size=n)
        rows = (centers[which] + rng.normal(0.0, 0.02, size=(n, 4))).round(9)
    elif kind == "diagonal":
        rows = [(i, i, i, i) for i in range(1, n + 1)]
    elif kind == "adversarial-duplicates":
        span = max(1, n // 8)
        rows = rng.integers(0, span, size=(n, 4))
    else:
        raise ValueError(f"unknown dataset kind {kind!r}; expected one of {KINDS}")
    return _make(rows, kind, n, seed)


def generate_queries(ds: Dataset, count: int, seed: int = 0) -> list[Query5]:
    """Random 5-sided queries in original coordinates.

    Bounds are drawn either from existing coordinate values (exercising ties)
    or uniformly from a slightly widened coordinate range.
    """
    rng = np.random.default_rng(seed)
    cols = [np.array([p[axis] for p in ds.points], dtype=float) for axis in range(4)]
    out = []

    def bound(axis):
        col = cols[axis]
        if rng.random() < 0.5:
            return _clean(ds.points[int(rng.integers(0, ds.n))][axis])
        lo, hi = col.min(), col.max()
        pad = (hi - lo) * 0.05 + 1e-9
        return float(rng.uniform(lo - pad, hi + pad))

    for _ in range(count):
        a, b, c = bound(0), bound(1), bound(2)
        w1, w2 = bound(3), bound(3)
        if w1 > w2 and rng.random() < 0.9:
            w1, w2 = w2, w1
        out.append(Query5.of(a, b, c, w1, w2))
    return out


def _fmt(v: Number) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def _parse(tok: str) -> Number:
    try:
        return int(tok)
    except ValueError:
        return float(tok)


def _rows(path: Union[str, Path], width: int) -> list[list[Number]]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} numbers, got {len(toks)}")
            try:
                out.append([_parse(t) for t in toks])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return out


def read_points(path: Union[str, Path]) -> list[Point4]:
    return [Point4(*row, i + 1) for i, row in enumerate(_rows(path, 4))]


def read_dataset(path: Union[str, Path]) -> Dataset:
    pts = read_points(path)
    if not pts:
        raise ValueError(f"{path}: no points")
    return Dataset.from_points(pts, generator="file", source=str(path))


def write_points(path: Union[str, Path], points: Iterable[Point4], header: str = "") -> None:
    with open(path, "w") as fh:
        if header:
            fh.write(f"# {header}\n")
        for p in sorted(points, key=lambda p: p.id):
            fh.write(" ".join(_fmt(v) for v in p[:4]) + "\n")


def read_queries(path: Union[str, Path]) -> list[Query5]:
    return [Query5.of(*row) for row in _rows(path, 5)]


def write_queries(path: Union[str, Path], queries: Iterable[Query5]) -> None:
    with open(path, "w") as fh:
        for q in queries:
            fh.write(" ".join(_fmt(v) for v in (*q.box, q.wlo, q.whi)) + "\n")


def write_results(path: Union[str, Path], results: Iterable[Iterable[int]]) -> None:
    with open(path, "w") as fh:
        for ids in results:
            fh.write(" ".join(str(i) for i in sorted(ids)) + "\n")


def read_results(path: Union[str, Path]) -> list[list[int]]:
    with open(path) as fh:
        return [[int(t) for t in line.split()] for line in fh]
