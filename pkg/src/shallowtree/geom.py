"""Point and query types, dominance primitives, rank-space reduction, brute-force oracle."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

Coord = Union[int, float]

AXES = ("x", "y", "z", "w")


class Point3(NamedTuple):
    x: Coord
    y: Coord
    z: Coord


class Point4(NamedTuple):
    x: Coord
    y: Coord
    z: Coord
    w: Coord
    id: int

    def xyz(self) -> Point3:
        return Point3(self.x, self.y, self.z)


class DominanceBox3(NamedTuple):
    """(-inf, a] x (-inf, b] x (-inf, c]."""

    a: Coord
    b: Coord
    c: Coord


class Query5(NamedTuple):
    box: DominanceBox3
    wlo: Coord
    whi: Coord

    @classmethod
    def of(cls, a: Coord, b: Coord, c: Coord, wlo: Coord, whi: Coord) -> "Query5":
        return cls(DominanceBox3(a, b, c), wlo, whi)

    def is_empty_range(self) -> bool:
        return self.wlo > self.whi


def dominates(q, p) -> bool:
    return q[0] >= p[0] and q[1] >= p[1] and q[2] >= p[2]


def level(q, S: Iterable) -> int:
    qx, qy, qz = q[0], q[1], q[2]
    return sum(1 for p in S if p[0] <= qx and p[1] <= qy and p[2] <= qz)


@dataclass(frozen=True)
class RankDictionary:
    """Per-axis sorted (value, id) keys.

    ``keys[axis][r - 1]`` is the key holding rank ``r``; ``values[axis]`` is the
    parallel list of raw values used for predecessor/successor search.
    """

    keys: tuple[tuple[tuple[Coord, int], ...], ...]
    values: tuple[tuple[Coord, ...], ...]
    tie_break: str = "value,id"

    @property
    def n(self) -> int:
        return len(self.values[0])

    def rank_upper(self, axis: int, bound: Coord) -> int:
        """ra(bound): number of keys whose value does not exceed ``bound``."""
        return bisect_right(self.values[axis], bound)

    def rank_lower(self, axis: int, bound: Coord) -> int:
        """ra(succ(bound)); ``n + 1`` when no value is >= ``bound``."""
        return bisect_left(self.values[axis], bound) + 1

    def pred(self, axis: int, bound: Coord):
        r = self.rank_upper(axis, bound)
        return self.values[axis][r - 1] if r else None

    def succ(self, axis: int, bound: Coord):
        r = self.rank_lower(axis, bound)
        return self.values[axis][r - 1] if r <= self.n else None

    def value_of(self, axis: int, rank: int) -> Coord:
        return self.keys[axis][rank - 1][0]

    def original(self, p: Point4) -> Point4:
        return Point4(
            self.value_of(0, p.x), self.value_of(1, p.y), self.value_of(2, p.z),
            self.value_of(3, p.w), p.id,
        )


def rank_reduce(points: Sequence[Point4]) -> tuple[list[Point4], RankDictionary]:
    """Replace each coordinate by its 1-based rank; ties broken by (value, id)."""
    if not points:
        raise ValueError("rank_reduce needs at least one point")
    ids = [p.id for p in points]
    if len(set(ids)) != len(ids):
        raise ValueError("point ids must be unique")
    n = len(points)
    ranks = [[0] * n for _ in range(4)]
    keys = []
    values = []
    for axis in range(4):
        order = sorted(range(n), key=lambda i: (points[i][axis], points[i].id))
        for r, i in enumerate(order, 1):
            ranks[axis][i] = r
        keys.append(tuple((points[i][axis], points[i].id) for i in order))
        values.append(tuple(points[i][axis] for i in order))
    reduced = [
        Point4(ranks[0][i], ranks[1][i], ranks[2][i], ranks[3][i], points[i].id)
        for i in range(n)
    ]
    return reduced, RankDictionary(tuple(keys), tuple(values))


def query_to_rank_space(q: Query5, rd: RankDictionary) -> Query5:
    """Map a query on original values to one on ranks with the same answer.

    Upper bounds use ra(b); the w lower bound uses ra(succ(a)).  A lower bound
    with no successor becomes ``n + 1``, which makes the w range empty.
    """
    a, b, c = q.box
    return Query5(
        DominanceBox3(rd.rank_upper(0, a), rd.rank_upper(1, b), rd.rank_upper(2, c)),
        rd.rank_lower(3, q.wlo),
        rd.rank_upper(3, q.whi),
    )


def in_query(p, q: Query5) -> bool:
    a, b, c = q.box
    return p[0] <= a and p[1] <= b and p[2] <= c and q.wlo <= p[3] <= q.whi


def oracle_report(points: Iterable[Point4], q: Query5) -> set[int]:
    """Linear-scan reference answer."""
    a, b, c = q.box
    lo, hi = q.wlo, q.whi
    return {
        p.id for p in points
        if p.x <= a and p.y <= b and p.z <= c and lo <= p.w <= hi
    }
