"""Linear-space 5-sided range reporting index.

A rho-ary range tree on w.  Every internal node u keeps:

* a t0-shallow cutting C(u) of S(u) whose cells hold a small dominance
  structure over cell-local ranks (the reporting cells);
* a 4t0-shallow cutting C'(u) whose cells forward point references to the
  children through clipped 2t0-cuttings (class 0 reference level);
* on nodes whose depth is divisible by rho^i, a coarser reference level of
  class i (parameter 4 rho^i t0) that jumps straight to descendants rho^i
  levels further down.

A reported point is known only by its x-rank inside a cell; ``decode`` turns
that into a leaf position by following the reference levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geom import Point4, Query5
from .refs import (NULL, CorruptIndex, build_query_cells, build_ref_level, finalize,
                   by_x, finalize_query_cells, link_targets, link_up)
from .smalldom import DEFAULT_CONFIG, SmallDomBatch, SmallDomConfig, query_small
from .stats import QueryStats
from .tree import Skeleton, default_rho, default_t0


@dataclass(frozen=True)
class LinearConfig:
    rho: Optional[int] = None
    t0: Optional[int] = None
    overlay_classes: int = 2
    smalldom: SmallDomConfig = DEFAULT_CONFIG

    def resolve(self, n: int) -> tuple[int, int]:
        rho = self.rho if self.rho is not None else default_rho(n)
        t0 = self.t0 if self.t0 is not None else default_t0(n)
        if rho < 2:
            raise ValueError("rho must be >= 2")
        if t0 < 4:
            raise ValueError("t0 must be >= 4")
        if self.overlay_classes < 0:
            raise ValueError("overlay_classes must be >= 0")
        return rho, t0


class PointRef(NamedTuple):
    """A point known by its 1-based x-rank inside a cell.

    ``kind`` is "C" for a reporting cell or the class number (0 for C') of a
    reference level.
    """

    node: int
    kind: object
    cell: int
    rank: int


class LinearNode:
    __slots__ = ("locator", "ccells", "levels")

    def __init__(self, locator, ccells, levels):
        self.locator = locator
        self.ccells = ccells
        self.levels = levels


def _check_rank_space(points: Sequence[Point4]) -> None:
    n = len(points)
    for axis in range(4):
        vals = sorted(p[axis] for p in points)
        if vals != list(range(1, n + 1)):
            raise ValueError(f"axis {axis} is not a rank permutation of 1..{n}")


class _TreeIndex:
    """Leaf storage and range helpers shared by both indexes."""

    structure = "tree"

    def _init_leaves(self, points: Sequence[Point4], rho: int):
        if not points:
            raise ValueError("index needs at least one point")
        _check_rank_space(points)
        n = len(points)
        by_w = sorted(points, key=lambda p: p.w)
        self.n = n
        self.X = [p.x for p in by_w]
        self.Y = [p.y for p in by_w]
        self.Z = [p.z for p in by_w]
        self.ID = [p.id for p in by_w]
        self.tree = Skeleton(n, rho)
        self.rho = rho

    @property
    def height(self) -> int:
        return self.tree.height

    def point_at(self, pos: int) -> Point4:
        return Point4(self.X[pos], self.Y[pos], self.Z[pos], pos + 1, self.ID[pos])

    def points(self) -> list[Point4]:
        return [self.point_at(p) for p in range(self.n)]

    def _positions(self, q: Query5):
        a, b, c = q.box
        if a < 1 or b < 1 or c < 1 or q.wlo > q.whi:
            return None
        lo = max(int(math.ceil(q.wlo)) - 1, 0)
        hi = min(int(math.floor(q.whi)) - 1, self.n - 1)
        if lo > hi:
            return None
        n = self.n
        return min(a, n), min(b, n), min(c, n), lo, hi

    def _leaf_hit(self, pos, a, b, c) -> bool:
        return self.X[pos] <= a and self.Y[pos] <= b and self.Z[pos] <= c

    def _node_coords(self, u: int) -> np.ndarray:
        lo, hi = self.tree.lo[u], self.tree.hi[u]
        return np.array([self.X[lo:hi], self.Y[lo:hi], self.Z[lo:hi]], dtype=np.int64).T

    def report(self, q: Query5, stats: Optional[QueryStats] = None) -> set[int]:
        return {p.id for p in self.query(q, stats)}


class LinearIndex(_TreeIndex):
    structure = "linear"

    def __init__(self, points: Sequence[Point4], config: LinearConfig = LinearConfig()):
        rho, t0 = config.resolve(len(points))
        self._init_leaves(points, rho)
        self.config = config
        self.t0 = t0
        H = self.height
        classes = 0
        while classes < config.overlay_classes and rho ** (classes + 1) < H:
            classes += 1
        self.classes = classes
        self.nodes: list[Optional[LinearNode]] = [None] * len(self.tree)
        self._build()

    # -- construction -------------------------------------------------------

    def level_t(self, i: int) -> int:
        return self.rho ** i * self.t0

    def max_class(self, u: int) -> int:
        d = self.tree.depth[u]
        i = 0
        while i < self.classes and d % self.rho ** (i + 1) == 0:
            i += 1
        return i

    def _build(self):
        tr = self.tree
        X, Y, Z, n, t0 = self.X, self.Y, self.Z, self.n, self.t0
        order = sorted(tr.internal_nodes(), key=lambda u: -tr.depth[u])
        batch = SmallDomBatch(self.config.smalldom)
        # a node's build-time member lists are needed until every ancestor
        # that can target it (at most rho^classes levels up) is built
        reach = self.rho ** self.classes
        pending: list[int] = []
        for u in order:
            while pending and tr.depth[pending[0]] >= tr.depth[u] + 1 + reach:
                for lev in self.nodes[pending.pop(0)].levels:
                    finalize(lev)
            positions = by_x(range(tr.lo[u], tr.hi[u]), X)
            levels = []
            for i in range(self.max_class(u) + 1):
                ti = self.level_t(i)
                levels.append(build_ref_level(positions, X, Y, Z, 4 * ti, 2 * ti, n))
            for i, lev in enumerate(levels):
                if i == 0:
                    targets = tr.children[u]
                else:
                    targets = tr.descendants_at(u, tr.depth[u] + self.rho ** i)
                link_targets(lev, targets, tr.lo, X, self._target_level(i))
                if i:
                    for cell, (j, fx) in zip(levels[i - 1].cells,
                                             link_up(levels[i - 1].cells, lev, X)):
                        cell.lift, cell.lfx = j, fx
            ccells, locator = build_query_cells(positions, X, Y, Z, t0, n, batch)
            for cell, (j, fx) in zip(ccells, link_up(ccells, levels[0], X)):
                cell.cont, cell.fx = j, fx
            finalize_query_cells(ccells)
            self.nodes[u] = LinearNode(locator, ccells, levels)
            pending.append(u)
        batch.flush()
        for u in pending:
            for lev in self.nodes[u].levels:
                finalize(lev)

    def _target_level(self, i: int):
        def get(v):
            node = self.nodes[v]
            return None if node is None else node.levels[i]
        return get

    # -- decoding -----------------------------------------------------------

    @property
    def hop_bound(self) -> int:
        """Max lifts + descents for any decode."""
        I = self.classes
        return I * self.rho + -(-self.height // self.rho ** I)

    def decode_pos(self, u: int, kind, g: int, s: int, stats: Optional[QueryStats] = None,
                   probe: bool = False) -> int:
        """Leaf position of slot ``s`` (0-based) in cell ``g`` of node u."""
        nodes, lo_of = self.nodes, self.tree.lo
        node = nodes[u]
        try:
            if kind == "C":
                cc = node.ccells[g]
                s = cc.fx[s]
                g = cc.cont
                cls = 0
            else:
                cls = kind
            hops = 0
            while True:
                levels = node.levels
                while cls + 1 < len(levels):
                    rc = levels[cls].cells[g]
                    s = rc.lfx[s]
                    g = rc.lift
                    cls += 1
                    hops += 1
                lev = levels[cls]
                rc = lev.cells[g]
                j = rc.dcell[s]
                if j == NULL:
                    raise CorruptIndex(f"slot {s} of level {cls} cell {g} at node {u} has no D-cell")
                d = lev.dcells[g][j]
                s2 = rc.drank[s]
                r = d.child[s2]
                hops += 1
                dn = d.down[r]
                v = lev.targets[r]
                if dn == NULL:
                    pos = lo_of[v] + d.fpp[s2]
                    break
                g = dn
                s = d.fpp[s2]
                u = v
                node = nodes[v]
        except (IndexError, TypeError, AttributeError) as exc:
            raise CorruptIndex(f"unresolvable reference at node {u}: {exc}") from exc
        if stats is not None:
            if probe:
                stats.probe_decodes += 1
            else:
                stats.points_decoded += 1
                stats.hops[hops] += 1
        return pos

    def decode_hops(self, u: int, kind, g: int, s: int) -> tuple[int, int]:
        st = QueryStats()
        pos = self.decode_pos(u, kind, g, s, st)
        return pos, st.hops_max

    def decode(self, ref: PointRef) -> Point4:
        return self.point_at(self.decode_pos(ref.node, ref.kind, ref.cell, ref.rank - 1))

    # -- queries ------------------------------------------------------------

    def canonical_nodes(self, wlo: int, whi: int) -> list[int]:
        """Canonical nodes for 1-based w ranks [wlo, whi]."""
        return self.tree.canonical_nodes(wlo - 1, whi - 1)

    def _pred_count(self, u, g, m, order, coord, bound, stats) -> int:
        lo, hi = 0, m
        while lo < hi:
            mid = (lo + hi) // 2
            s = mid if order is None else order[mid]
            if coord[self.decode_pos(u, "C", g, s, stats, probe=True)] <= bound:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def translate(self, u: int, g: int, a, b, c, stats: Optional[QueryStats] = None):
        """Cell-local ranks of the predecessors of a, b, c among the cell's members."""
        cell = self.nodes[u].ccells[g]
        m = cell.m
        ax, ay, az = cell.apex
        ra = m if a >= ax else self._pred_count(u, g, m, None, self.X, a, stats)
        rb = m if b >= ay else self._pred_count(u, g, m, cell.yorder, self.Y, b, stats)
        rc = m if c >= az else self._pred_count(u, g, m, cell.zorder, self.Z, c, stats)
        return ra, rb, rc

    def query(self, q: Query5, stats: Optional[QueryStats] = None) -> list[Point4]:
        st = stats if stats is not None else QueryStats()
        out: list[int] = []
        args = self._positions(q)
        if args is not None:
            a, b, c, lo, hi = args
            units = self.tree.canonical_nodes(lo, hi)
            st.units += len(units)
            for u in units:
                self._visit(u, a, b, c, out, st, False)
        return [self.point_at(p) for p in out]

    def is_empty(self, q: Query5, stats: Optional[QueryStats] = None) -> bool:
        st = stats if stats is not None else QueryStats()
        args = self._positions(q)
        if args is None:
            return True
        a, b, c, lo, hi = args
        units = self.tree.canonical_nodes(lo, hi)
        st.units += len(units)
        return not any(self._visit(u, a, b, c, None, st, True) for u in units)

    def _visit(self, u, a, b, c, out, st, emptiness) -> bool:
        st.nodes_visited += 1
        tr = self.tree
        node = self.nodes[u]
        if node is None:
            pos = tr.lo[u]
            if self._leaf_hit(pos, a, b, c):
                if emptiness:
                    return True
                out.append(pos)
                st.points_decoded += 1
                st.hops[0] += 1
            return False
        g = node.locator.locate(a, b, c)
        if g is None:
            # q dominates more than t0 points of S(u)
            st.expanded += 1
            if emptiness:
                return True
            for v in tr.children[u]:
                self._visit(v, a, b, c, out, st, False)
            return False
        st.cells_probed += 1
        ra, rb, rc = self.translate(u, g, a, b, c, st)
        slots = query_small(node.ccells[g].sd, ra, rb, rc, st)
        if emptiness:
            return bool(slots)
        for x in slots:
            out.append(self.decode_pos(u, "C", g, x - 1, st))
        return False

    def visit_budget(self, k: int, units: int, c_v: float = 4.0) -> float:
        return units + c_v * (k / self.t0 + 1) * self.height * self.rho


def build_linear(points: Sequence[Point4], rho: Optional[int] = None, t0: Optional[int] = None,
                 config: Optional[LinearConfig] = None) -> LinearIndex:
    cfg = config or LinearConfig()
    if rho is not None or t0 is not None:
        cfg = LinearConfig(rho if rho is not None else cfg.rho, t0 if t0 is not None else cfg.t0,
                           cfg.overlay_classes, cfg.smalldom)
    return LinearIndex(points, cfg)


def canonical_nodes(idx: LinearIndex, wlo: int, whi: int) -> list[int]:
    return idx.canonical_nodes(wlo, whi)


def decode(idx: LinearIndex, ref: PointRef) -> Point4:
    return idx.decode(ref)


def translate_query_to_cell(idx: LinearIndex, node: int, cell: int, a, b, c):
    return idx.translate(node, cell, a, b, c)


def query_linear(idx: LinearIndex, q: Query5, stats: Optional[QueryStats] = None) -> set[Point4]:
    return set(idx.query(q, stats))
