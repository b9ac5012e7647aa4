"""Faster 5-sided range reporting index built on sibling runs.

For every internal node u and every run of children l..r the index keeps a
t0-shallow cutting of S(u, l, r) (the union of those children's sets) with a
small dominance structure per cell.  A query visits O(height) runs instead of
O(height * rho) nodes.

Decoding uses depth classes: class(u) is the largest i <= K with rho^i
dividing depth(u) (the root has class K, where rho^K >= height).  A run's
reference level has parameter 4 t_{c+1} (t_i = rho^i t0, c = class(u)) and
forwards each point to the (c+1)-descendant holding it, landing in that
node's full-run reference level.  Each hop raises the class, so any decode
takes at most K + 1 hops.  Runs with at most t_{c+1} points skip the level
and reference leaves directly.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .geom import Point4, Query5
from .linear import _TreeIndex
from .refs import (NULL, CorruptIndex, build_query_cells, build_ref_level, finalize,
                   by_x, finalize_query_cells, link_targets, link_up)
from .smalldom import DEFAULT_CONFIG, SmallDomBatch, SmallDomConfig, query_small
from .stats import QueryStats
from .tree import bitlen, compact, default_t0

DEFAULT_FAST_RHO = 4


@dataclass(frozen=True)
class FastConfig:
    rho: int = DEFAULT_FAST_RHO
    t0: Optional[int] = None
    key_bits: int = 8
    smalldom: SmallDomConfig = DEFAULT_CONFIG

    def resolve(self, n: int) -> tuple[int, int]:
        t0 = self.t0 if self.t0 is not None else default_t0(n)
        if self.rho < 2:
            raise ValueError("rho must be >= 2")
        if t0 < 4:
            raise ValueError("t0 must be >= 4")
        if self.key_bits < 0:
            raise ValueError("key_bits must be >= 0")
        return self.rho, t0


def realized_eps(n: int, rho: int) -> float:
    """eps with rho = log^eps n (log base 2); inf when log log n <= 0."""
    lg = math.log2(n) if n > 1 else 0.0
    if lg <= 1.0:
        return math.inf
    return math.log(rho) / math.log(lg)


def hop_limit(n: int, rho: int) -> int:
    eps = realized_eps(n, rho)
    inv = 0.0 if math.isinf(eps) else 1.0 / eps
    return math.ceil(inv - 1e-9) + 1


class FastRef(NamedTuple):
    node: int
    l: int
    r: int
    cell: int
    rank: int


class PairUnit:
    __slots__ = ("lo", "hi", "locator", "ccells", "overlay")

    def __init__(self, lo, hi, locator, ccells, overlay):
        self.lo = lo
        self.hi = hi
        self.locator = locator
        self.ccells = ccells
        self.overlay = overlay


class FastIndex(_TreeIndex):
    structure = "fast"

    def __init__(self, points: Sequence[Point4], config: FastConfig = FastConfig()):
        rho, t0 = config.resolve(len(points))
        self._init_leaves(points, rho)
        self.config = config
        self.t0 = t0
        K = 0
        while rho ** K < self.height:
            K += 1
        self.top_class = K
        self.key_shift = max(0, bitlen(self.n) - config.key_bits)
        self.units: dict[tuple[int, int, int], PairUnit] = {}
        self._build()

    # -- construction -------------------------------------------------------

    def node_class(self, u: int) -> int:
        d = self.tree.depth[u]
        i = 0
        while i < self.top_class and d % self.rho ** (i + 1) == 0:
            i += 1
        return i

    def level_t(self, i: int) -> int:
        return self.rho ** i * self.t0

    def full_unit(self, v: int) -> Optional[PairUnit]:
        ch = self.tree.children[v]
        return self.units.get((v, 0, len(ch) - 1)) if ch else None

    def _full_overlay(self, v: int):
        unit = self.full_unit(v)
        return None if unit is None else unit.overlay

    def _build(self):
        tr = self.tree
        X, Y, Z, n, t0 = self.X, self.Y, self.Z, self.n, self.t0
        shift = self.key_shift
        batch = SmallDomBatch(self.config.smalldom)
        for u in sorted(tr.internal_nodes(), key=lambda u: -tr.depth[u]):
            c = self.node_class(u)
            tnext = self.level_t(c + 1)
            step = self.rho ** (c + 1)
            desc = tr.descendants_at(u, (tr.depth[u] // step + 1) * step)
            desc_lo = [tr.lo[v] for v in desc]
            ch = tr.children[u]
            for l in range(len(ch)):
                for r in range(l, len(ch)):
                    lo, hi = tr.lo[ch[l]], tr.hi[ch[r]]
                    positions = by_x(range(lo, hi), X)
                    overlay = None
                    if hi - lo > tnext:
                        overlay = build_ref_level(positions, X, Y, Z, 4 * tnext, 2 * tnext, n)
                        targets = desc[bisect_left(desc_lo, lo):bisect_left(desc_lo, hi)]
                        link_targets(overlay, targets, tr.lo, X, self._full_overlay)
                    ccells, locator = build_query_cells(positions, X, Y, Z, t0, n, batch)
                    if overlay is not None:
                        for cell, (j, fx) in zip(ccells, link_up(ccells, overlay, X)):
                            cell.cont, cell.fx = j, fx
                    else:
                        for cell in ccells:
                            cell.fx = [p - lo for p in cell.members]
                    for cell in ccells:
                        ms = cell.members
                        cell.keys = (
                            compact([x >> shift for x in cell.mx]),
                            compact([Y[ms[s]] >> shift for s in cell.yorder]),
                            compact([Z[ms[s]] >> shift for s in cell.zorder]),
                        )
                    finalize_query_cells(ccells)
                    if overlay is not None and (l, r) != (0, len(ch) - 1):
                        finalize(overlay)  # only full runs are ever targeted
                    self.units[(u, l, r)] = PairUnit(lo, hi, locator, ccells, overlay)
        batch.flush()
        for u in tr.internal_nodes():
            unit = self.full_unit(u)
            if unit.overlay is not None:
                finalize(unit.overlay)

    # -- decoding -----------------------------------------------------------

    @property
    def hop_bound(self) -> int:
        return hop_limit(self.n, self.rho)

    def decode_pos(self, unit: PairUnit, g: int, s: int, stats: Optional[QueryStats] = None,
                   probe: bool = False) -> int:
        lo_of = self.tree.lo
        try:
            cc = unit.ccells[g]
            hops = 1
            if cc.cont == NULL:
                pos = unit.lo + cc.fx[s]
            else:
                lev = unit.overlay
                g = cc.cont
                s = cc.fx[s]
                while True:
                    rc = lev.cells[g]
                    j = rc.dcell[s]
                    if j == NULL:
                        raise CorruptIndex(f"slot {s} of overlay cell {g} has no D-cell")
                    d = lev.dcells[g][j]
                    s2 = rc.drank[s]
                    r = d.child[s2]
                    v = lev.targets[r]
                    dn = d.down[r]
                    if dn == NULL:
                        pos = lo_of[v] + d.fpp[s2]
                        break
                    lev = self.full_unit(v).overlay
                    g = dn
                    s = d.fpp[s2]
                    hops += 1
        except (IndexError, TypeError, AttributeError) as exc:
            raise CorruptIndex(f"unresolvable reference: {exc}") from exc
        if stats is not None:
            if probe:
                stats.probe_decodes += 1
            else:
                stats.points_decoded += 1
                stats.hops[hops] += 1
        return pos

    def decode_hops(self, unit: PairUnit, g: int, s: int) -> tuple[int, int]:
        st = QueryStats()
        pos = self.decode_pos(unit, g, s, st)
        return pos, st.hops_max

    def decode(self, ref: FastRef) -> Point4:
        unit = self.units[(ref.node, ref.l, ref.r)]
        return self.point_at(self.decode_pos(unit, ref.cell, ref.rank - 1))

    # -- queries ------------------------------------------------------------

    def canonical_pairs(self, wlo: int, whi: int) -> list[tuple[int, int, int]]:
        """Canonical (node, l, r) runs for 1-based w ranks [wlo, whi]; l, r 0-based."""
        return self.tree.canonical_pairs(wlo - 1, whi - 1)

    def predecessor(self, unit: PairUnit, g: int, axis: int, bound: int,
                    accelerate: bool = True, stats: Optional[QueryStats] = None) -> int:
        """Number of cell members whose ``axis`` coordinate is <= bound."""
        cell = unit.ccells[g]
        coord = (self.X, self.Y, self.Z)[axis]
        order = (None, cell.yorder, cell.zorder)[axis]
        lo, hi = 0, cell.m
        if accelerate:
            keys = cell.keys[axis]
            kb = bound >> self.key_shift
            lo = bisect_left(keys, kb)
            hi = bisect_right(keys, kb, lo)
        while lo < hi:
            mid = (lo + hi) // 2
            s = mid if order is None else order[mid]
            if coord[self.decode_pos(unit, g, s, stats, probe=True)] <= bound:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def translate(self, unit: PairUnit, g: int, a, b, c, stats=None, accelerate=True):
        cell = unit.ccells[g]
        m = cell.m
        ax, ay, az = cell.apex
        ra = m if a >= ax else self.predecessor(unit, g, 0, a, accelerate, stats)
        rb = m if b >= ay else self.predecessor(unit, g, 1, b, accelerate, stats)
        rc = m if c >= az else self.predecessor(unit, g, 2, c, accelerate, stats)
        return ra, rb, rc

    def query(self, q: Query5, stats: Optional[QueryStats] = None) -> list[Point4]:
        st = stats if stats is not None else QueryStats()
        out: list[int] = []
        args = self._positions(q)
        if args is not None:
            a, b, c, lo, hi = args
            triples = self.tree.canonical_pairs(lo, hi)
            st.units += len(triples)
            for u, l, r in triples:
                self._visit(u, l, r, a, b, c, out, st, False)
        return [self.point_at(p) for p in out]

    def is_empty(self, q: Query5, stats: Optional[QueryStats] = None) -> bool:
        st = stats if stats is not None else QueryStats()
        args = self._positions(q)
        if args is None:
            return True
        a, b, c, lo, hi = args
        triples = self.tree.canonical_pairs(lo, hi)
        st.units += len(triples)
        return not any(self._visit(u, l, r, a, b, c, None, st, True) for u, l, r in triples)

    def _visit(self, u, l, r, a, b, c, out, st, emptiness) -> bool:
        st.nodes_visited += 1
        tr = self.tree
        unit = self.units.get((u, l, r))
        if unit is None:
            pos = tr.lo[u]
            if self._leaf_hit(pos, a, b, c):
                if emptiness:
                    return True
                out.append(pos)
                st.points_decoded += 1
                st.hops[0] += 1
            return False
        g = unit.locator.locate(a, b, c)
        if g is None:
            st.expanded += 1
            if emptiness:
                return True
            for v in tr.children[u][l:r + 1]:
                self._visit(v, 0, len(tr.children[v]) - 1, a, b, c, out, st, False)
            return False
        st.cells_probed += 1
        ra, rb, rc = self.translate(unit, g, a, b, c, st)
        slots = query_small(unit.ccells[g].sd, ra, rb, rc, st)
        if emptiness:
            return bool(slots)
        for x in slots:
            out.append(self.decode_pos(unit, g, x - 1, st))
        return False

    def visit_budget(self, k: int, units: int, c_v: float = 4.0) -> float:
        return units + c_v * (k / self.t0 + 1) * self.height * self.rho


def build_fast(points: Sequence[Point4], rho: Optional[int] = None, t0: Optional[int] = None,
               config: Optional[FastConfig] = None) -> FastIndex:
    cfg = config or FastConfig()
    if rho is not None or t0 is not None:
        cfg = FastConfig(rho if rho is not None else cfg.rho, t0 if t0 is not None else cfg.t0,
                         cfg.key_bits, cfg.smalldom)
    return FastIndex(points, cfg)


def canonical_pairs(idx: FastIndex, wlo: int, whi: int) -> list[tuple[int, int, int]]:
    return idx.canonical_pairs(wlo, whi)


def decode_fast(idx: FastIndex, ref: FastRef) -> Point4:
    return idx.decode(ref)


def query_fast(idx: FastIndex, q: Query5, stats: Optional[QueryStats] = None) -> set[Point4]:
    return set(idx.query(q, stats))
