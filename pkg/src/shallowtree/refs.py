"""Reference tables shared by both indexes.

A ``RefLevel`` is a shallow cutting over some tree unit whose cells exist
only to forward point references downward.  Each cell has a clipped
D-cutting; each point of a D-cell records which target (child or deeper
descendant) holds it and its x-rank in the target's containing cell.

Build-time fields (member positions, sorted member x) are dropped by
``finalize`` so a built index keeps only compact arrays.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from typing import Callable, Optional, Sequence

from .cuttings import ApexLocator, CuttingError, build_cutting
from .smalldom import SmallDomBatch
from .tree import compact

NULL = -1


class CorruptIndex(RuntimeError):
    """A reference could not be resolved."""


class DCell:
    __slots__ = ("apex", "m", "child", "fpp", "down", "members")

    def __init__(self, apex, members):
        self.apex = apex
        self.m = len(members)
        self.members = members
        self.child = None
        self.fpp = None
        self.down = None


class RefCell:
    """Cell of a forwarding cutting.

    ``dcell[s]``/``drank[s]``: D-cell holding slot s and its x-rank there
    (NULL when no D-cell covers it).  ``lift``/``lfx``: containing cell in
    the next coarser level and the slot map into it.
    """

    __slots__ = ("apex", "m", "dcell", "drank", "lift", "lfx", "members", "mx")

    def __init__(self, apex, members, X):
        self.apex = apex
        self.m = len(members)
        self.members = members
        self.mx = [X[p] for p in members]
        self.dcell = None
        self.drank = None
        self.lift = NULL
        self.lfx = None


class RefLevel:
    __slots__ = ("t", "dt", "cells", "dcells", "targets", "target_lo", "locator")

    def __init__(self, t, dt, cells, dcells):
        self.t = t
        self.dt = dt
        self.cells = cells
        self.dcells = dcells
        self.targets: list[int] = []
        self.target_lo: list[int] = []
        self.locator = ApexLocator([c.apex for c in cells])

    def locate(self, apex) -> Optional[int]:
        return self.locator.locate(apex[0], apex[1], apex[2])


def slot_of(cell, p: int, X) -> int:
    """x-rank (0-based) of position ``p`` in a build-time cell; raises if absent."""
    s = bisect_left(cell.mx, X[p])
    if s >= len(cell.members) or cell.members[s] != p:
        raise CuttingError(f"point {p} missing from cell with apex {cell.apex}")
    return s


def by_x(positions: Sequence[int], X) -> list[int]:
    return sorted(positions, key=X.__getitem__)


def build_ref_level(positions: Sequence[int], X, Y, Z, t: int, dt: int, n: int) -> RefLevel:
    """Cutting with parameter ``t`` over ``positions``; each cell gets a
    ``dt``-cutting of its members clipped to the cell's apex.

    Passing ``positions`` sorted by x keeps member sorting cheap.
    """
    pts = [(X[p], Y[p], Z[p]) for p in positions]
    cut = build_cutting(pts, t, bound=(n, n, n))
    cells, dcells = [], []
    for cell in cut.cells:
        members = [positions[i] for i in cell.members]
        rc = RefCell(cell.apex, members, X)
        sub = [pts[i] for i in cell.members]
        dcut = build_cutting(sub, dt, bound=cell.apex)
        dcell = [NULL] * rc.m
        drank = [0] * rc.m
        ds = []
        for j, dc in enumerate(dcut.cells):
            for rank, s in enumerate(dc.members):
                if dcell[s] == NULL:
                    dcell[s] = j
                    drank[s] = rank
            ds.append(DCell(dc.apex, [members[s] for s in dc.members]))
        rc.dcell = dcell
        rc.drank = drank
        cells.append(rc)
        dcells.append(ds)
    return RefLevel(t, dt, cells, dcells)


def link_targets(level: RefLevel, targets: Sequence[int], lo: Sequence[int], X,
                 target_level: Callable[[int], Optional[RefLevel]]) -> None:
    """Fill per-point target index, down pointers and target slots.

    ``targets`` are node ids in left-to-right order covering the level's
    points.  ``target_level(v)`` returns the level decoding continues in, or
    None when v's points are referenced directly (fpp = offset from lo[v]).
    Every D-cell must be contained in a cell of every target level.
    """
    level.targets = list(targets)
    level.target_lo = [lo[v] for v in targets]
    tlevels = [target_level(v) for v in targets]
    tlo = level.target_lo
    for ds in level.dcells:
        for d in ds:
            down = [NULL] * len(targets)
            for r, tl in enumerate(tlevels):
                if tl is not None:
                    j = tl.locate(d.apex)
                    if j is None:
                        raise CuttingError(
                            f"D-cell apex {d.apex} has no containing cell in target {targets[r]}")
                    down[r] = j
            child = []
            fpp = []
            for p in d.members:
                r = bisect_right(tlo, p) - 1
                child.append(r)
                tl = tlevels[r]
                if tl is None:
                    fpp.append(p - tlo[r])
                else:
                    fpp.append(slot_of(tl.cells[down[r]], p, X))
            d.down = down
            d.child = child
            d.fpp = fpp


def link_up(cells, upper: RefLevel, X) -> list[tuple[int, list[int]]]:
    """Containing cell in ``upper`` plus slot map for each build-time cell."""
    out = []
    for cell in cells:
        j = upper.locate(cell.apex)
        if j is None:
            raise CuttingError(f"cell apex {cell.apex} has no containing cell")
        target = upper.cells[j]
        out.append((j, [slot_of(target, p, X) for p in cell.members]))
    return out


def finalize(level: RefLevel) -> None:
    for c in level.cells:
        c.dcell = compact(c.dcell, signed=True)
        c.drank = compact(c.drank)
        if c.lfx is not None:
            c.lfx = compact(c.lfx)
        c.members = None
        c.mx = None
    for ds in level.dcells:
        for d in ds:
            d.child = compact(d.child)
            d.fpp = compact(d.fpp)
            d.down = compact(d.down, signed=True)
            d.members = None


class QueryCell:
    """Cell of a reporting cutting: small dominance structure over local ranks,
    member orders by y and z, and the link used to decode its slots."""

    __slots__ = ("apex", "m", "sd", "yorder", "zorder", "cont", "fx", "keys", "members", "mx")

    def __init__(self, apex, members, X, sd, yorder, zorder):
        self.apex = apex
        self.m = len(members)
        self.members = members
        self.mx = [X[p] for p in members]
        self.sd = sd
        self.yorder = yorder
        self.zorder = zorder
        self.cont = NULL
        self.fx = None
        self.keys = None


def build_query_cells(positions: Sequence[int], X, Y, Z, t: int, n: int, batch: SmallDomBatch):
    """Reporting cells over ``positions``; small structures are queued on ``batch``."""
    pts = [(X[p], Y[p], Z[p]) for p in positions]
    cut = build_cutting(pts, t, bound=(n, n, n))
    cells = []
    for cell in cut.cells:
        members = [positions[i] for i in cell.members]
        qc = QueryCell(cell.apex, members, X, None, compact(cell.yorder), compact(cell.zorder))
        batch.add(qc, cell.yrank, cell.zrank)
        cells.append(qc)
    return cells, cut.locator


def finalize_query_cells(cells) -> None:
    for c in cells:
        c.fx = compact(c.fx)
        c.members = None
        c.mx = None
