"""Three-dimensional t-shallow cuttings for dominance ranges.

A cell is the set of points dominated by its apex.  A t-shallow cutting of S
covers every point whose level in S is at most t, and no covered point has
level above 2t.

Construction sweeps a plane upward in z.  A staircase of 2D quadrants covers
the level-<=t region of the points already swept; when an insertion pushes a
quadrant above 2t it is emitted as a 3D cell (its top is just below the
inserted point) and its x-range is re-covered greedily from the 2t+1 points it
held.  New quadrants stop at level ~1.5t so they absorb further insertions
before closing.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

LINEAR_SCAN_CELLS = 64
DEFAULT_SIZE_CONST = 8.0


class CuttingError(RuntimeError):
    """A structural guarantee of a shallow cutting was violated."""


class Cell:
    """Apex plus the member points it dominates, in cell-local rank space.

    ``members`` holds caller point indices sorted by x, so a member's x-rank
    is its position + 1.  ``yrank``/``zrank`` give each member's local y and z
    rank; ``yorder``/``zorder`` list member slots sorted by y and z.  The
    y/z tables are computed on first use.
    """

    __slots__ = ("apex", "members", "_ys", "_zs", "_orders")

    def __init__(self, apex, members, ys, zs):
        self.apex = apex
        self.members = tuple(members)
        self._ys = ys
        self._zs = zs
        self._orders = None

    def _tables(self):
        if self._orders is None:
            m = len(self.members)
            ym = [self._ys[p] for p in self.members]
            zm = [self._zs[p] for p in self.members]
            yorder = tuple(sorted(range(m), key=ym.__getitem__))
            zorder = tuple(sorted(range(m), key=zm.__getitem__))
            yrank = [0] * m
            zrank = [0] * m
            for r, g in enumerate(yorder, 1):
                yrank[g] = r
            for r, g in enumerate(zorder, 1):
                zrank[g] = r
            self._orders = (yorder, zorder, tuple(yrank), tuple(zrank))
        return self._orders

    @property
    def yorder(self):
        return self._tables()[0]

    @property
    def zorder(self):
        return self._tables()[1]

    @property
    def yrank(self):
        return self._tables()[2]

    @property
    def zrank(self):
        return self._tables()[3]

    def __len__(self) -> int:
        return len(self.members)

    def local_points(self) -> list[tuple[int, int, int]]:
        return [(g + 1, self.yrank[g], self.zrank[g]) for g in range(len(self.members))]

    def __repr__(self) -> str:
        return f"Cell(apex={self.apex}, size={len(self.members)})"


class ApexLocator:
    """Finds a cell whose apex dominates a query point.

    Binary search on sorted apex x, then a dominance scan over the remaining
    candidates (plain loop below 64 candidates, numpy mask above).
    """

    __slots__ = ("_order", "_sorted_ax", "_apexes", "_ay", "_az")

    def __init__(self, apexes):
        order = sorted(range(len(apexes)), key=lambda i: apexes[i])
        self._order = order
        self._apexes = [tuple(apexes[i]) for i in order]
        self._sorted_ax = [a[0] for a in self._apexes]
        self._ay = np.array([a[1] for a in self._apexes], dtype=np.int64)
        self._az = np.array([a[2] for a in self._apexes], dtype=np.int64)

    def __len__(self) -> int:
        return len(self._order)

    def locate(self, qx, qy, qz) -> Optional[int]:
        start = bisect_left(self._sorted_ax, qx)
        m = len(self._order)
        if m - start <= LINEAR_SCAN_CELLS:
            apexes = self._apexes
            for k in range(start, m):
                apex = apexes[k]
                if apex[1] >= qy and apex[2] >= qz:
                    return self._order[k]
            return None
        hit = (self._ay[start:] >= qy) & (self._az[start:] >= qz)
        k = int(hit.argmax())
        if not hit[k]:
            return None
        return self._order[start + k]


@dataclass
class Cutting:
    t: int
    cells: list[Cell]
    bound: tuple[int, int, int]
    locator: ApexLocator = field(init=False, repr=False)

    def __post_init__(self):
        self.locator = ApexLocator([c.apex for c in self.cells])

    def __len__(self) -> int:
        return len(self.cells)

    def locate_index(self, qx, qy, qz) -> Optional[int]:
        """Index of some cell whose apex dominates (qx, qy, qz), or None."""
        return self.locator.locate(qx, qy, qz)


def locate_cell(cut: Cutting, q) -> Optional[Cell]:
    i = cut.locate_index(q[0], q[1], q[2])
    return None if i is None else cut.cells[i]


def _relax(t: int) -> int:
    return max(t + 1, (3 * t) // 2)


def build_cutting(points: Sequence, t: int, bound=None) -> Cutting:
    """Build a t-shallow cutting of ``points`` (integer (x, y, z) triples).

    Coordinates must be distinct per axis and >= 1.  ``bound`` caps every apex
    coordinate (default: the maximum coordinate, which acts as infinity);
    points must lie inside it.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    zs = [p[2] for p in points]
    if bound is None:
        top = max(max(xs, default=0), max(ys, default=0), max(zs, default=0), 1)
        bound = (top, top, top)
    bx, by, bz = bound
    if len(xs) <= t:
        # every point has level <= t: one cell at the bound
        apexes, members = [(bx, by, bz)], [list(range(len(xs)))]
    else:
        apexes, members = _sweep(xs, ys, zs, t, bx, by, bz)
    cells = [
        Cell(apex, sorted(mem, key=xs.__getitem__), ys, zs)
        for apex, mem in zip(apexes, members)
    ]
    return Cutting(t, cells, (bx, by, bz))


def _sweep(xs, ys, zs, t, bx, by, bz):
    cap = 2 * t
    tau = _relax(t)
    AX = [bx]
    AY = [by]
    MEM: list[list[int]] = [[]]
    out_apex = []
    out_mem = []

    def recover(i):
        pts = sorted(MEM[i], key=xs.__getitem__)
        left = AX[i - 1] if i > 0 else -1
        right = AX[i]
        ceil = AY[i]
        floor = AY[i + 1] if i + 1 < len(AX) else -1
        new_ax, new_ay, new_mem = [], [], []
        ys_prefix: list[int] = []
        k = 0
        x0 = left + 1
        while x0 <= right:
            while k < len(pts) and xs[pts[k]] <= x0:
                y = ys[pts[k]]
                ys_prefix.insert(bisect_left(ys_prefix, y), y)
                k += 1
            ay = ceil if len(ys_prefix) <= t else min(ceil, ys_prefix[t] - 1)
            if ay <= floor:
                break
            ax = right
            cnt = 0
            for j in pts:
                if ys[j] <= ay:
                    cnt += 1
                    if cnt > tau:
                        ax = min(right, xs[j] - 1)
                        break
            new_ax.append(ax)
            new_ay.append(ay)
            new_mem.append([j for j in pts if xs[j] <= ax and ys[j] <= ay])
            x0 = ax + 1
        AX[i:i + 1] = new_ax
        AY[i:i + 1] = new_ay
        MEM[i:i + 1] = new_mem

    for p in sorted(range(len(xs)), key=zs.__getitem__):
        px, py = xs[p], ys[p]
        j = bisect_left(AX, px)
        closing = []
        while j < len(AX) and AY[j] >= py:
            MEM[j].append(p)
            if len(MEM[j]) > cap:
                closing.append(j)
            j += 1
        for i in reversed(closing):
            out_apex.append((AX[i], AY[i], zs[p] - 1))
            out_mem.append([q for q in MEM[i] if q != p])
            recover(i)
    for i in range(len(AX)):
        out_apex.append((AX[i], AY[i], bz))
        out_mem.append(MEM[i])
    return out_apex, out_mem


@dataclass
class VerifyReport:
    ok: bool
    violations: list[str]
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_cutting(points: Sequence, t: int, cut: Cutting, universe: Optional[int] = None,
                   size_const: float = DEFAULT_SIZE_CONST, max_n: int = 512) -> VerifyReport:
    """Exhaustively check a cutting over the integer grid [0, universe]^3.

    Checks coverage of every grid point of level <= t, that every apex has
    level <= 2t, that member lists are exactly the dominated points, and the
    size bound ``len(cut) <= size_const * n / t + 1``.
    """
    n = len(points)
    if n > max_n:
        raise ValueError(f"exhaustive verification limited to n <= {max_n}")
    P = np.array([tuple(p[:3]) for p in points], dtype=np.int64).reshape(n, 3)
    if universe is None:
        universe = int(max(P.max(initial=0), *cut.bound, 1))
    N = universe
    violations = []
    witness = None

    if len(cut) > size_const * n / t + 1:
        violations.append(f"size {len(cut)} exceeds {size_const}*n/t+1")

    for ci, cell in enumerate(cut.cells):
        ax, ay, az = cell.apex
        dom = np.nonzero((P[:, 0] <= ax) & (P[:, 1] <= ay) & (P[:, 2] <= az))[0]
        if len(dom) > 2 * t:
            violations.append(f"cell {ci} apex {cell.apex} has level {len(dom)} > 2t")
            witness = witness or ("cell", ci)
        if sorted(dom.tolist()) != sorted(cell.members):
            violations.append(f"cell {ci} member list mismatch")
            witness = witness or ("members", ci)

    # cov[x, y]: highest apex z among cells with ax >= x and ay >= y
    cov = np.full((N + 2, N + 2), -1, dtype=np.int64)
    for cell in cut.cells:
        ax, ay, az = (min(int(v), N) for v in cell.apex)
        if ax >= 0 and ay >= 0 and az > cov[ax, ay]:
            cov[ax, ay] = az
    cov = np.maximum.accumulate(cov[::-1, :], axis=0)[::-1, :]
    cov = np.maximum.accumulate(cov[:, ::-1], axis=1)[:, ::-1]

    # Slab sweep over x: cnt[y, z] = level of (x, y, z).
    cnt = np.zeros((N + 1, N + 1), dtype=np.int32)
    by_x: dict[int, list[int]] = {}
    for i in range(n):
        by_x.setdefault(int(P[i, 0]), []).append(i)
    for x in range(N + 1):
        for i in by_x.get(x, ()):
            cnt[P[i, 1]:, P[i, 2]:] += 1
        zmax = (cnt <= t).sum(axis=1) - 1
        bad = np.nonzero(cov[x, :N + 1] < zmax)[0]
        if len(bad):
            y = int(bad[0])
            violations.append(f"grid point {(x, y, int(zmax[y]))} of level <= t is uncovered")
            witness = witness or ("uncovered", (x, y, int(zmax[y])))
            break
    return VerifyReport(not violations, violations, witness)


def containing_cell_map(inner: Cutting, outer: Cutting) -> list[int]:
    """For each inner cell, the index of an outer cell whose apex dominates its apex."""
    out = []
    for i, cell in enumerate(inner.cells):
        j = outer.locate_index(*cell.apex)
        if j is None:
            raise CuttingError(f"inner cell {i} with apex {cell.apex} has no containing cell")
        out.append(j)
    return out
