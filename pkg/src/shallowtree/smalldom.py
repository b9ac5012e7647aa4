"""Dominance reporting on a small rank-space point set by recursive grids.

The set is split into sqrt(t') columns (by x) and sqrt(t') rows (by y).  Each
non-empty column/row intersection contributes a meta-point (i, j, z_min) and
a z-sorted list L_ij.  Every column and every row is built recursively; sets
at or below the base threshold are kept as a z-sorted list.

The whole tree lives in one flat integer array.  Node layouts:

    base:  0, s, then s records (z, x, y) sorted by z
    grid:  1, kc, kr, colmin[kc], colmax[kc], rowmin[kr], rowmax[kr],
           nmeta, nmeta records (z_min, i, j, lofs, llen) sorted by z_min,
           col_child[kc], row_child[kr], then the L lists as (z, x) pairs

Nodes of one structure are laid out breadth first; pointers (child offsets,
list offsets) are relative to the start of the structure's array.

Member slots are local x-ranks, so a reported slot is the point's x value.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

BASE = 0
GRID = 1
META_REC = 5


@dataclass(frozen=True)
class SmallDomConfig:
    t_prime: int = 16
    base_threshold: int = 16

    def __post_init__(self):
        if self.t_prime < 4:
            raise ValueError("t' must be >= 4")
        if self.base_threshold < 1:
            raise ValueError("base threshold must be >= 1")

    @property
    def arity(self) -> int:
        return max(2, math.isqrt(self.t_prime))


DEFAULT_CONFIG = SmallDomConfig()


class SmallDom:
    """Flat array plus the number of entries that are in-structure pointers."""

    __slots__ = ("data", "size", "pointers")

    def __init__(self, data, size: int, pointers: int = 0):
        self.data = data
        self.size = size
        self.pointers = pointers

    def __len__(self) -> int:
        return self.size

    @property
    def entries(self) -> int:
        return len(self.data)

    def design_bits(self) -> int:
        """Coordinates and counts at cell-rank width, pointers at offset width."""
        n = len(self.data)
        narrow = max(1, self.size.bit_length())
        wide = max(1, n.bit_length())
        return (n - self.pointers) * narrow + self.pointers * wide


def build_small(points: Sequence, cfg: SmallDomConfig = DEFAULT_CONFIG) -> SmallDom:
    """``points`` are (x, y, z) local ranks with x a permutation of 1..m."""
    pts = sorted(points)
    return build_many([([p[1] for p in pts], [p[2] for p in pts])], cfg)[0]


def _segment_starts(keys: np.ndarray) -> np.ndarray:
    """Index of the first element of each element's run in a sorted key array."""
    if not len(keys):
        return np.zeros(0, dtype=np.int64)
    first = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    counts = np.diff(np.r_[first, len(keys)])
    return np.repeat(first, counts)


def _ranges(counts: np.ndarray) -> np.ndarray:
    """Concatenation of arange(c) for each c in counts."""
    total = int(counts.sum())
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    return np.arange(total, dtype=np.int64) - starts


class _Fields:
    """Scattered writes (node, rel, value, ref); ref >= 0 adds that node's offset."""

    def __init__(self):
        self.parts = []

    def put(self, node, rel, val, ref=None):
        node = np.asarray(node, dtype=np.int64)
        rel = np.broadcast_to(np.asarray(rel, dtype=np.int64), node.shape)
        val = np.broadcast_to(np.asarray(val, dtype=np.int64), node.shape)
        ref = np.full(node.shape, -1, dtype=np.int64) if ref is None else np.asarray(ref, dtype=np.int64)
        self.parts.append((node, rel, val, ref))

    def arrays(self):
        return [np.concatenate([p[i] for p in self.parts]) for i in range(4)]


def build_many(sets: Sequence, cfg: SmallDomConfig = DEFAULT_CONFIG) -> list[SmallDom]:
    """Build one structure per set; each set is (ys, zs) listed in x order.

    All sets are processed together one recursion depth at a time.
    """
    k = cfg.arity
    base = cfg.base_threshold
    nsets = len(sets)
    if not nsets:
        return []
    sizes = np.array([len(ys) for ys, _ in sets], dtype=np.int64)
    o_node = np.repeat(np.arange(nsets, dtype=np.int64), sizes)
    o_x = _ranges(sizes) + 1
    o_y = np.fromiter((v for ys, _ in sets for v in ys), dtype=np.int64, count=int(sizes.sum()))
    o_z = np.fromiter((v for _, zs in sets for v in zs), dtype=np.int64, count=int(sizes.sum()))

    # composite sort keys: node * zspan + coordinate (coordinates are < zspan)
    zspan = int(sizes.max()) + 1
    F = _Fields()
    pointers = np.zeros(nsets, dtype=np.int64)
    node_cell = [np.arange(nsets, dtype=np.int64)]
    node_len = []
    id0, cur_cell, cur_size = 0, node_cell[0], sizes
    while len(cur_size):
        nn = len(cur_size)
        ids = np.arange(id0, id0 + nn, dtype=np.int64)
        lens = np.zeros(nn, dtype=np.int64)
        isbase = cur_size <= base
        local = o_node - id0
        ob = isbase[local]

        # base nodes: BASE, s, then (z, x, y) by z
        bids = ids[isbase]
        F.put(bids, 0, BASE)
        F.put(bids, 1, cur_size[isbase])
        lens[isbase] = 2 + 3 * cur_size[isbase]
        bn, bx, by, bz = o_node[ob], o_x[ob], o_y[ob], o_z[ob]
        order = np.argsort(bn * zspan + bz, kind="stable")
        bn, bx, by, bz = bn[order], bx[order], by[order], bz[order]
        r = np.arange(len(bn), dtype=np.int64) - _segment_starts(bn)
        F.put(bn, 2 + 3 * r, bz)
        F.put(bn, 3 + 3 * r, bx)
        F.put(bn, 4 + 3 * r, by)

        # grid nodes
        isgrid = ~isbase
        gids = ids[isgrid]
        og = ~ob
        gn, gx, gy, gz = o_node[og], o_x[og], o_y[og], o_z[og]
        if not len(gids):
            node_len.append(lens)
            break
        s_node = np.zeros(nn, dtype=np.int64)
        s_node[isgrid] = cur_size[isgrid]
        cs_node = -(-s_node // k)
        kc_node = np.zeros(nn, dtype=np.int64)
        kc_node[isgrid] = -(-s_node[isgrid] // cs_node[isgrid])
        gl = gn - id0
        idx = np.arange(len(gn), dtype=np.int64)
        start = _segment_starts(gn)
        cs = cs_node[gl]
        col = (idx - start) // cs
        ordy = np.argsort(gn * zspan + gy, kind="stable")
        ypos = np.empty_like(idx)
        ypos[ordy] = idx - start[ordy]
        row = ypos // cs

        kc = kc_node[isgrid]
        sg = s_node[isgrid]
        csg = cs_node[isgrid]
        first = np.zeros(nn, dtype=np.int64)
        if len(gn):
            heads = np.flatnonzero(np.r_[True, gn[1:] != gn[:-1]])
            first[gl[heads]] = heads
        firstg = first[isgrid]
        F.put(gids, 0, GRID)
        F.put(gids, 1, kc)
        F.put(gids, 2, kc)
        pn = np.repeat(gids, kc)
        pc = _ranges(kc)
        pkc = np.repeat(kc, kc)
        pfirst = np.repeat(firstg, kc)
        pcs = np.repeat(csg, kc)
        pend = pfirst + np.repeat(sg, kc)
        lo_i = pfirst + pc * pcs
        hi_i = np.minimum(lo_i + pcs, pend) - 1
        F.put(pn, 3 + pc, gx[lo_i])
        F.put(pn, 3 + pkc + pc, gx[hi_i])
        F.put(pn, 3 + 2 * pkc + pc, gy[ordy[lo_i]])
        F.put(pn, 3 + 3 * pkc + pc, gy[ordy[hi_i]])
        h_node = 3 + 4 * kc_node

        # intersections: z-sorted lists, meta records sorted by z_min
        gkey = (gn * k + col) * k + row
        order = np.argsort(gkey * zspan + gz, kind="stable")
        sk, sx, sz, sn = gkey[order], gx[order], gz[order], gn[order]
        heads = np.flatnonzero(np.r_[True, sk[1:] != sk[:-1]])
        glen = np.diff(np.r_[heads, len(sk)])
        gnode = sn[heads]
        gzmin = sz[heads]
        gcol = col[order][heads]
        grow = row[order][heads]
        morder = np.argsort(gnode * zspan + gzmin, kind="stable")
        mnode = gnode[morder]
        mi = np.arange(len(mnode), dtype=np.int64) - _segment_starts(mnode)
        nmeta = np.bincount(mnode - id0, minlength=nn)
        mlen = glen[morder]
        cum = np.cumsum(mlen) - mlen
        lcum = cum - cum[_segment_starts(mnode)]
        ml = mnode - id0
        L0 = h_node + 1 + 5 * nmeta + 2 * kc_node
        F.put(gids, h_node[isgrid], nmeta[isgrid])
        rec = h_node[ml] + 1 + 5 * mi
        F.put(mnode, rec, gzmin[morder])
        F.put(mnode, rec + 1, gcol[morder])
        F.put(mnode, rec + 2, grow[morder])
        F.put(mnode, rec + 3, L0[ml] + 2 * lcum, ref=mnode)
        F.put(mnode, rec + 4, mlen)
        # list entries: position of each sorted occurrence inside its list
        glcum = np.empty_like(lcum)
        glcum[morder] = lcum
        gidx = np.repeat(np.arange(len(heads)), glen)
        within = np.arange(len(sk), dtype=np.int64) - heads[gidx]
        lrel = L0[sn - id0] + 2 * (glcum[gidx] + within)
        F.put(sn, lrel, sz)
        F.put(sn, lrel + 1, sx)
        lens[isgrid] = L0[isgrid] + 2 * sg
        np.add.at(pointers, cur_cell[isgrid], 2 * kc + nmeta[isgrid])

        # children: columns first, then rows
        nchild = 2 * kc
        cbase = np.zeros(nn, dtype=np.int64)
        next_id = id0 + nn
        cbase[isgrid] = next_id + np.cumsum(nchild) - nchild
        cp = h_node + 1 + 5 * nmeta
        qn = np.repeat(gids, nchild)
        qc = _ranges(nchild)
        F.put(qn, cp[qn - id0] + qc, 0, ref=cbase[qn - id0] + qc)

        col_child = cbase[gl] + col
        row_child = cbase[gl] + kc_node[gl] + row
        c_node = np.concatenate([col_child, row_child])
        c_x = np.concatenate([gx, gx])
        c_y = np.concatenate([gy, gy])
        c_z = np.concatenate([gz, gz])
        order = np.argsort(c_node * zspan + c_x, kind="stable")
        o_node, o_x, o_y, o_z = c_node[order], c_x[order], c_y[order], c_z[order]

        node_len.append(lens)
        total_children = int(nchild.sum())
        parent_cell = np.repeat(cur_cell[isgrid], nchild)
        cur_size = np.bincount(o_node - next_id, minlength=total_children).astype(np.int64)
        cur_cell = parent_cell
        node_cell.append(cur_cell)
        id0 = next_id
    cell = np.concatenate(node_cell)
    length = np.concatenate(node_len)
    order = np.argsort(cell, kind="stable")
    ordered_len = length[order]
    cum = np.cumsum(ordered_len) - ordered_len
    cell_total = np.bincount(cell, weights=length, minlength=nsets).astype(np.int64)
    cell_base = np.cumsum(cell_total) - cell_total
    offset = np.empty_like(cum)
    offset[order] = cum - cell_base[cell[order]]

    node, rel, val, ref = F.arrays()
    val = val + np.where(ref >= 0, offset[np.maximum(ref, 0)], 0)
    pos = cell_base[cell[node]] + offset[node] + rel
    data = np.zeros(int(cell_total.sum()), dtype=np.int64)
    data[pos] = val
    out = []
    for i in range(nsets):
        chunk = data[cell_base[i]:cell_base[i] + cell_total[i]]
        top = int(chunk.max()) if len(chunk) else 0
        code = "H" if top < 1 << 16 else "I"
        arr = array(code)
        arr.frombytes(chunk.astype(np.uint16 if code == "H" else np.uint32).tobytes())
        out.append(SmallDom(arr, int(sizes[i]), int(pointers[i])))
    return out


class SmallDomBatch:
    """Collects sets and builds them together; ``flush`` assigns ``target.sd``."""

    def __init__(self, cfg: SmallDomConfig = DEFAULT_CONFIG, max_points: int = 20_000):
        self.cfg = cfg
        self.max_points = max_points
        self._targets = []
        self._sets = []
        self._points = 0

    def add(self, target, ys, zs) -> None:
        self._targets.append(target)
        self._sets.append((ys, zs))
        self._points += len(ys)
        if self._points >= self.max_points:
            self.flush()

    def flush(self) -> None:
        for target, sd in zip(self._targets, build_many(self._sets, self.cfg)):
            target.sd = sd
        self._targets, self._sets, self._points = [], [], 0


def query_small(sd: SmallDom, a: int, b: int, c: int, stats=None) -> list[int]:
    """Slots of all members with x <= a, y <= b, z <= c."""
    out: list[int] = []
    if sd.size and a >= 1 and b >= 1 and c >= 1:
        touched = _query(sd.data, 0, a, b, c, out)
        if stats is not None:
            stats.touched += touched
    return out


def _query(A, o, a, b, c, out) -> int:
    touched = 0
    if A[o] == BASE:
        end = o + 2 + 3 * A[o + 1]
        for e in range(o + 2, end, 3):
            if A[e] > c:
                break
            touched += 1
            x = A[e + 1]
            if x <= a and A[e + 2] <= b:
                out.append(x)
        return touched
    kc = A[o + 1]
    kr = A[o + 2]
    colmin = o + 3
    colmax = colmin + kc
    rowmin = colmax + kc
    rowmax = rowmin + kr
    if a < A[colmin] or b < A[rowmin]:
        return 0
    mp = rowmax + kr
    nmeta = A[mp]
    cc = mp + 1 + META_REC * nmeta
    rc = cc + kc
    # columns / rows reaching into the query
    nc = 1
    while nc < kc and A[colmin + nc] <= a:
        nc += 1
    nr = 1
    while nr < kr and A[rowmin + nr] <= b:
        nr += 1
    if nc == 1:
        return _query(A, A[cc], a, b, c, out)
    if nr == 1:
        return _query(A, A[rc], a, b, c, out)
    # r, u: number of fully covered columns / rows
    r = 0
    while r < kc and A[colmax + r] <= a:
        r += 1
    u = 0
    while u < kr and A[rowmax + u] <= b:
        u += 1
    for rec in range(mp + 1, cc, META_REC):
        if A[rec] > c:
            break
        touched += 1
        if A[rec + 1] < r and A[rec + 2] < u:
            lo = A[rec + 3]
            for e in range(lo, lo + 2 * A[rec + 4], 2):
                if A[e] > c:
                    break
                touched += 1
                out.append(A[e + 1])
    if r < kc and A[colmin + r] <= a:
        bcol = b if u >= kr else min(b, A[rowmin + u] - 1)
        touched += _query(A, A[cc + r], a, bcol, c, out)
    if u < kr and A[rowmin + u] <= b:
        touched += _query(A, A[rc + u], a, b, c, out)
    return touched


@dataclass
class GridNode:
    """Decoded view of one node, for structural audits."""

    base: bool
    points: list[tuple[int, int, int]]
    columns: list[list[tuple[int, int, int]]] = field(default_factory=list)
    rows: list[list[tuple[int, int, int]]] = field(default_factory=list)
    meta: list[tuple[int, int, int]] = field(default_factory=list)
    lists: dict[tuple[int, int], list[tuple[int, int]]] = field(default_factory=dict)
    col_children: list["GridNode"] = field(default_factory=list)
    row_children: list["GridNode"] = field(default_factory=list)

    def all_points(self) -> list[tuple[int, int, int]]:
        return sorted(self.points)

    def depth(self) -> int:
        if self.base:
            return 0
        return 1 + max(ch.depth() for ch in self.col_children + self.row_children)


def inspect_small(sd: SmallDom, o: int = 0) -> Optional[GridNode]:
    A = sd.data
    if not len(A):
        return None
    if A[o] == BASE:
        s = A[o + 1]
        pts = [(A[e + 1], A[e + 2], A[e]) for e in range(o + 2, o + 2 + 3 * s, 3)]
        return GridNode(True, pts)
    kc, kr = A[o + 1], A[o + 2]
    mp = o + 3 + 2 * kc + 2 * kr
    nmeta = A[mp]
    cc = mp + 1 + META_REC * nmeta
    meta, lists = [], {}
    for rec in range(mp + 1, cc, META_REC):
        z, i, j, lo, ln = A[rec:rec + META_REC]
        meta.append((i, j, z))
        lists[(i, j)] = [(A[e], A[e + 1]) for e in range(lo, lo + 2 * ln, 2)]
    col_children = [inspect_small(sd, A[cc + i]) for i in range(kc)]
    row_children = [inspect_small(sd, A[cc + kc + j]) for j in range(kr)]
    node = GridNode(False, [], meta=meta, lists=lists,
                    col_children=col_children, row_children=row_children)
    node.columns = [ch.all_points() for ch in col_children]
    node.rows = [ch.all_points() for ch in row_children]
    node.points = sorted(p for col in node.columns for p in col)
    return node
