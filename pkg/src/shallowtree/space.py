"""Design-bit accounting for built indexes.

Each stored quantity is charged the bits needed for its value range: a
coordinate or pointer costs ``W = bitlen(n)`` bits, a cell-local rank in a
cell of m points costs ``bitlen(m)`` bits.  This is what a bit-packed layout
would occupy; the physical count reports the machine arrays actually held.
"""

from __future__ import annotations

import math
import sys
from array import array

from .fast import FastIndex
from .linear import LinearIndex
from .stats import SpaceReport
from .tree import bitlen


def _nbytes(obj) -> int:
    if obj is None:
        return 0
    if isinstance(obj, array):
        return len(obj) * obj.itemsize
    if isinstance(obj, (list, tuple)):
        return 8 * len(obj)
    return sys.getsizeof(obj)


def _query_cells(rep: SpaceReport, cells, W: int, target_size, with_keys: int = 0) -> None:
    for cc in cells:
        m = cc.m
        rep.add("query_cells", 3 * W + W + m * (2 * bitlen(m) + bitlen(target_size(cc))))
        sd = cc.sd
        rep.add("small_dom", sd.design_bits())
        if with_keys:
            rep.add("pred_keys", 3 * m * with_keys)
        rep.physical_bytes += (_nbytes(cc.yorder) + _nbytes(cc.zorder) + _nbytes(cc.fx)
                               + _nbytes(sd.data))
        if cc.keys is not None:
            rep.physical_bytes += sum(_nbytes(k) for k in cc.keys)


def _level(rep: SpaceReport, level, name: str, W: int, upper, target_cell_size) -> None:
    ntar = max(1, len(level.targets))
    for g, rc in enumerate(level.cells):
        ds = level.dcells[g]
        dmax = max((d.m for d in ds), default=0)
        bits = 3 * W + rc.m * (bitlen(len(ds)) + bitlen(dmax))
        if upper is not None and rc.lift >= 0:
            bits += W + rc.m * bitlen(upper.cells[rc.lift].m)
        rep.add(f"{name}_cells", bits)
        rep.physical_bytes += _nbytes(rc.dcell) + _nbytes(rc.drank) + _nbytes(rc.lfx)
        for d in ds:
            tmax = max((target_cell_size(level, d, r) for r in set(d.child)), default=0)
            rep.add(f"{name}_dcells", 3 * W + ntar * W + d.m * (bitlen(ntar - 1) + bitlen(tmax)))
            rep.physical_bytes += _nbytes(d.child) + _nbytes(d.fpp) + _nbytes(d.down)


def _base(idx, structure: str) -> SpaceReport:
    n = idx.n
    W = bitlen(n)
    rep = SpaceReport(structure, n, W)
    rep.add("leaves", n * 4 * W)
    tr = idx.tree
    rep.add("tree", sum(len(tr.children[u]) + 1 for u in tr.internal_nodes()) * W)
    rep.physical_bytes += 4 * 8 * n + 6 * 8 * len(tr)
    return rep


def space_linear(idx: LinearIndex) -> SpaceReport:
    rep = _base(idx, "linear")
    W = rep.word_bits
    tr = idx.tree
    for u, node in enumerate(idx.nodes):
        if node is None:
            continue
        lev0 = node.levels[0]
        _query_cells(rep, node.ccells, W, lambda cc: lev0.cells[cc.cont].m)
        for i, lev in enumerate(node.levels):
            upper = node.levels[i + 1] if i + 1 < len(node.levels) else None

            def tsize(level, d, r, i=i):
                v = level.targets[r]
                k = d.down[r]
                if k < 0:
                    return tr.size(v)
                return idx.nodes[v].levels[i].cells[k].m

            _level(rep, lev, f"class{i}", W, upper, tsize)
    return rep


def space_fast(idx: FastIndex) -> SpaceReport:
    rep = _base(idx, "fast")
    W = rep.word_bits
    tr = idx.tree
    kb = min(idx.config.key_bits, W)
    for unit in idx.units.values():
        ov = unit.overlay
        size = unit.hi - unit.lo
        _query_cells(rep, unit.ccells, W,
                     lambda cc: size if ov is None else ov.cells[cc.cont].m, with_keys=kb)
        if ov is None:
            continue

        def tsize(level, d, r):
            v = level.targets[r]
            k = d.down[r]
            if k < 0:
                return tr.size(v)
            return idx.full_unit(v).overlay.cells[k].m

        _level(rep, ov, "overlay", W, None, tsize)
    return rep


def space_report(idx) -> SpaceReport:
    if isinstance(idx, LinearIndex):
        return space_linear(idx)
    if isinstance(idx, FastIndex):
        return space_fast(idx)
    raise TypeError(f"no space accounting for {type(idx).__name__}")


def fast_word_budget(n: int, rho: int, c_f: float = 4.0) -> float:
    """c_f * log^{3 eps} n with rho = log^eps n, i.e. c_f * rho^3 words per point."""
    return c_f * rho ** 3


def realized_log_eps(n: int, rho: int) -> float:
    lg = math.log2(n) if n > 1 else 1.0
    return math.log(rho) / math.log(lg) if lg > 1 else math.inf
