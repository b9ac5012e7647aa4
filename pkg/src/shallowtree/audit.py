"""Structural audits of built indexes.

Cell member lists are not kept after a build, so every audit recomputes
them by brute force from the stored apexes and the leaf coordinates.  That
makes each check independent of the tables being audited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cuttings import Cell, Cutting, verify_cutting
from .fast import FastIndex
from .linear import LinearIndex
from .refs import NULL, CorruptIndex

MAX_VIOLATIONS = 20


@dataclass
class AuditReport:
    ok: bool = True
    violations: list[str] = field(default_factory=list)
    witness: Optional[tuple] = None
    checked: dict[str, int] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    def fail(self, msg: str, witness=None) -> None:
        self.ok = False
        if len(self.violations) < MAX_VIOLATIONS:
            self.violations.append(msg)
        if self.witness is None:
            self.witness = witness if witness is not None else (msg,)

    def count(self, key: str, k: int = 1) -> None:
        self.checked[key] = self.checked.get(key, 0) + k


def _dominates(outer, inner) -> bool:
    return outer[0] >= inner[0] and outer[1] >= inner[1] and outer[2] >= inner[2]


class _Coords:
    """Leaf coordinates as numpy arrays for brute-force member recomputation."""

    def __init__(self, idx):
        self.X = np.asarray(idx.X, dtype=np.int64)
        self.Y = np.asarray(idx.Y, dtype=np.int64)
        self.Z = np.asarray(idx.Z, dtype=np.int64)

    def members(self, lo: int, hi: int, apex) -> list[int]:
        """Positions in [lo, hi) dominated by apex, sorted by x."""
        X, Y, Z = self.X[lo:hi], self.Y[lo:hi], self.Z[lo:hi]
        hit = np.flatnonzero((X <= apex[0]) & (Y <= apex[1]) & (Z <= apex[2]))
        return (hit[np.argsort(X[hit], kind="stable")] + lo).tolist()


def _check_level(rep, co, level, lo, hi, where, interesting, target_level):
    """Containment, clipping and D-entry checks for one reference level.

    ``target_level(v)`` gives the level a D-cell must fit in for target v
    (None: referenced directly).  Returns recomputed member lists per cell.
    """
    cell_members = []
    for g, rc in enumerate(level.cells):
        mem = co.members(lo, hi, rc.apex)
        cell_members.append(mem)
        rep.count("ref_cells")
        if len(mem) != rc.m:
            rep.fail(f"{where} cell {g}: stored size {rc.m} != recomputed {len(mem)}", (where, g))
            continue
        dmembers = []
        for j, d in enumerate(level.dcells[g]):
            rep.count("d_cells")
            if not _dominates(rc.apex, d.apex):
                rep.fail(f"{where} cell {g} D-cell {j} apex not clipped to the cell", (where, g, j))
            dm = co.members(lo, hi, d.apex)
            dmembers.append(dm)
            if len(dm) != d.m:
                rep.fail(f"{where} cell {g} D-cell {j}: size mismatch", (where, g, j))
            for r, v in enumerate(level.targets):
                tl = target_level(v)
                if tl is None:
                    continue
                rep.count("down_links")
                k = d.down[r]
                if k == NULL or not _dominates(tl.cells[k].apex, d.apex):
                    rep.fail(f"{where} cell {g} D-cell {j}: no containing cell in target {v}",
                             (where, g, j, v))
        for s, p in enumerate(mem):
            j = rc.dcell[s]
            if j == NULL:
                if p in interesting:
                    rep.fail(f"{where} cell {g}: interesting point at slot {s} has no D-cell",
                             (where, g, s))
                continue
            rep.count("d_entries")
            dm = dmembers[j]
            r = rc.drank[s]
            if r >= len(dm) or dm[r] != p:
                rep.fail(f"{where} cell {g}: D-entry of slot {s} points elsewhere", (where, g, s))
    return cell_members


def _lift_check(rep, lower, upper, where):
    for g, rc in enumerate(lower.cells):
        rep.count("lift_links")
        if rc.lift == NULL or not _dominates(upper.cells[rc.lift].apex, rc.apex):
            rep.fail(f"{where} cell {g}: no containing cell in the next level", (where, g))


def _check_roundtrip(rep, expected, got, hops, bound, where, g, s):
    rep.count("roundtrips")
    if got != expected:
        rep.fail(f"{where} cell {g} slot {s}: decodes to position {got}, expected {expected}",
                 (where, g, s))
    if hops > bound:
        rep.fail(f"{where} cell {g} slot {s}: {hops} hops exceeds bound {bound}", (where, g, s))


def _verify_unit_cutting(rep, co, lo, hi, cells_apex, t, where):
    """Exhaustive cutting check in the unit's own rank space."""
    xs, ys, zs = (np.sort(a[lo:hi]) for a in (co.X, co.Y, co.Z))
    loc = [(int(np.searchsorted(xs, co.X[p], "right")), int(np.searchsorted(ys, co.Y[p], "right")),
            int(np.searchsorted(zs, co.Z[p], "right"))) for p in range(lo, hi)]
    m = hi - lo
    cells = []
    for apex in cells_apex:
        la = (int(np.searchsorted(xs, apex[0], "right")), int(np.searchsorted(ys, apex[1], "right")),
              int(np.searchsorted(zs, apex[2], "right")))
        mem = sorted((i for i, p in enumerate(loc) if _dominates(la, p)), key=lambda i: loc[i][0])
        cells.append(Cell(la, mem, [p[1] for p in loc], [p[2] for p in loc]))
    res = verify_cutting(loc, t, Cutting(t, cells, (m, m, m)), universe=m, max_n=max(m, 1))
    rep.count("cuttings_verified")
    if not res.ok:
        rep.fail(f"{where}: cutting invalid: {res.violations[0]}", (where, res.witness))


def audit_linear(idx: LinearIndex, exhaustive_cuttings: int = 0) -> AuditReport:
    """Containment maps, interesting-point coverage and decode round trips.

    Units with at most ``exhaustive_cuttings`` points also get their
    reporting cutting verified exhaustively.
    """
    rep = AuditReport()
    co = _Coords(idx)
    tr = idx.tree
    interesting: dict[int, set[int]] = {}
    bound = idx.hop_bound
    for u in sorted(tr.internal_nodes(), key=lambda u: tr.depth[u]):
        node = idx.nodes[u]
        lo, hi = tr.lo[u], tr.hi[u]
        par = tr.parent[u]
        inherited = {p for p in interesting.get(par, ()) if lo <= p < hi}
        own = set()
        ccells_members = []
        for g, cc in enumerate(node.ccells):
            mem = co.members(lo, hi, cc.apex)
            ccells_members.append(mem)
            own.update(mem)
            rep.count("query_cells")
            if len(mem) != cc.m:
                rep.fail(f"node {u} C-cell {g}: stored size {cc.m} != {len(mem)}", (u, g))
            lev0 = node.levels[0]
            if cc.cont == NULL or not _dominates(lev0.cells[cc.cont].apex, cc.apex):
                rep.fail(f"node {u} C-cell {g}: not contained in any C' cell", (u, "cont", g))
        if exhaustive_cuttings and hi - lo <= exhaustive_cuttings:
            _verify_unit_cutting(rep, co, lo, hi, [c.apex for c in node.ccells], idx.t0,
                                 f"node {u} C")
        interesting[u] = inherited | own
        for i, lev in enumerate(node.levels):
            _check_level(rep, co, lev, lo, hi, f"node {u} level {i}", interesting[u],
                         idx._target_level(i))
            if i:
                _lift_check(rep, node.levels[i - 1], lev, f"node {u} level {i - 1}")
        for g, mem in enumerate(ccells_members):
            for s, p in enumerate(mem):
                try:
                    got, hops = idx.decode_hops(u, "C", g, s)
                except CorruptIndex as exc:
                    rep.fail(f"node {u} C-cell {g} slot {s}: {exc}", (u, g, s))
                    continue
                _check_roundtrip(rep, p, got, hops, bound, f"node {u} C", g, s)
    return rep


def audit_fast(idx: FastIndex, exhaustive_cuttings: int = 0) -> AuditReport:
    rep = AuditReport()
    co = _Coords(idx)
    tr = idx.tree
    ids = idx.ID
    bound = idx.hop_bound
    for (u, l, r), unit in idx.units.items():
        ch = tr.children[u]
        union = set()
        for v in ch[l:r + 1]:
            union.update(ids[tr.lo[v]:tr.hi[v]])
        rep.count("pair_sets")
        if union != set(ids[unit.lo:unit.hi]):
            rep.fail(f"unit {(u, l, r)}: stored set differs from the children's union", (u, l, r))
        where = f"unit {(u, l, r)}"
        members = []
        for g, cc in enumerate(unit.ccells):
            mem = co.members(unit.lo, unit.hi, cc.apex)
            members.append(mem)
            rep.count("query_cells")
            if len(mem) != cc.m:
                rep.fail(f"{where} C-cell {g}: stored size {cc.m} != {len(mem)}", (u, l, r, g))
            if unit.overlay is not None:
                rep.count("cont_links")
                if cc.cont == NULL or not _dominates(unit.overlay.cells[cc.cont].apex, cc.apex):
                    rep.fail(f"{where} C-cell {g}: not contained in an overlay cell", (u, l, r, g))
        if exhaustive_cuttings and unit.hi - unit.lo <= exhaustive_cuttings:
            _verify_unit_cutting(rep, co, unit.lo, unit.hi, [c.apex for c in unit.ccells],
                                 idx.t0, where)
        if unit.overlay is not None:
            covered = set()
            for mem in members:
                covered.update(mem)
            _check_level(rep, co, unit.overlay, unit.lo, unit.hi, where + " overlay", covered,
                         idx._full_overlay)
        for g, mem in enumerate(members):
            for s, p in enumerate(mem):
                try:
                    got, hops = idx.decode_hops(unit, g, s)
                except CorruptIndex as exc:
                    rep.fail(f"{where} C-cell {g} slot {s}: {exc}", (u, l, r, g, s))
                    continue
                _check_roundtrip(rep, p, got, hops, bound, where, g, s)
    return rep


def audit_index(idx, exhaustive_cuttings: int = 0) -> AuditReport:
    if isinstance(idx, LinearIndex):
        return audit_linear(idx, exhaustive_cuttings)
    if isinstance(idx, FastIndex):
        return audit_fast(idx, exhaustive_cuttings)
    raise TypeError(f"cannot audit {type(idx).__name__}")


def inject_fault(idx, kind: str = "decode") -> str:
    """Corrupt a built index in place (test hook).  Returns a description.

    ``decode``: swap two entries of the first reporting cell's slot map that
    has at least two members.  ``dcell``: clear the D-entry of the first
    reference-cell member.
    """
    cells = []
    if isinstance(idx, LinearIndex):
        for node in idx.nodes:
            if node is not None:
                cells.append((node.ccells, node.levels))
    else:
        for unit in idx.units.values():
            cells.append((unit.ccells, [unit.overlay] if unit.overlay is not None else []))
    if kind == "decode":
        for ccells, _ in cells:
            for cc in ccells:
                if cc.m >= 2 and cc.fx[0] != cc.fx[1]:
                    cc.fx[0], cc.fx[1] = cc.fx[1], cc.fx[0]
                    return "swapped the first two slot-map entries of a reporting cell"
    elif kind == "dcell":
        for _, levels in cells:
            for lev in levels:
                for rc in lev.cells:
                    if rc.m and rc.dcell[0] != NULL:
                        rc.dcell[0] = NULL
                        return "cleared the first D-entry of a reference cell"
    else:
        raise ValueError(f"unknown fault kind {kind!r}")
    raise ValueError("index too small to inject a fault")
