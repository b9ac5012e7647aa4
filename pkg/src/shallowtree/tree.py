"""Balanced rho-ary range tree skeleton over points sorted by w."""

from __future__ import annotations

import math
from array import array


def default_rho(n: int) -> int:
    lg = math.log2(n) if n > 1 else 0.0
    return max(2, math.ceil(lg ** 0.25))


def default_t0(n: int) -> int:
    lg = math.log2(n) if n > 1 else 0.0
    return max(4, math.ceil(lg * lg))


def bitlen(v: int) -> int:
    """Bits needed to store integers in [0, v]."""
    return max(1, int(v).bit_length())


def compact(values, signed: bool = False) -> array:
    """Smallest machine-integer array holding ``values``."""
    top = max(values, default=0)
    lo = min(values, default=0)
    if signed or lo < 0:
        if -(1 << 15) <= lo and top < 1 << 15:
            return array("h", values)
        return array("i" if -(1 << 31) <= lo and top < 1 << 31 else "q", values)
    return array("H" if top < 1 << 16 else "I" if top < 1 << 32 else "Q", values)


class Skeleton:
    """Node arrays for a rho-ary tree whose leaves are positions 0..n-1.

    Node 0 is the root.  A node covers leaf positions [lo, hi); a leaf has
    hi == lo + 1.
    """

    def __init__(self, n: int, rho: int):
        if n < 1:
            raise ValueError("tree needs at least one point")
        if rho < 2:
            raise ValueError("rho must be >= 2")
        self.n = n
        self.rho = rho
        self.lo: list[int] = []
        self.hi: list[int] = []
        self.depth: list[int] = []
        self.parent: list[int] = []
        self.slot: list[int] = []
        self.children: list[tuple[int, ...]] = []
        self.leaf_at = [0] * n
        stack = [(0, n, 0, -1, 0)]
        while stack:
            lo, hi, d, par, s = stack.pop()
            u = len(self.lo)
            self.lo.append(lo)
            self.hi.append(hi)
            self.depth.append(d)
            self.parent.append(par)
            self.slot.append(s)
            self.children.append(())
            if par >= 0:
                self.children[par] += (u,)
            size = hi - lo
            if size == 1:
                self.leaf_at[lo] = u
                continue
            k = min(rho, size)
            bounds = [lo + (size * i) // k for i in range(k + 1)]
            # push in reverse so children are created left to right
            for i in reversed(range(k)):
                stack.append((bounds[i], bounds[i + 1], d + 1, u, i))
        # stack order interleaves subtrees; fix children order by slot
        for u in range(len(self.children)):
            self.children[u] = tuple(sorted(self.children[u], key=self.slot.__getitem__))
        self.height = max(self.depth)
        self.depth_arr = array("H", self.depth)

    def __len__(self) -> int:
        return len(self.lo)

    def is_leaf(self, u: int) -> bool:
        return self.hi[u] - self.lo[u] == 1

    def size(self, u: int) -> int:
        return self.hi[u] - self.lo[u]

    def internal_nodes(self):
        return [u for u in range(len(self.lo)) if not self.is_leaf(u)]

    def _lca_side(self, wlo: int, whi: int):
        """Shared part of the canonical decomposition of positions [wlo, whi].

        Returns (v, side_a, side_b, ia, ib): v is the LCA of the leaves just
        outside the range (the root when one is missing), side_a holds
        (parent, first, last) sibling runs right of the path from the left
        outside leaf, side_b the runs left of the path from the right one, and
        ia/ib are the child slots of v on those paths.
        """
        n = self.n
        la, lb = wlo - 1, whi + 1
        parent, slot, children = self.parent, self.slot, self.children
        if la >= 0 and lb < n:
            anc = set()
            x = self.leaf_at[la]
            while x >= 0:
                anc.add(x)
                x = parent[x]
            v = self.leaf_at[lb]
            while v not in anc:
                v = parent[v]
        else:
            v = 0
        side_a, side_b = [], []
        ia, ib = -1, len(children[v])
        if la >= 0:
            x = self.leaf_at[la]
            while parent[x] != v:
                p = parent[x]
                if slot[x] + 1 < len(children[p]):
                    side_a.append((p, slot[x] + 1, len(children[p]) - 1))
                x = p
            ia = slot[x]
        if lb < n:
            x = self.leaf_at[lb]
            while parent[x] != v:
                p = parent[x]
                if slot[x] > 0:
                    side_b.append((p, 0, slot[x] - 1))
                x = p
            ib = slot[x]
        return v, side_a, side_b, ia, ib

    def _clip(self, wlo: int, whi: int):
        return max(wlo, 0), min(whi, self.n - 1)

    def canonical_nodes(self, wlo: int, whi: int) -> list[int]:
        """Nodes whose leaf sets partition positions [wlo, whi] (0-based), left to right."""
        wlo, whi = self._clip(wlo, whi)
        if wlo > whi:
            return []
        if wlo == 0 and whi == self.n - 1:
            return [0]
        v, side_a, side_b, ia, ib = self._lca_side(wlo, whi)
        ch = self.children
        out = []
        for p, f, l in side_a:
            out.extend(ch[p][f:l + 1])
        out.extend(ch[v][ia + 1:ib])
        for p, f, l in reversed(side_b):
            out.extend(ch[p][f:l + 1])
        return out

    def canonical_pairs(self, wlo: int, whi: int) -> list[tuple[int, int, int]]:
        """(node, l, r) triples whose sibling runs partition positions [wlo, whi], left to right."""
        wlo, whi = self._clip(wlo, whi)
        if wlo > whi:
            return []
        if wlo == 0 and whi == self.n - 1:
            return [(0, 0, max(0, len(self.children[0]) - 1))]
        v, side_a, side_b, ia, ib = self._lca_side(wlo, whi)
        out = list(side_a)
        if ia + 1 <= ib - 1:
            out.append((v, ia + 1, ib - 1))
        out.extend(reversed(side_b))
        return out

    def descendants_at(self, u: int, depth: int) -> list[int]:
        """Nodes of u's subtree at ``depth``, plus leaves that end above it."""
        out = []
        stack = [u]
        while stack:
            x = stack.pop()
            if self.depth[x] == depth or self.is_leaf(x):
                out.append(x)
            else:
                stack.extend(reversed(self.children[x]))
        return out
