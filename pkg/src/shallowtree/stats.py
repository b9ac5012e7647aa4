"""Query instrumentation and design-bit space accounting."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


@dataclass
class QueryStats:
    """Per-query counters; one instance per query, never shared."""

    units: int = 0
    nodes_visited: int = 0
    expanded: int = 0
    cells_probed: int = 0
    touched: int = 0
    points_decoded: int = 0
    probe_decodes: int = 0
    hops: Counter = field(default_factory=Counter)

    @property
    def hops_max(self) -> int:
        return max(self.hops, default=0)

    def merge(self, other: "QueryStats") -> None:
        self.units += other.units
        self.nodes_visited += other.nodes_visited
        self.expanded += other.expanded
        self.cells_probed += other.cells_probed
        self.touched += other.touched
        self.points_decoded += other.points_decoded
        self.probe_decodes += other.probe_decodes
        self.hops.update(other.hops)

    def as_dict(self) -> dict:
        return {
            "units": self.units,
            "nodes_visited": self.nodes_visited,
            "expanded": self.expanded,
            "cells_probed": self.cells_probed,
            "touched": self.touched,
            "points_decoded": self.points_decoded,
            "probe_decodes": self.probe_decodes,
            "hops": {str(k): v for k, v in sorted(self.hops.items())},
        }


@dataclass
class SpaceReport:
    """Design bits per component plus the physical bytes actually held."""

    structure: str
    n: int
    word_bits: int
    components: dict[str, int] = field(default_factory=dict)
    physical_bytes: int = 0

    def add(self, name: str, bits: int) -> None:
        self.components[name] = self.components.get(name, 0) + int(bits)

    @property
    def total_bits(self) -> int:
        return sum(self.components.values())

    @property
    def total_words(self) -> float:
        return self.total_bits / self.word_bits

    def as_dict(self) -> dict:
        return {
            "structure": self.structure,
            "n": self.n,
            "word_bits": self.word_bits,
            "components": dict(sorted(self.components.items())),
            "design_bits_total": self.total_bits,
            "physical_bytes": self.physical_bytes,
        }
