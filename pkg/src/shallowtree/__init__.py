"""4D 5-sided and dominance range reporting with range trees over 3D shallow cuttings."""

from .audit import AuditReport, audit_index, inject_fault
from .cuttings import Cell, Cutting, CuttingError, build_cutting, locate_cell, verify_cutting
from .datasets import KINDS, Dataset, generate_dataset, generate_queries
from .fast import FastConfig, FastIndex, FastRef, build_fast, canonical_pairs, query_fast
from .geom import (DominanceBox3, Point3, Point4, Query5, RankDictionary, dominates, level,
                   oracle_report, query_to_rank_space, rank_reduce)
from .linear import (LinearConfig, LinearIndex, PointRef, build_linear, canonical_nodes, decode,
                     query_linear, translate_query_to_cell)
from .serialize import (HeaderError, PayloadError, SerializationError, deserialize_index,
                        serialize_index)
from .smalldom import SmallDom, SmallDomConfig, build_small, query_small
from .space import space_report
from .stats import QueryStats, SpaceReport
from .suite import SuiteConfig, bench, run_suite

__version__ = "0.1.0"

__all__ = [
    "AuditReport", "Cell", "Cutting", "CuttingError", "Dataset", "DominanceBox3", "FastConfig",
    "FastIndex", "FastRef", "HeaderError", "KINDS", "LinearConfig", "LinearIndex", "PayloadError",
    "Point3", "Point4", "PointRef", "Query5", "QueryStats", "RankDictionary", "SerializationError",
    "SmallDom", "SmallDomConfig", "SpaceReport", "SuiteConfig", "audit_index", "bench",
    "build_cutting", "build_fast", "build_linear", "build_small", "canonical_nodes",
    "canonical_pairs", "decode", "deserialize_index", "dominates", "generate_dataset",
    "generate_queries", "inject_fault", "level", "locate_cell", "oracle_report", "query_fast",
    "query_linear", "query_small", "query_to_rank_space", "rank_reduce", "run_suite",
    "serialize_index", "space_report", "translate_query_to_cell", "verify_cutting",
]
