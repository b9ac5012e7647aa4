"""Versioned binary container for built indexes.

Layout (all integers little-endian)::

    magic "RRK1" | version u16 | reserved u16 | section count u32
    section table: name 8s | offset u64 | length u64 | crc32 u32   (per section)
    crc32 of everything above, u32
    section payloads

Sections: ``meta`` (JSON), ``index`` (pickled index object) and, when the
index was built from original coordinates, ``ranks`` (pickled rank
dictionary used to translate queries).

Pickle runs arbitrary code on load.  Only open index files you produced.
"""

from __future__ import annotations

import json
import pickle
import struct
import zlib
from pathlib import Path
from typing import Optional, Union

from .fast import FastIndex
from .geom import RankDictionary
from .linear import LinearIndex

MAGIC = b"RRK1"
VERSION = 1

_HEAD = struct.Struct("<4sHHI")
_ENTRY = struct.Struct("<8sQQI")
_CRC = struct.Struct("<I")


class SerializationError(Exception):
    pass


class HeaderError(SerializationError):
    """Bad magic, unsupported version or damaged section table."""


class PayloadError(SerializationError):
    """Section bytes missing, truncated or failing their checksum."""


def _pack(sections: dict[str, bytes]) -> bytes:
    names = list(sections)
    table_len = _HEAD.size + len(names) * _ENTRY.size + _CRC.size
    head = bytearray(_HEAD.pack(MAGIC, VERSION, 0, len(names)))
    offset = table_len
    for name in names:
        blob = sections[name]
        head += _ENTRY.pack(name.encode("ascii"), offset, len(blob), zlib.crc32(blob))
        offset += len(blob)
    head += _CRC.pack(zlib.crc32(bytes(head)))
    return bytes(head) + b"".join(sections[n] for n in names)


def _unpack(buf: bytes) -> dict[str, bytes]:
    if len(buf) < _HEAD.size:
        raise HeaderError(f"file too short for a header ({len(buf)} bytes)")
    magic, version, _, count = _HEAD.unpack_from(buf, 0)
    if magic != MAGIC:
        raise HeaderError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise HeaderError(f"unsupported container version {version}")
    table_end = _HEAD.size + count * _ENTRY.size
    if len(buf) < table_end + _CRC.size:
        raise HeaderError("section table truncated")
    (crc,) = _CRC.unpack_from(buf, table_end)
    if zlib.crc32(buf[:table_end]) != crc:
        raise HeaderError("section table checksum mismatch")
    out = {}
    for k in range(count):
        raw, off, length, scrc = _ENTRY.unpack_from(buf, _HEAD.size + k * _ENTRY.size)
        name = raw.rstrip(b"\0").decode("ascii", "replace")
        blob = buf[off:off + length]
        if len(blob) != length:
            raise PayloadError(f"section {name!r} truncated: {len(blob)} of {length} bytes")
        if zlib.crc32(blob) != scrc:
            raise PayloadError(f"section {name!r} checksum mismatch")
        out[name] = blob
    return out


def _meta(idx) -> dict:
    cfg = idx.config
    return {
        "format": VERSION,
        "structure": idx.structure,
        "n": idx.n,
        "rho": idx.rho,
        "t0": idx.t0,
        "config": {k: v for k, v in vars(cfg).items() if k != "smalldom"},
        "smalldom": vars(cfg.smalldom),
    }


def dumps_index(idx, ranks: Optional[RankDictionary] = None) -> bytes:
    if not isinstance(idx, (LinearIndex, FastIndex)):
        raise TypeError(f"cannot serialize {type(idx).__name__}")
    sections = {
        "meta": json.dumps(_meta(idx), sort_keys=True).encode(),
        "index": pickle.dumps(idx, protocol=pickle.HIGHEST_PROTOCOL),
    }
    if ranks is not None:
        sections["ranks"] = pickle.dumps(ranks, protocol=pickle.HIGHEST_PROTOCOL)
    return _pack(sections)


def loads_index(buf: bytes) -> tuple[dict, object, Optional[RankDictionary]]:
    """Returns (meta, index, ranks or None)."""
    sections = _unpack(buf)
    for name in ("meta", "index"):
        if name not in sections:
            raise PayloadError(f"missing section {name!r}")
    try:
        meta = json.loads(sections["meta"])
        idx = pickle.loads(sections["index"])
        ranks = pickle.loads(sections["ranks"]) if "ranks" in sections else None
    except Exception as exc:  # corrupt bytes can raise almost anything
        raise PayloadError(f"cannot decode payload: {exc}") from exc
    if not isinstance(idx, (LinearIndex, FastIndex)):
        raise PayloadError(f"payload holds {type(idx).__name__}, not an index")
    if meta.get("structure") != idx.structure or meta.get("n") != idx.n:
        raise PayloadError("metadata does not describe the stored index")
    return meta, idx, ranks


def serialize_index(idx, path: Union[str, Path], ranks: Optional[RankDictionary] = None) -> None:
    Path(path).write_bytes(dumps_index(idx, ranks))


def read_index_file(path: Union[str, Path]):
    return loads_index(Path(path).read_bytes())


def deserialize_index(path: Union[str, Path]):
    return read_index_file(path)[1]
