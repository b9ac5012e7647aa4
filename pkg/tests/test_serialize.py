import struct

import pytest

from conftest import rank_points
from shallowtree.datasets import generate_dataset, generate_queries
from shallowtree.fast import build_fast
from shallowtree.linear import build_linear
from shallowtree.serialize import (HeaderError, PayloadError, deserialize_index, dumps_index,
                                   loads_index, read_index_file, serialize_index)
from shallowtree.space import space_report


def test_linear_4096_round_trip(tmp_path):
    ds = generate_dataset("uniform", 4096, 11)
    idx = build_linear(ds.rank_points)
    path = tmp_path / "idx.rrk"
    serialize_index(idx, path, ds.ranks)
    back = deserialize_index(path)
    for q in generate_queries(ds, 100, 12):
        rq = ds.to_rank_query(q)
        assert back.report(rq) == idx.report(rq)
    assert space_report(back).as_dict() == space_report(idx).as_dict()
    meta, _, ranks = read_index_file(path)
    assert meta["structure"] == "linear" and meta["n"] == 4096 and ranks == ds.ranks


def test_fast_round_trip_without_ranks():
    idx = build_fast(rank_points(300, 1))
    meta, back, ranks = loads_index(dumps_index(idx))
    assert ranks is None and meta["structure"] == "fast"
    assert space_report(back).as_dict() == space_report(idx).as_dict()


@pytest.fixture(scope="module")
def blob():
    return dumps_index(build_linear(rank_points(100, 2)))


def test_header_layout(blob):
    magic, version, _, count = struct.unpack_from("<4sHHI", blob)
    assert magic == b"RRK1" and version == 1 and count == 2


def test_truncated_file_is_payload_error(blob):
    with pytest.raises(PayloadError):
        loads_index(blob[:-1])
    with pytest.raises(PayloadError):
        loads_index(blob[: len(blob) // 2])


def test_wrong_magic_is_header_error(blob):
    with pytest.raises(HeaderError, match="magic"):
        loads_index(b"RRK2" + blob[4:])


def test_future_version_is_header_error(blob):
    with pytest.raises(HeaderError, match="version"):
        loads_index(blob[:4] + struct.pack("<H", 9) + blob[6:])


def test_damaged_table_is_header_error(blob):
    bad = bytearray(blob)
    bad[20] ^= 0xFF
    with pytest.raises(HeaderError):
        loads_index(bytes(bad))


def test_flipped_payload_byte_is_payload_error(blob):
    bad = bytearray(blob)
    bad[-5] ^= 0x01
    with pytest.raises(PayloadError, match="checksum"):
        loads_index(bytes(bad))


def test_tiny_file_is_header_error():
    with pytest.raises(HeaderError):
        loads_index(b"RR")


def test_rejects_non_index():
    with pytest.raises(TypeError):
        dumps_index(object())
