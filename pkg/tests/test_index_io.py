import random

import pytest

from ship.engine import build_ship, lookup
from ship.htt import HttConfig
from ship.index_io import IndexFormatError, MAGIC, dumps_index, load_index, loads_index, save_index
from ship.synthgen import random_table


@pytest.mark.parametrize("k,min_len", [(0, 8), (1, 0), (3, 0), (6, 8)])
def test_round_trip_preserves_lookups(tmp_path, k, min_len):
    t = random_table(800, k, min_len=min_len)
    idx = build_ship(t, k=k, cfg=HttConfig(node_size_bits=256))
    path = tmp_path / "x.idx"
    save_index(idx, path)
    again = load_index(path)
    assert dumps_index(again) == path.read_bytes()
    rng = random.Random(k)
    for p in rng.sample(t.entries, 200):
        for a in (p.value, p.last_address, rng.getrandbits(128)):
            assert lookup(again, a) == lookup(idx, a)


def test_rebuild_is_byte_identical():
    t = random_table(1500, 11)
    assert dumps_index(build_ship(t, k=3, seed=4)) == dumps_index(build_ship(t, k=3, seed=4))


def test_empty_index_round_trip():
    idx = build_ship([], k=2)
    assert dumps_index(loads_index(dumps_index(idx))) == dumps_index(idx)


@pytest.fixture(scope="module")
def blob():
    return dumps_index(build_ship(random_table(300, 1), k=2))


def test_bad_magic(blob):
    assert blob.startswith(MAGIC)
    with pytest.raises(IndexFormatError, match="magic"):
        loads_index(b"NOTANIDX" + blob[8:])


def test_bad_version(blob):
    with pytest.raises(IndexFormatError, match="version"):
        loads_index(blob[:8] + b"\x63\x00" + blob[10:])


@pytest.mark.parametrize("cut", [4, 30, -1])
def test_truncated(blob, cut):
    with pytest.raises(IndexFormatError, match="truncated"):
        loads_index(blob[:cut])


def test_trailing_bytes(blob):
    with pytest.raises(IndexFormatError, match="trailing"):
        loads_index(blob + b"\0")
