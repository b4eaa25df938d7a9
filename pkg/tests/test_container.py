import struct
from pathlib import Path

import numpy as np
import pytest

from lcp.container import (
    FLAG_LCA,
    MAGIC,
    ContainerHeader,
    rate_to_mhz,
    read_container,
    read_header,
    timestamp_of,
    timestamps,
    write_container,
)
from lcp.errors import BadMagic, CorruptStream, TruncatedStream, UnsupportedVersion
from lcp.quantize import ChannelSpec

from conftest import WORKED_EXAMPLE

DATA = Path(__file__).parent / "data"
T0_US = 1_568_000_000_000_000
V_VALUES = [12001, 12001, 12003, 12003, 11999, 12001, 12001, 12001]
P_VALUES = [0, 5, 5, 1030, 1030, 1030, -32765, 32765]


def worked_example_blob() -> bytes:
    return write_container([ChannelSpec("P")], [WORKED_EXAMPLE], 50000, T0_US)


def two_channel_blob() -> bytes:
    specs = [ChannelSpec("V", 2), ChannelSpec("P", 0, True)]
    return write_container(specs, [V_VALUES, P_VALUES], 50000, T0_US, obfuscate=3, seed=7)


@pytest.mark.parametrize(
    "make, name",
    [(worked_example_blob, "worked_example.bin"), (two_channel_blob, "two_channel_obf3_seed7.bin")],
)
def test_golden_files(make, name):
    golden = (DATA / name).read_bytes()
    assert make() == golden
    assert make() == make()


def test_golden_bytes_pinned():
    # guards the golden file itself against silent regeneration
    assert (DATA / "worked_example.bin").read_bytes() == bytes.fromhex(
        "4c43503101000150c3000000000273169205000150000008000000000000000e00000000000000"
        "6f00000000000000000017f83f56fd87fa0e19fe1dbc"
    )


def test_header_fields_one_by_one():
    blob = worked_example_blob()
    assert blob[0:4] == b"LCP1" == MAGIC
    assert blob[4] == 1  # version
    assert blob[5] == 0  # flags
    assert blob[6] == 1  # channel count
    assert struct.unpack_from("<I", blob, 7)[0] == 50000
    assert struct.unpack_from("<Q", blob, 11)[0] == T0_US
    assert blob[19] == 1 and blob[20:21] == b"P"
    dp, lca, count, plen, pbits = struct.unpack_from("<BBQQQ", blob, 21)
    assert (dp, lca, count) == (0, 0, 8)
    assert pbits == 8 + 103 and plen == 14
    assert len(blob) == 21 + 26 + 14
    assert blob[-13:] == bytes.fromhex("0017f83f56fd87fa0e19fe1dbc")


def test_read_header_matches_written():
    header, off = read_header(two_channel_blob())
    assert header.flags == FLAG_LCA
    assert header.sample_rate_mHz == 50000 and header.t0_us == T0_US
    assert [(c.name, c.decimal_places, c.lca, c.value_count) for c in header.channels] == [
        ("V", 2, False, 8), ("P", 0, True, 8)
    ]
    assert off == header.size
    assert header.pack() == two_channel_blob()[:off]
    assert header.to_dict()["channels"][1]["lca"] is True


def test_roundtrip_two_channels():
    header, (v, p) = read_container(two_channel_blob())
    assert v.tolist() == V_VALUES and p.tolist() == P_VALUES
    assert header.channels[0].spec == ChannelSpec("V", 2)


def test_bad_magic():
    blob = bytearray(worked_example_blob())
    blob[0:4] = b"LCP2"
    with pytest.raises(BadMagic):
        read_container(bytes(blob))
    with pytest.raises(BadMagic):
        read_container(b"")
    with pytest.raises(CorruptStream):  # BadMagic is a CorruptStream
        read_container(b"PK\x03\x04")


def test_unsupported_version():
    blob = bytearray(worked_example_blob())
    blob[4] = 2
    with pytest.raises(UnsupportedVersion):
        read_container(bytes(blob))


@pytest.mark.parametrize("cut", [5, 18, 19, 20, 30, 46, 47, 55, 60])
def test_truncated(cut):
    with pytest.raises(TruncatedStream):
        read_container(worked_example_blob()[:cut])


def test_trailing_bytes():
    with pytest.raises(CorruptStream):
        read_container(worked_example_blob() + b"\x00")


def test_payload_length_mismatch():
    blob = bytearray(worked_example_blob())
    struct.pack_into("<Q", blob, 21 + 2 + 8, 13)
    with pytest.raises(CorruptStream):
        read_container(bytes(blob))


def test_unused_payload_bits():
    blob = bytearray(worked_example_blob())
    struct.pack_into("<Q", blob, 21 + 2, 7)  # claim 7 values, 1 bit left over
    with pytest.raises(CorruptStream):
        read_container(bytes(blob))


def test_nonzero_padding():
    blob = bytearray(worked_example_blob())
    blob[-1] |= 0x01
    with pytest.raises(CorruptStream):
        read_container(bytes(blob))


def test_flipped_control_bits():
    blob = bytearray(worked_example_blob())
    # value 25 header '1 11 1100 0001' -> make leading + trailing 16
    blob[-13 + 2] ^= 0b00001000
    with pytest.raises((CorruptStream, TruncatedStream)):
        read_container(bytes(blob))


def test_zero_channel_and_zero_rate_headers():
    blob = bytearray(worked_example_blob())
    blob[6] = 0
    with pytest.raises(CorruptStream):
        read_header(bytes(blob))
    blob = bytearray(worked_example_blob())
    struct.pack_into("<I", blob, 7, 0)
    with pytest.raises(CorruptStream):
        read_header(bytes(blob))


def test_write_validation():
    spec = [ChannelSpec("P")]
    with pytest.raises(ValueError):
        write_container([], [], 50000, 0)
    with pytest.raises(ValueError):
        write_container(spec, [[]], 50000, 0)
    with pytest.raises(ValueError):
        write_container(spec * 2, [[1], [1, 2]], 50000, 0)
    with pytest.raises(ValueError):
        write_container(spec, [[1]], 0, 0)
    with pytest.raises(ValueError):
        write_container(spec, [[1]], 50000, -1)
    with pytest.raises(ValueError):
        write_container([ChannelSpec("x" * 256)], [[1]], 50000, 0)


def test_channels_use_independent_seeds():
    specs = [ChannelSpec("a"), ChannelSpec("b")]
    blob = write_container(specs, [WORKED_EXAMPLE, WORKED_EXAMPLE], 50000, 0, obfuscate=4, seed=1)
    header, off = read_header(blob)
    a, b = header.channels
    assert blob[off : off + a.payload_len] != blob[off + a.payload_len :]


def test_rate_to_mhz():
    assert rate_to_mhz(50) == 50000
    assert rate_to_mhz(0.5) == 500
    with pytest.raises(ValueError):
        rate_to_mhz(0)


def test_timestamps_at_50hz():
    header = ContainerHeader(50000, T0_US)
    header.channels = read_header(worked_example_blob())[0].channels
    assert [timestamp_of(i, header) - T0_US for i in range(8)] == [i * 20000 for i in range(8)]
    assert np.array_equal(timestamps(header), T0_US + 20000 * np.arange(8))
    with pytest.raises(IndexError):
        timestamp_of(8, header)


def test_timestamps_non_integer_period():
    header = ContainerHeader(3000, 0)  # 3 Hz: period 333333.33 us
    t = timestamps(header, 4)
    assert t.tolist() == [0, 333333, 666667, 1000000]
