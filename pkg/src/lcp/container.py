"""The ``.bin`` container: one header, one LCP payload per channel.

Layout (all integers little-endian)::

    magic            4s   b"LCP1"
    version          u8   1
    flags            u8   bit 0 set when any channel is LCA-rounded
    channel_count    u8
    sample_rate_mHz  u32  sample rate in milli-hertz (50 Hz -> 50000)
    t0_us            u64  first timestamp, microseconds since the epoch
    channel_count x:
        name_len          u8, then name_len bytes of UTF-8
        decimal_places    u8
        lca               u8
        value_count       u64  data values, junk excluded
        payload_len       u64  bytes
        payload_bit_count u64
    payloads, concatenated in channel order

Only the first timestamp is stored; sample ``i`` sits at
``t0_us + round(i * 1e9 / sample_rate_mHz)``.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .bitstream import BitReader, BitWriter
from .codec import as_int16
from .errors import BadMagic, CorruptStream, TruncatedStream, UnsupportedVersion
from .obfuscate import decode_obfuscated, encode_obfuscated
from .quantize import ChannelSpec

MAGIC = b"LCP1"
VERSION = 1
FLAG_LCA = 0x01

_FIXED = struct.Struct("<4sBBBIQ")
_CHANNEL_TAIL = struct.Struct("<BBQQQ")
US_PER_S_MHZ = 10**9  # microseconds per second times milli-hertz per hertz


@dataclass
class ChannelMeta:
    name: str
    decimal_places: int
    lca: bool
    value_count: int
    payload_len: int = 0
    payload_bit_count: int = 0

    @property
    def spec(self) -> ChannelSpec:
        return ChannelSpec(self.name, self.decimal_places, self.lca)


@dataclass
class ContainerHeader:
    sample_rate_mHz: int
    t0_us: int
    channels: list[ChannelMeta] = field(default_factory=list)
    version: int = VERSION
    flags: int = 0

    @property
    def value_count(self) -> int:
        return self.channels[0].value_count if self.channels else 0

    @property
    def size(self) -> int:
        return _FIXED.size + sum(
            1 + len(c.name.encode()) + _CHANNEL_TAIL.size for c in self.channels
        )

    def pack(self) -> bytes:
        parts = [
            _FIXED.pack(
                MAGIC,
                self.version,
                self.flags,
                len(self.channels),
                self.sample_rate_mHz,
                self.t0_us,
            )
        ]
        for c in self.channels:
            name = c.name.encode("utf-8")
            parts.append(bytes([len(name)]) + name)
            parts.append(
                _CHANNEL_TAIL.pack(
                    c.decimal_places,
                    int(c.lca),
                    c.value_count,
                    c.payload_len,
                    c.payload_bit_count,
                )
            )
        return b"".join(parts)

    def to_dict(self) -> dict:
        return {
            "magic": MAGIC.decode(),
            "version": self.version,
            "flags": self.flags,
            "sample_rate_mHz": self.sample_rate_mHz,
            "t0_us": self.t0_us,
            "header_bytes": self.size,
            "channels": [
                {
                    "name": c.name,
                    "decimal_places": c.decimal_places,
                    "lca": c.lca,
                    "value_count": c.value_count,
                    "payload_len": c.payload_len,
                    "payload_bit_count": c.payload_bit_count,
                }
                for c in self.channels
            ],
        }


def rate_to_mhz(rate_hz: float) -> int:
    mhz = round(rate_hz * 1000)
    if mhz <= 0 or mhz >= 1 << 32:
        raise ValueError(f"sample rate {rate_hz} Hz not representable")
    return mhz


def write_container(
    specs,
    channels,
    sample_rate_mHz: int,
    t0_us: int,
    obfuscate: int = 0,
    seed=None,
) -> bytes:
    """Serialize quantized channels into container bytes.

    Each channel gets its own child RNG spawned from ``seed``, so payloads
    are independent of one another and reproducible under a fixed seed.
    """
    specs = list(specs)
    channels = [as_int16(c) for c in channels]
    if not channels:
        raise ValueError("at least one channel is required")
    if len(specs) != len(channels):
        raise ValueError("one ChannelSpec per channel is required")
    if len(channels) > 255:
        raise ValueError("at most 255 channels")
    lengths = {len(c) for c in channels}
    if len(lengths) != 1:
        raise ValueError(f"channels have unequal lengths: {sorted(lengths)}")
    if 0 in lengths:
        raise ValueError("channels must not be empty")
    if not 0 < sample_rate_mHz < 1 << 32:
        raise ValueError("sample_rate_mHz must be a positive 32-bit integer")
    if not 0 <= t0_us < 1 << 64:
        raise ValueError("t0_us must be a non-negative 64-bit integer")

    seeds = np.random.SeedSequence(seed).spawn(len(channels))
    header = ContainerHeader(sample_rate_mHz, int(t0_us))
    payloads = []
    for spec, values, child in zip(specs, channels, seeds):
        name = spec.name.encode("utf-8")
        if len(name) > 255:
            raise ValueError(f"channel name too long: {spec.name!r}")
        w = BitWriter()
        encode_obfuscated(values, obfuscate, child, w)
        data, nbits = w.finish()
        payloads.append(data)
        header.channels.append(
            ChannelMeta(spec.name, spec.decimal_places, spec.lca, len(values), len(data), nbits)
        )
        if spec.lca:
            header.flags |= FLAG_LCA
    return header.pack() + b"".join(payloads)


def read_header(data: bytes) -> tuple[ContainerHeader, int]:
    """Parse the header; return it and the offset of the first payload."""
    data = memoryview(bytes(data))
    if len(data) < len(MAGIC) or bytes(data[: len(MAGIC)]) != MAGIC:
        raise BadMagic("not an LCP container (bad magic)")
    if len(data) < _FIXED.size:
        raise TruncatedStream("container header truncated")
    _, version, flags, nchan, rate, t0 = _FIXED.unpack_from(data, 0)
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version} not supported")
    if nchan == 0:
        raise CorruptStream("container declares zero channels")
    if rate == 0:
        raise CorruptStream("container declares a zero sample rate")
    header = ContainerHeader(rate, t0, version=version, flags=flags)
    off = _FIXED.size
    for _ in range(nchan):
        if off >= len(data):
            raise TruncatedStream("channel table truncated")
        nlen = data[off]
        off += 1
        if off + nlen + _CHANNEL_TAIL.size > len(data):
            raise TruncatedStream("channel table truncated")
        try:
            name = bytes(data[off : off + nlen]).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptStream("channel name is not UTF-8") from exc
        off += nlen
        dp, lca, count, plen, pbits = _CHANNEL_TAIL.unpack_from(data, off)
        off += _CHANNEL_TAIL.size
        if dp > 4 or lca > 1:
            raise CorruptStream(f"channel {name!r}: invalid precision fields")
        if plen != (pbits + 7) // 8:
            raise CorruptStream(f"channel {name!r}: payload length/bit count mismatch")
        if count == 0:
            raise CorruptStream(f"channel {name!r}: zero values")
        header.channels.append(ChannelMeta(name, dp, bool(lca), count, plen, pbits))
    if len({c.value_count for c in header.channels}) != 1:
        raise CorruptStream("channels have unequal value counts")
    return header, off


def read_container(data: bytes) -> tuple[ContainerHeader, list[np.ndarray]]:
    header, off = read_header(data)
    data = bytes(data)
    total = off + sum(c.payload_len for c in header.channels)
    if len(data) < total:
        raise TruncatedStream(f"container holds {len(data)} bytes, header promises {total}")
    if len(data) > total:
        raise CorruptStream(f"{len(data) - total} trailing bytes after last payload")
    out = []
    for c in header.channels:
        payload = data[off : off + c.payload_len]
        off += c.payload_len
        r = BitReader(payload, c.payload_bit_count)
        values = decode_obfuscated(r, c.value_count)
        if r.bits_remaining:
            raise CorruptStream(f"channel {c.name!r}: {r.bits_remaining} unused payload bits")
        pad = c.payload_bit_count & 7
        if pad and payload[-1] & (0xFF >> pad):
            raise CorruptStream(f"channel {c.name!r}: nonzero padding bits")
        out.append(values)
    return header, out


def timestamp_of(i: int, header: ContainerHeader) -> int:
    """Timestamp of sample ``i`` in microseconds since the epoch."""
    if not 0 <= i < header.value_count:
        raise IndexError(f"sample index {i} outside [0, {header.value_count})")
    rate = header.sample_rate_mHz
    return header.t0_us + (i * US_PER_S_MHZ + rate // 2) // rate


def timestamps(header: ContainerHeader, count: int | None = None) -> np.ndarray:
    """All sample timestamps as an int64 array (same rounding as :func:`timestamp_of`)."""
    n = header.value_count if count is None else count
    rate = header.sample_rate_mHz
    i = np.arange(n, dtype=np.int64)
    if n and (n - 1) > (np.iinfo(np.int64).max - rate) // US_PER_S_MHZ:
        raise OverflowError("too many samples for int64 timestamps")
    return header.t0_us + (i * US_PER_S_MHZ + rate // 2) // rate
