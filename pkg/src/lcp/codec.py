"""XOR-delta variable-length codec over 16-bit samples.

Stream grammar, after a raw 16-bit first value::

    0                                   value repeats (XOR == 0)
    1 00 <meaningful>                   same leading and trailing zero counts
    1 01 <trailing:4> <meaningful>      same leading count only
    1 10 <leading:4> <meaningful>       same trailing count only
    1 11 <leading:4> <trailing:4> <meaningful>

"Same" means strict equality with the counts of the previous nonzero XOR.
The meaningful field is the XOR with both zero runs stripped; its width is
``16 - leading - trailing`` and is never transmitted.

:func:`encode_next` / :func:`decode_next` step through one value at a time
and serve as the readable reference. :func:`encode_sequence` and
:func:`decode_sequence` run the same grammar through the bulk kernel
selected in :mod:`lcp._backend`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .bitstream import BitReader, BitWriter
from .errors import CorruptStream

SENTINEL = _backend.pycore.SENTINEL
WORD_BITS = 16
MAX_VALUE_BITS = 1 + 2 + 4 + 4 + 16

# class labels, in kernel histogram order
CLASSES = ("zero", "00", "01", "10", "11")


@dataclass(frozen=True)
class XorWindow:
    prev_value: int  # unsigned 16-bit pattern
    prev_leading: int = SENTINEL
    prev_trailing: int = SENTINEL

    @classmethod
    def start(cls, first_value: int) -> XorWindow:
        return cls(first_value & 0xFFFF)


class XorParts(NamedTuple):
    leading: int
    trailing: int
    meaningful_len: int
    meaningful_bits: int


def xor_parts(x: int) -> XorParts:
    """Split a nonzero 16-bit XOR pattern into zero runs and meaningful bits."""
    x &= 0xFFFF
    if x == 0:
        raise ValueError("xor_parts needs a nonzero pattern")
    blen = x.bit_length()
    trailing = (x & -x).bit_length() - 1
    return XorParts(WORD_BITS - blen, trailing, blen - trailing, x >> trailing)


def encode_next(win: XorWindow, v: int, w: BitWriter) -> XorWindow:
    cur = v & 0xFFFF
    x = cur ^ win.prev_value
    if x == 0:
        w.write_bits(0, 1)
        return XorWindow(cur, win.prev_leading, win.prev_trailing)
    lead, trail, mlen, bits = xor_parts(x)
    same_lead = lead == win.prev_leading
    same_trail = trail == win.prev_trailing
    if same_lead and same_trail:
        w.write_bits(0b100, 3)
    elif same_lead:
        w.write_bits(0b101, 3)
        w.write_bits(trail, 4)
    elif same_trail:
        w.write_bits(0b110, 3)
        w.write_bits(lead, 4)
    else:
        w.write_bits(0b111, 3)
        w.write_bits(lead, 4)
        w.write_bits(trail, 4)
    w.write_bits(bits, mlen)
    return XorWindow(cur, lead, trail)


def decode_next(win: XorWindow, r: BitReader) -> tuple[int, XorWindow]:
    """Decode one value; returns it as a signed integer plus the new window."""
    if r.read_bits(1) == 0:
        return _signed(win.prev_value), win
    ctl = r.read_bits(2)
    lead, trail = win.prev_leading, win.prev_trailing
    if ctl == 0b01:
        trail = r.read_bits(4)
    elif ctl == 0b10:
        lead = r.read_bits(4)
    elif ctl == 0b11:
        lead = r.read_bits(4)
        trail = r.read_bits(4)
    if lead + trail >= WORD_BITS:
        raise CorruptStream(f"invalid zero-run header (leading={lead}, trailing={trail})")
    mlen = WORD_BITS - lead - trail
    bits = r.read_bits(mlen)
    if not (bits & 1 and bits >> (mlen - 1)):
        raise CorruptStream("meaningful bits not maximal")
    cur = win.prev_value ^ (bits << trail)
    return _signed(cur), XorWindow(cur, lead, trail)


def _signed(u: int) -> int:
    return u - 0x10000 if u & 0x8000 else u


def as_int16(values) -> np.ndarray:
    """Coerce ``values`` to a contiguous int16 array, rejecting out-of-range input."""
    arr = np.asarray(values)
    if arr.dtype == np.int16:
        return np.ascontiguousarray(arr).ravel()
    if arr.dtype.kind not in "iub" and arr.size:
        raise TypeError(f"expected integer samples, got dtype {arr.dtype}")
    arr = arr.astype(np.int64).ravel()
    if arr.size and (arr.min() < -32768 or arr.max() > 32767):
        raise ValueError("samples must lie in [-32768, 32767]")
    return arr.astype(np.int16)


@dataclass
class EncodedStream:
    """Output of :func:`encode_array`: bits plus a per-class trace."""

    data: bytes
    nbits: int
    count: int
    class_counts: np.ndarray
    class_bits: np.ndarray

    @property
    def histogram(self) -> dict:
        return dict(zip(CLASSES, self.class_counts.tolist()))


def encode_array(values, core=None) -> EncodedStream:
    """Encode a whole sequence with the bulk kernel."""
    core = core or _backend.core
    arr = as_int16(values)
    if arr.size == 0:
        raise ValueError("cannot encode an empty sequence")
    data, nbits, counts, cbits = core.encode(arr)
    return EncodedStream(data, int(nbits), int(arr.size), counts, cbits)


def decode_array(data: bytes, count: int, nbits: int | None = None, core=None) -> np.ndarray:
    core = core or _backend.core
    end = 8 * len(data) if nbits is None else nbits
    out, _ = core.decode(bytes(data), 0, end, count)
    return out


def encode_sequence(values, w: BitWriter) -> int:
    """Append the encoded stream for ``values`` to ``w``; return its bit count."""
    enc = encode_array(values)
    w.write_bitstring(enc.data, enc.nbits)
    return enc.nbits


def decode_sequence(r: BitReader, count: int) -> np.ndarray:
    """Decode exactly ``count`` values starting at the reader's cursor."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out, end = _backend.core.decode(r.buffer, r.bit_cursor, r.bit_limit, count)
    r._advance_to(end)
    return out
