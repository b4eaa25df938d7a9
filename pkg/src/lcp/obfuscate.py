"""Junk-value splicing layer.

Every channel payload starts with an 8-bit count N. The value stream that
follows holds N index values, then the data with N junk values spliced in;
all of it goes through the same XOR codec, so junk is indistinguishable
from data without first decoding the index prefix.

This is obfuscation, not encryption. Anyone who knows the format can strip
the junk; it only makes a payload awkward to read for someone who does not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .bitstream import BitReader, BitWriter
from .codec import as_int16, decode_sequence, encode_sequence
from .errors import CorruptStream

COUNT_BITS = 8
MAX_JUNK = 255


@dataclass
class ObfuscationPlan:
    count: int
    indices: np.ndarray  # int16 patterns, read as unsigned when splicing
    junk: np.ndarray  # int16

    def __post_init__(self):
        self.indices = as_int16(self.indices)
        self.junk = as_int16(self.junk)
        if not 0 <= self.count <= MAX_JUNK:
            raise ValueError(f"junk count must be in [0, {MAX_JUNK}]")
        if not self.count == len(self.indices) == len(self.junk):
            raise ValueError("count, indices and junk lengths differ")

    @classmethod
    def draw(cls, count: int, rng) -> ObfuscationPlan:
        """Draw ``count`` index patterns, then ``count`` junk values."""
        rng = np.random.default_rng(rng)
        indices = rng.integers(0, 1 << 16, size=count, dtype=np.uint16).view(np.int16)
        junk = rng.integers(0, 1 << 16, size=count, dtype=np.uint16).view(np.int16)
        return cls(count, indices, junk)


def _junk_mask(indices: np.ndarray, length: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.ascontiguousarray(as_int16(indices).view(np.uint16))
    pos = _backend.core.junk_positions(u, length)
    mask = np.zeros(length + len(u), dtype=bool)
    mask[pos] = True
    return pos, mask


def splice(values, plan: ObfuscationPlan) -> np.ndarray:
    """Insert ``plan.junk[j]`` at ``indices[j] mod (L + j + 1)``, one at a time.

    Positions are relative to the partially spliced sequence, so later
    insertions may shift earlier junk to the right.
    """
    vals = as_int16(values)
    if vals.size == 0:
        raise ValueError("cannot splice into an empty sequence")
    if plan.count == 0:
        return vals.copy()
    pos, mask = _junk_mask(plan.indices, len(vals))
    out = np.empty(mask.size, dtype=np.int16)
    out[pos] = plan.junk
    out[~mask] = vals
    return out


def unsplice(spliced, indices, original_len: int) -> np.ndarray:
    spliced = as_int16(spliced)
    indices = as_int16(indices)
    if original_len < 1 or len(spliced) != original_len + len(indices):
        raise CorruptStream(
            f"spliced length {len(spliced)} does not match "
            f"{original_len} values + {len(indices)} junk"
        )
    if len(indices) == 0:
        return spliced.copy()
    _, mask = _junk_mask(indices, original_len)
    return spliced[~mask]


def encode_obfuscated(values, count: int, rng, w: BitWriter) -> tuple[int, ObfuscationPlan]:
    """Write the junk count and the spliced value stream to ``w``.

    ``rng`` is anything :func:`numpy.random.default_rng` accepts (a seed, a
    ``SeedSequence`` or a ``Generator``). Returns the number of bits
    written, including the 8-bit count, and the plan that was used.
    """
    vals = as_int16(values)
    if vals.size == 0:
        raise ValueError("cannot encode an empty sequence")
    plan = ObfuscationPlan.draw(count, rng) if count else ObfuscationPlan(0, [], [])
    start = w.bit_cursor
    w.write_bits(count, COUNT_BITS)
    stream = np.concatenate([plan.indices, splice(vals, plan)]) if count else vals
    encode_sequence(stream, w)
    return w.bit_cursor - start, plan


def decode_obfuscated(r: BitReader, original_len: int) -> np.ndarray:
    count = r.read_bits(COUNT_BITS)
    stream = decode_sequence(r, 2 * count + original_len)
    return unsplice(stream[count:], stream[:count], original_len)
