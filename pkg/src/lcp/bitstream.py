"""MSB-first bit writer and sequential bit reader over byte buffers."""

from __future__ import annotations

from .errors import TruncatedStream

MAX_FIELD_BITS = 32


def _check_count(count: int) -> None:
    if not 1 <= count <= MAX_FIELD_BITS:
        raise ValueError(f"bit count must be in [1, {MAX_FIELD_BITS}], got {count}")


class BitWriter:
    """Append-only bit sink.

    Whole bytes go straight to a bytearray; up to seven pending bits are
    kept in an integer accumulator until the next byte completes.
    """

    __slots__ = ("_buf", "_acc", "_nacc")

    def __init__(self) -> None:
        self._buf = bytearray()
        self._acc = 0
        self._nacc = 0

    @property
    def bit_cursor(self) -> int:
        return 8 * len(self._buf) + self._nacc

    @property
    def buffer(self) -> bytes:
        """Bytes written so far, last partial byte zero-padded."""
        if self._nacc:
            return bytes(self._buf) + bytes([(self._acc << (8 - self._nacc)) & 0xFF])
        return bytes(self._buf)

    def write_bits(self, value: int, count: int) -> BitWriter:
        _check_count(count)
        if value < 0 or value >> count:
            raise ValueError(f"value {value} does not fit in {count} bits")
        acc = (self._acc << count) | value
        n = self._nacc + count
        while n >= 8:
            n -= 8
            self._buf.append((acc >> n) & 0xFF)
        self._acc = acc & ((1 << n) - 1)
        self._nacc = n
        return self

    def write_bitstring(self, data: bytes, nbits: int) -> BitWriter:
        """Append the first ``nbits`` bits of ``data`` (MSB-first)."""
        if nbits < 0 or nbits > 8 * len(data):
            raise ValueError("nbits exceeds the supplied buffer")
        if nbits == 0:
            return self
        nbytes = (nbits + 7) >> 3
        if self._nacc == 0:
            whole = nbits >> 3
            self._buf += data[:whole]
            rem = nbits & 7
            if rem:
                self._acc = data[whole] >> (8 - rem)
                self._nacc = rem
            return self
        chunk = int.from_bytes(data[:nbytes], "big") >> (8 * nbytes - nbits)
        acc = (self._acc << nbits) | chunk
        n = self._nacc + nbits
        keep = n & 7
        self._buf += (acc >> keep).to_bytes(n >> 3, "big")
        self._acc = acc & ((1 << keep) - 1)
        self._nacc = keep
        return self

    def finish(self) -> tuple[bytes, int]:
        """Return the zero-padded buffer and the exact number of bits written."""
        return self.buffer, self.bit_cursor


class BitReader:
    """Sequential MSB-first reader.

    ``nbits`` limits the readable region (defaults to the whole buffer), so
    padding bits past the logical end are never consumed as data.
    """

    __slots__ = ("_data", "_pos", "_end")

    def __init__(self, data: bytes, nbits: int | None = None) -> None:
        self._data = bytes(data)
        total = 8 * len(self._data)
        if nbits is None:
            nbits = total
        if not 0 <= nbits <= total:
            raise ValueError("nbits exceeds the supplied buffer")
        self._pos = 0
        self._end = nbits

    @property
    def buffer(self) -> bytes:
        return self._data

    @property
    def bit_cursor(self) -> int:
        return self._pos

    @property
    def bit_limit(self) -> int:
        return self._end

    @property
    def bits_remaining(self) -> int:
        return self._end - self._pos

    def read_bits(self, count: int) -> int:
        _check_count(count)
        pos = self._pos
        end = pos + count
        if end > self._end:
            raise TruncatedStream(
                f"need {count} bits at offset {pos}, only {self._end - pos} left"
            )
        first = pos >> 3
        last = (end + 7) >> 3
        chunk = int.from_bytes(self._data[first:last], "big")
        self._pos = end
        return (chunk >> (8 * last - end)) & ((1 << count) - 1)

    def _advance_to(self, pos: int) -> None:
        # used by bulk decoders that consumed bits directly from the buffer
        if not self._pos <= pos <= self._end:
            raise ValueError("cursor may only move forward within the stream")
        self._pos = pos
