"""Pure-Python codec kernels, used when the compiled extension is unavailable.

Both kernel modules expose the same three functions:

``encode(values) -> (data, nbits, class_counts, class_bits)``
    ``values`` is a contiguous int16 array with at least one element.
``decode(data, start_bit, end_bit, count) -> (values, end_cursor)``
``junk_positions(indices, length) -> int64 array``
"""

import numpy as np

from .errors import CorruptStream, TruncatedStream

NAME = "python"
SENTINEL = 255
N_CLASSES = 5


def encode(values):
    n = len(values)
    if n == 0:
        raise ValueError("cannot encode an empty sequence")
    vals = values.view(np.uint16).tolist()
    counts = [0] * N_CLASSES
    cbits = [0] * N_CLASSES
    out = bytearray()
    prev = vals[0]
    acc = prev
    nacc = 16
    pl = pt = SENTINEL
    for i in range(1, n):
        cur = vals[i]
        x = cur ^ prev
        prev = cur
        if x == 0:
            acc <<= 1
            nacc += 1
            counts[0] += 1
            cbits[0] += 1
        else:
            blen = x.bit_length()
            lead = 16 - blen
            trail = (x & -x).bit_length() - 1
            mlen = blen - trail
            m = x >> trail
            if lead == pl:
                if trail == pt:
                    code, size, cls = (0b100 << mlen) | m, 3 + mlen, 1
                else:
                    code, size, cls = (((0b101 << 4) | trail) << mlen) | m, 7 + mlen, 2
            elif trail == pt:
                code, size, cls = (((0b110 << 4) | lead) << mlen) | m, 7 + mlen, 3
            else:
                code = (((((0b111 << 4) | lead) << 4) | trail) << mlen) | m
                size, cls = 11 + mlen, 4
            pl = lead
            pt = trail
            acc = (acc << size) | code
            nacc += size
            counts[cls] += 1
            cbits[cls] += size
        if nacc >= 64:
            keep = nacc & 7
            out += (acc >> keep).to_bytes(nacc >> 3, "big")
            acc &= (1 << keep) - 1
            nacc = keep
    nbits = 8 * len(out) + nacc
    if nacc:
        pad = -nacc & 7
        out += (acc << pad).to_bytes((nacc + pad) >> 3, "big")
    return (
        bytes(out),
        nbits,
        np.array(counts, dtype=np.int64),
        np.array(cbits, dtype=np.int64),
    )


def decode(data, start_bit, end_bit, count):
    if count < 1:
        raise ValueError("count must be >= 1")
    if end_bit > 8 * len(data) or not 0 <= start_bit <= end_bit:
        raise ValueError("bit range outside buffer")
    stop = (end_bit + 7) >> 3
    bp = start_bit >> 3
    skew = start_bit & 7
    acc = nacc = 0
    if skew:
        acc = data[bp] & (0xFF >> skew)
        nacc = 8 - skew
        bp += 1
    left = end_bit - start_bit

    def short():
        return TruncatedStream(
            f"stream ended after {end_bit - start_bit} bits with values outstanding"
        )

    out = [0] * count
    pl = pt = SENTINEL
    prev = 0
    for i in range(count):
        if nacc < 32 and bp < stop:
            take = min(8, stop - bp)
            acc = ((acc & ((1 << nacc) - 1)) << (8 * take)) | int.from_bytes(
                data[bp : bp + take], "big"
            )
            nacc += 8 * take
            bp += take
        if i == 0:
            if left < 16:
                raise short()
            nacc -= 16
            left -= 16
            prev = (acc >> nacc) & 0xFFFF
            out[0] = prev
            continue
        if left < 1:
            raise short()
        nacc -= 1
        left -= 1
        if not (acc >> nacc) & 1:
            out[i] = prev
            continue
        if left < 2:
            raise short()
        nacc -= 2
        left -= 2
        ctl = (acc >> nacc) & 3
        if ctl == 0:
            lead, trail = pl, pt
        elif ctl == 1:
            if left < 4:
                raise short()
            nacc -= 4
            left -= 4
            lead, trail = pl, (acc >> nacc) & 15
        elif ctl == 2:
            if left < 4:
                raise short()
            nacc -= 4
            left -= 4
            lead, trail = (acc >> nacc) & 15, pt
        else:
            if left < 8:
                raise short()
            nacc -= 8
            left -= 8
            lead, trail = (acc >> (nacc + 4)) & 15, (acc >> nacc) & 15
        if lead + trail >= 16:
            raise CorruptStream(f"value {i}: invalid zero-run header")
        mlen = 16 - lead - trail
        if left < mlen:
            raise short()
        nacc -= mlen
        left -= mlen
        m = (acc >> nacc) & ((1 << mlen) - 1)
        if not (m & 1 and m >> (mlen - 1)):
            raise CorruptStream(f"value {i}: meaningful bits not maximal")
        prev ^= m << trail
        out[i] = prev
        pl = lead
        pt = trail
    return np.array(out, dtype=np.uint16).view(np.int16), end_bit - left


def junk_positions(indices, length):
    pos = []
    for j, u in enumerate(indices.tolist()):
        p = u % (length + j + 1)
        pos = [q + 1 if q >= p else q for q in pos]
        pos.append(p)
    return np.array(pos, dtype=np.int64)
