# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled codec kernels. Same contract as ``lcp._pycore``."""

import numpy as np

from libc.stdint cimport int16_t, int64_t, uint8_t, uint16_t, uint32_t, uint64_t

from .errors import CorruptStream, TruncatedStream

NAME = "cython"
cdef enum:
    SENTINEL = 255
    N_CLASSES = 5

cdef extern from *:
    int __builtin_clz(unsigned int) nogil
    int __builtin_ctz(unsigned int) nogil


def encode(const int16_t[::1] values):
    cdef Py_ssize_t n = values.shape[0]
    if n == 0:
        raise ValueError("cannot encode an empty sequence")
    # worst case: 16 raw bits, then 27 bits per value
    cdef Py_ssize_t cap = (16 + 27 * (n - 1) + 7) // 8 + 8
    out_arr = np.empty(cap, dtype=np.uint8)
    cdef uint8_t[::1] out = out_arr
    counts_arr = np.zeros(N_CLASSES, dtype=np.int64)
    cbits_arr = np.zeros(N_CLASSES, dtype=np.int64)
    cdef int64_t[::1] counts = counts_arr
    cdef int64_t[::1] cbits = cbits_arr

    cdef Py_ssize_t i, op = 0
    cdef uint64_t acc
    cdef int nacc
    cdef uint32_t prev, cur, x, code, m
    cdef int lead, trail, mlen, size, cls
    cdef int pl = SENTINEL, pt = SENTINEL

    with nogil:
        prev = <uint16_t>values[0]
        acc = prev
        nacc = 16
        for i in range(1, n):
            cur = <uint16_t>values[i]
            x = cur ^ prev
            prev = cur
            if x == 0:
                acc <<= 1
                nacc += 1
                counts[0] += 1
                cbits[0] += 1
            else:
                lead = __builtin_clz(x) - 16
                trail = __builtin_ctz(x)
                mlen = 16 - lead - trail
                m = x >> trail
                if lead == pl:
                    if trail == pt:
                        code = (<uint32_t>4 << mlen) | m
                        size = 3 + mlen
                        cls = 1
                    else:
                        code = (((<uint32_t>5 << 4) | trail) << mlen) | m
                        size = 7 + mlen
                        cls = 2
                elif trail == pt:
                    code = (((<uint32_t>6 << 4) | lead) << mlen) | m
                    size = 7 + mlen
                    cls = 3
                else:
                    code = (((((<uint32_t>7 << 4) | lead) << 4) | trail) << mlen) | m
                    size = 11 + mlen
                    cls = 4
                pl = lead
                pt = trail
                acc = (acc << size) | code
                nacc += size
                counts[cls] += 1
                cbits[cls] += size
            while nacc >= 8:
                nacc -= 8
                out[op] = <uint8_t>(acc >> nacc)
                op += 1
            acc &= (<uint64_t>1 << nacc) - 1
        while nacc >= 8:
            nacc -= 8
            out[op] = <uint8_t>(acc >> nacc)
            op += 1
    cdef int64_t nbits = 8 * op + nacc
    if nacc:
        out[op] = <uint8_t>(acc << (8 - nacc))
        op += 1
    return out_arr[:op].tobytes(), nbits, counts_arr, cbits_arr


def decode(const uint8_t[::1] data, Py_ssize_t start_bit, Py_ssize_t end_bit,
           Py_ssize_t count):
    if count < 1:
        raise ValueError("count must be >= 1")
    if end_bit > 8 * data.shape[0] or not 0 <= start_bit <= end_bit:
        raise ValueError("bit range outside buffer")
    out_arr = np.empty(count, dtype=np.int16)
    cdef int16_t[::1] out = out_arr
    cdef Py_ssize_t stop = (end_bit + 7) >> 3
    cdef Py_ssize_t bp = start_bit >> 3
    cdef int skew = start_bit & 7
    cdef uint64_t acc = 0
    cdef int nacc = 0
    cdef int64_t left = end_bit - start_bit
    cdef Py_ssize_t i
    cdef uint32_t prev = 0, ctl, m
    cdef int lead, trail, mlen
    cdef int pl = SENTINEL, pt = SENTINEL
    cdef int err = 0
    if skew:
        acc = data[bp] & (0xFF >> skew)
        nacc = 8 - skew
        bp += 1

    with nogil:
        for i in range(count):
            while nacc <= 56 and bp < stop:
                acc = (acc << 8) | data[bp]
                bp += 1
                nacc += 8
            if i == 0:
                if left < 16:
                    err = 1
                    break
                nacc -= 16
                left -= 16
                prev = <uint32_t>(acc >> nacc) & 0xFFFF
                out[0] = <int16_t><uint16_t>prev
                continue
            if left < 1:
                err = 1
                break
            nacc -= 1
            left -= 1
            if not ((acc >> nacc) & 1):
                out[i] = <int16_t><uint16_t>prev
                continue
            if left < 2:
                err = 1
                break
            nacc -= 2
            left -= 2
            ctl = <uint32_t>(acc >> nacc) & 3
            if ctl == 0:
                lead = pl
                trail = pt
            elif ctl == 1:
                if left < 4:
                    err = 1
                    break
                nacc -= 4
                left -= 4
                lead = pl
                trail = <int>((acc >> nacc) & 15)
            elif ctl == 2:
                if left < 4:
                    err = 1
                    break
                nacc -= 4
                left -= 4
                lead = <int>((acc >> nacc) & 15)
                trail = pt
            else:
                if left < 8:
                    err = 1
                    break
                nacc -= 8
                left -= 8
                lead = <int>((acc >> (nacc + 4)) & 15)
                trail = <int>((acc >> nacc) & 15)
            if lead + trail >= 16:
                err = 2
                break
            mlen = 16 - lead - trail
            if left < mlen:
                err = 1
                break
            nacc -= mlen
            left -= mlen
            m = <uint32_t>(acc >> nacc) & ((<uint32_t>1 << mlen) - 1)
            if not (m & 1) or not ((m >> (mlen - 1)) & 1):
                err = 3
                break
            prev ^= m << trail
            out[i] = <int16_t><uint16_t>prev
            pl = lead
            pt = trail
    if err == 1:
        raise TruncatedStream(
            f"stream ended after {end_bit - start_bit} bits with values outstanding"
        )
    if err == 2:
        raise CorruptStream(f"value {i}: invalid zero-run header")
    if err == 3:
        raise CorruptStream(f"value {i}: meaningful bits not maximal")
    return out_arr, end_bit - left


def junk_positions(const uint16_t[::1] indices, Py_ssize_t length):
    cdef Py_ssize_t count = indices.shape[0]
    pos_arr = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] pos = pos_arr
    cdef Py_ssize_t j, k
    cdef int64_t p
    for j in range(count):
        p = indices[j] % (length + j + 1)
        for k in range(j):
            if pos[k] >= p:
                pos[k] += 1
        pos[j] = p
    return pos_arr
