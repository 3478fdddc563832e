# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan over labeled simple graphs.

Graphs are visited in Gray-code order inside [lo, hi), so consecutive graphs
differ in one edge and the objective is updated from the copies that edge
completes or breaks.
"""
from libc.stdint cimport int64_t, uint8_t


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef int64_t _direct(const int64_t[:] full_mask, const int64_t[:] full_w, const uint8_t[:] full_c,
                     int64_t constant, int64_t g, int64_t allmask) nogil:
    cdef int64_t total = constant
    cdef int64_t src, m
    cdef Py_ssize_t t
    for t in range(full_mask.shape[0]):
        m = full_mask[t]
        src = (allmask ^ g) if full_c[t] else g
        if (src & m) == m:
            total += full_w[t]
    return total


def scan_range(const int64_t[:] full_mask, const int64_t[:] full_w, const uint8_t[:] full_c,
               const int64_t[:] ptr, const int64_t[:] rest, const int64_t[:] rest_w,
               const uint8_t[:] rest_c, int64_t constant, int n_edges, int64_t lo, int64_t hi):
    """Return (min value, bits of the smallest minimiser) over Gray codes of [lo, hi)."""
    if hi <= lo:
        raise ValueError("empty range")
    cdef int64_t allmask = (<int64_t>1 << n_edges) - 1
    cdef int64_t i, g, bit, r, d_plain, d_comp, val, best, best_bits
    cdef int e
    cdef Py_ssize_t t
    with nogil:
        g = lo ^ (lo >> 1)
        val = _direct(full_mask, full_w, full_c, constant, g, allmask)
        best = val
        best_bits = g
        i = lo
        while i + 1 < hi:
            e = __builtin_ctzll(<unsigned long long>(i + 1))
            bit = <int64_t>1 << e
            d_plain = 0
            d_comp = 0
            for t in range(ptr[e], ptr[e + 1]):
                r = rest[t]
                if rest_c[t]:
                    if (g & r) == 0:
                        d_comp += rest_w[t]
                elif (g & r) == r:
                    d_plain += rest_w[t]
            if g & bit:
                val += d_comp - d_plain
            else:
                val += d_plain - d_comp
            g ^= bit
            i += 1
            if val < best or (val == best and g < best_bits):
                best = val
                best_bits = g
    return best, best_bits


def value_at(const int64_t[:] full_mask, const int64_t[:] full_w, const uint8_t[:] full_c,
             int64_t constant, int n_edges, int64_t g):
    cdef int64_t allmask = (<int64_t>1 << n_edges) - 1
    return _direct(full_mask, full_w, full_c, constant, g, allmask)
