"""Pure numpy scan over labeled simple graphs, used when the compiled kernel is absent."""
from __future__ import annotations

import numpy as np

BLOCK = 1 << 16


def _values(full_mask, full_w, full_c, constant, n_edges, g):
    allmask = np.int64((1 << n_edges) - 1)
    gc = allmask ^ g
    total = np.full(g.shape, constant, dtype=np.int64)
    for m, w, c in zip(full_mask.tolist(), full_w.tolist(), full_c.tolist()):
        src = gc if c else g
        total += w * ((src & m) == m)
    return total


def scan_range(full_mask, full_w, full_c, ptr, rest, rest_w, rest_c, constant, n_edges, lo, hi):
    """Return (min value, smallest minimising bits) over the Gray codes of lo..hi-1."""
    if hi <= lo:
        raise ValueError("empty range")
    best, best_bits = None, None
    for s in range(lo, hi, BLOCK):
        idx = np.arange(s, min(hi, s + BLOCK), dtype=np.int64)
        g = idx ^ (idx >> 1)
        vals = _values(full_mask, full_w, full_c, constant, n_edges, g)
        v = int(vals.min())
        bits = int(g[vals == v].min())
        if best is None or (v, bits) < (best, best_bits):
            best, best_bits = v, bits
    return best, best_bits


def value_at(full_mask, full_w, full_c, constant, n_edges, g):
    return int(_values(full_mask, full_w, full_c, constant, n_edges, np.array([g], dtype=np.int64))[0])
