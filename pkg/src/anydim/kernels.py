"""Backend selection for the exhaustive graph scan.

The compiled extension is used when it imports; ``ANYDIM_KERNEL=numpy`` forces
the numpy fallback.  Both return the same (value, bits) pair: the minimum and
the smallest bit string attaining it.
"""
from __future__ import annotations

import os

from . import _scan_py

try:
    if os.environ.get("ANYDIM_KERNEL", "").lower() == "numpy":
        raise ImportError("numpy backend requested")
    from . import _scan as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "numpy"
CHUNK = 1 << 16


def get_backend(name: str | None = None):
    name = name or BACKEND
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel not available")
        return _compiled
    if name == "numpy":
        return _scan_py
    raise ValueError(f"unknown backend {name!r}")


def scan(arrays: dict, n_edges: int, lo: int = 0, hi: int | None = None,
         backend: str | None = None, chunk: int = CHUNK) -> tuple[int, int]:
    """Exact (min, argmin bits) of the compiled objective over graph indices [lo, hi).

    The range is cut into fixed chunks and the per-chunk results are reduced by
    (value, bits), so the answer does not depend on chunking or visiting order.
    """
    mod = get_backend(backend)
    hi = (1 << n_edges) if hi is None else hi
    best = None
    a = arrays
    for s in range(lo, hi, chunk):
        res = mod.scan_range(a["full_mask"], a["full_w"], a["full_c"], a["ptr"], a["rest"], a["rest_w"],
                             a["rest_c"], a["constant"], n_edges, s, min(hi, s + chunk))
        if best is None or res < best:
            best = res
    return best


def value_at(arrays: dict, n_edges: int, bits: int, backend: str | None = None) -> int:
    a = arrays
    return get_backend(backend).value_at(a["full_mask"], a["full_w"], a["full_c"], a["constant"], n_edges, bits)
