"""Numba-compiled falling-time kernels over uint64 arrays.

Loaded lazily by :mod:`cjump.kernels`; see there for the code contract.
Each element is walked with single T (or Syracuse) steps, tracking jump
boundaries at h * bitlen(value).  Values are bailed out to the caller
(code OVERFLOW) before 3*v+1 could wrap uint64.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

# largest v with 3*v+1 still representable in uint64
U64_SAFE = uint64((2**64 - 2) // 3)

OVERFLOW = int64(-1)
EXHAUSTED = int64(-2)

# lazy signatures: the dispatcher in cjump.kernels pins the dtypes, and
# deferring compilation keeps module import instant (the disk cache is
# consulted on first call)


@njit(cache=True)
def _bitlen_u64(v):
    n = uint64(0)
    while v > uint64(0):
        v >>= uint64(1)
        n += uint64(1)
    return n


@njit(cache=True)
def falling_times(ns, max_jumps, h):
    out = np.empty(ns.shape[0], dtype=np.int64)
    one = uint64(1)
    three = uint64(3)
    for i in range(ns.shape[0]):
        n0 = ns[i]
        v = n0
        code = EXHAUSTED
        jumps = int64(0)
        while jumps < max_jumps:
            steps = uint64(h) * _bitlen_u64(v)
            bailed = False
            for _ in range(steps):
                if v > U64_SAFE:
                    bailed = True
                    break
                if v & one:
                    v = (three * v + one) >> one
                else:
                    v >>= one
            if bailed:
                code = OVERFLOW
                break
            jumps += 1
            if v < n0:
                code = jumps
                break
        out[i] = code
    return out


@njit(cache=True)
def syr_falling_times(ns, max_jumps, h):
    out = np.empty(ns.shape[0], dtype=np.int64)
    one = uint64(1)
    three = uint64(3)
    for i in range(ns.shape[0]):
        n0 = ns[i]
        v = n0
        code = EXHAUSTED
        jumps = int64(0)
        while jumps < max_jumps:
            steps = uint64(h) * _bitlen_u64(v)
            bailed = False
            for _ in range(steps):
                if v > U64_SAFE:
                    bailed = True
                    break
                y = three * v + one
                while not y & one:
                    y >>= one
                v = y
            if bailed:
                code = OVERFLOW
                break
            jumps += 1
            if v < n0:
                code = jumps
                break
        out[i] = code
    return out
