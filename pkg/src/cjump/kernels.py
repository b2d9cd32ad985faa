"""Array falling-time kernels with selectable backend.

Two interchangeable implementations compute ft/sft codes for a uint64
array of starts:

* ``numba``: compiled per-element loops (:mod:`cjump._kernels_numba`),
  the default whenever numba imports cleanly;
* ``numpy``: vectorised stepping over the whole active set, used as the
  fallback and for cross-checking.

Select explicitly with the environment variable ``CJUMP_BACKEND=numba``
or ``CJUMP_BACKEND=numpy`` (a ``backend=`` argument overrides both).

Code contract, identical for both backends (per element):

* ``k >= 1``   falling time is exactly k jumps;
* ``-1``       trajectory left the uint64-safe range, caller must redo
               that element with arbitrary precision (``OVERFLOW``);
* ``-2``       max_jumps jumps completed without falling (``EXHAUSTED``).

Both backends are bit-exact against the big-integer path in
:mod:`cjump.jumps`; the differential tests enforce it.
"""

from __future__ import annotations

import os

import numpy as np

from .jumps import falling_time_h, syr_falling_time_h

OVERFLOW = -1
EXHAUSTED = -2

# largest v with 3*v+1 still representable in uint64
_U64_SAFE = np.uint64((2**64 - 2) // 3)
_POW2 = (2 ** np.arange(64, dtype=object)).astype(np.uint64)

_ENV_FLAG = "CJUMP_BACKEND"
_numba_mod = None
_numba_failed = False


def _load_numba():
    global _numba_mod, _numba_failed
    if _numba_mod is None and not _numba_failed:
        try:
            from . import _kernels_numba

            _numba_mod = _kernels_numba
        except ImportError:
            _numba_failed = True
    return _numba_mod


def active_backend() -> str:
    """The backend that will run when none is passed explicitly."""
    env = os.environ.get(_ENV_FLAG, "").strip().lower()
    if env in ("numba", "numpy"):
        if env == "numba" and _load_numba() is None:
            raise RuntimeError(f"{_ENV_FLAG}=numba but numba is not importable")
        return env
    if env:
        raise RuntimeError(f"{_ENV_FLAG} must be 'numba' or 'numpy', got {env!r}")
    return "numba" if _load_numba() is not None else "numpy"


def _resolve(backend: str | None) -> str:
    if backend is None:
        return active_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"backend must be 'numba' or 'numpy', got {backend!r}")
    if backend == "numba" and _load_numba() is None:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def warmup(backend: str | None = None) -> str:
    """Force kernel compilation now (useful before forking workers)."""
    b = _resolve(backend)
    probe = np.array([27, 255], dtype=np.uint64)
    falling_times(probe, backend=b)
    syr_falling_times(probe, backend=b)
    return b


def _bitlen_u64(v: np.ndarray) -> np.ndarray:
    # exact: number of powers of two <= v; no float round-off
    return np.searchsorted(_POW2, v, side="right").astype(np.uint64)


def falling_times(
    ns: np.ndarray, *, max_jumps: int = 64, h: int = 1, backend: str | None = None
) -> np.ndarray:
    """ft codes for an array of starts (all >= 3)."""
    return _dispatch("falling_times", ns, max_jumps, h, backend)


def syr_falling_times(
    ns: np.ndarray, *, max_jumps: int = 64, h: int = 1, backend: str | None = None
) -> np.ndarray:
    """sft codes for an array of odd starts (all >= 3)."""
    return _dispatch("syr_falling_times", ns, max_jumps, h, backend)


def _dispatch(name, ns, max_jumps, h, backend):
    ns = np.ascontiguousarray(ns, dtype=np.uint64)
    if ns.size and int(ns.min()) < 3:
        raise ValueError("falling-time kernels need all starts >= 3")
    if name == "syr_falling_times" and ns.size and not (ns & np.uint64(1)).all():
        raise ValueError("Syracuse kernel needs all starts odd")
    if max_jumps < 1 or h < 1:
        raise ValueError("max_jumps and h must be >= 1")
    b = _resolve(backend)
    if b == "numba":
        fn = getattr(_load_numba(), name)
        return fn(ns, max_jumps, h)
    fn = _falling_times_numpy if name == "falling_times" else _syr_falling_times_numpy
    return fn(ns, max_jumps, h)


def _falling_times_numpy(ns, max_jumps, h):
    return _numpy_walk(ns, max_jumps, h, syracuse=False)


def _syr_falling_times_numpy(ns, max_jumps, h):
    return _numpy_walk(ns, max_jumps, h, syracuse=True)


def _numpy_walk(ns, max_jumps, h, syracuse):
    out = np.full(ns.shape[0], EXHAUSTED, dtype=np.int64)
    if not ns.size:
        return out
    one = np.uint64(1)
    idx = np.arange(ns.shape[0])
    n0 = ns.copy()
    cur = ns.copy()
    steps_left = np.uint64(h) * _bitlen_u64(cur)
    jumps = np.zeros(ns.shape[0], dtype=np.int64)

    while idx.size:
        risky = cur > _U64_SAFE
        if risky.any():
            out[idx[risky]] = OVERFLOW
            keep = ~risky
            idx, n0, cur, steps_left, jumps = (
                idx[keep], n0[keep], cur[keep], steps_left[keep], jumps[keep])
            if not idx.size:
                break
        if syracuse:
            y = np.uint64(3) * cur + one
            low = y & (~y + one)
            cur = y >> (_bitlen_u64(low) - one)
        else:
            odd = (cur & one).astype(bool)
            cur = np.where(odd, (np.uint64(3) * cur + one) >> one, cur >> one)
        steps_left -= one

        done = steps_left == 0
        if done.any():
            jumps[done] += 1
            fell = done & (cur < n0)
            out[idx[fell]] = jumps[fell]
            spent = done & ~fell & (jumps >= max_jumps)
            drop = fell | spent
            refresh = done & ~drop
            if refresh.any():
                steps_left[refresh] = np.uint64(h) * _bitlen_u64(cur[refresh])
            if drop.any():
                keep = ~drop
                idx, n0, cur, steps_left, jumps = (
                    idx[keep], n0[keep], cur[keep], steps_left[keep], jumps[keep])
    return out


def falling_times_exact(
    ns: np.ndarray, *, max_jumps: int = 64, h: int = 1, backend: str | None = None
) -> np.ndarray:
    """Like falling_times but OVERFLOW entries are redone exactly.

    The result contains only jump counts or EXHAUSTED; the big-integer
    recomputation uses the default bit cap of :func:`cjump.jumps.falling_time_h`.
    """
    return _exact(falling_times, falling_time_h, ns, max_jumps, h, backend)


def syr_falling_times_exact(
    ns: np.ndarray, *, max_jumps: int = 64, h: int = 1, backend: str | None = None
) -> np.ndarray:
    """Like syr_falling_times but OVERFLOW entries are redone exactly."""
    return _exact(syr_falling_times, syr_falling_time_h, ns, max_jumps, h, backend)


def _exact(kernel, scalar, ns, max_jumps, h, backend):
    codes = kernel(ns, max_jumps=max_jumps, h=h, backend=backend)
    pending = np.nonzero(codes == OVERFLOW)[0]
    for i in pending:
        res = scalar(int(ns[i]), h, max_jumps=max_jumps)
        codes[i] = EXHAUSTED if res.count is None else res.count
    return codes
