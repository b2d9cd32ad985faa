"""Targeted probes: Mersenne-form starts, tree neighborhoods, random search.

These run on arbitrary-precision integers throughout; they chase a small
number of very large values rather than dense ranges, so the array
kernels are only used opportunistically (neighborhood candidates that
still fit in 64 bits).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import StepTable, bitlen, default_table, glide, iterate_t, step_syr, stopping_time
from .jumps import (
    DEFAULT_MAX_JUMPS,
    falling_time,
    falling_time_h,
    syr_falling_time,
    syr_falling_time_h,
)
from .records_data import FLAT_JUMP_H, FLAT_SYR_JUMP_H, GLIDE_RECORDS, GlideRecord
from .residues import persistent_mask


def _odd_part(y: int) -> int:
    return y >> ((y & -y).bit_length() - 1)


def mersenne_falling_times(
    ell_lo: int,
    ell_hi: int,
    kind: str = "ft",
    max_jumps: int = DEFAULT_MAX_JUMPS,
    table: StepTable | None = None,
) -> list[tuple[int, int | None]]:
    """ft(2^l - 1) or sft(2^l - 1) for each l in [ell_lo, ell_hi].

    The first jump is closed-form: jp(2^l - 1) = 3^l - 1, and
    sjp(2^l - 1) is the odd part of 3^l - 1.  The 3^l are maintained
    incrementally (one multiplication by 3 per l), so only the later
    jumps cost real iteration.  A budget failure is reported as None for
    that l.
    """
    if kind not in ("ft", "sft"):
        raise ValueError(f"kind must be 'ft' or 'sft', got {kind!r}")
    if not 2 <= ell_lo <= ell_hi:
        raise ValueError(f"need 2 <= ell_lo <= ell_hi, got [{ell_lo}, {ell_hi}]")
    if table is None:
        table = default_table()
    out = []
    p3 = pow(3, ell_lo)
    for ell in range(ell_lo, ell_hi + 1):
        n = (1 << ell) - 1
        first = p3 - 1 if kind == "ft" else _odd_part(p3 - 1)
        if first < n:
            out.append((ell, 1))
        else:
            out.append((ell, _count_from(n, first, kind, max_jumps, table)))
        p3 *= 3
    return out


def _count_from(n, first, kind, max_jumps, table):
    # first = value after jump 1; keep jumping until strictly below n
    v = first
    max_bits = 4 * n.bit_length() + 64
    for k in range(2, max_jumps + 1):
        if kind == "ft":
            v = iterate_t(v, bitlen(v), table)
        else:
            for _ in range(bitlen(v)):
                v, _ = step_syr(v)
        if v < n:
            return k
        if v.bit_length() > max_bits:
            return None
    return None


@dataclass(frozen=True)
class NeighborhoodResult:
    hits: tuple[tuple[int, int], ...]  # (n, ft), ascending by n
    nodes: int
    truncated: bool


_BFS_SWITCH = 100_000  # frontier size at which the walk goes depth-first


def _dfs_chunk(args):
    """Walk the preimage subtrees of a chunk of starts to a fixed depth.

    Returns (candidates passing the residue filter, nodes visited).  The
    filter state is inherited from the parent process via fork.
    """
    starts, depth, budget = args
    mask, low, root_set = _neighborhood_filter
    out = []
    visits = 0
    stack = [(m, depth) for m in starts]
    small_seen = set()
    while stack:
        y, left = stack.pop()
        kids = [2 * y]
        if y >= 2 and (2 * y - 1) % 3 == 0:
            kids.append((2 * y - 1) // 3)
        for m in kids:
            if m in root_set:
                continue
            if m < 1024:
                if m in small_seen:
                    continue
                small_seen.add(m)
            visits += 1
            if m >= 3 and (mask is None or mask[m & low]):
                out.append(m)
            if left > 1:
                stack.append((m, left - 1))
        if visits >= budget:
            return out, visits
    return out, visits


_neighborhood_filter: tuple = (None, 0, frozenset())


def neighborhood(
    seed: int,
    i_max: int,
    j_max: int,
    persist_k: int = 24,
    ft_threshold: int = 0,
    node_cap: int = 10_000_000,
    max_jumps: int = DEFAULT_MAX_JUMPS,
    workers: int = 1,
) -> NeighborhoodResult:
    """Collatz-tree neighbors m with T^(i)(m) = T^(j)(seed), i <= i_max, j <= j_max.

    Forward points of the seed orbit are taken as multi-source roots and
    the preimage tree is grown breadth-first level by level, so a cap hit
    early drops the deepest ancestors first; once the frontier outgrows
    memory-friendly sizes the remaining levels are walked depth-first per
    subtree (a cap firing in that phase truncates without the strict
    order guarantee).  Survivors are filtered to persist_k-persistent
    classes (persist_k = 0 disables the filter) and to falling time
    >= ft_threshold.
    """
    if seed < 3:
        raise ValueError(f"seed must be >= 3, got {seed}")
    if i_max < 0 or j_max < 0:
        raise ValueError("i_max and j_max must be >= 0")
    roots = [seed]
    for _ in range(j_max):
        v = roots[-1]
        roots.append((3 * v + 1) // 2 if v & 1 else v // 2)
    # every node's forward path meets the seed orbit at a unique first
    # source, so skipping sources as children makes the multi-source walk
    # visit each neighbor exactly once without a visited set
    root_set = set(roots)

    mask = persistent_mask(persist_k) if persist_k else None
    low = (1 << persist_k) - 1 if persist_k else 0
    candidates = [m for m in root_set if m >= 3 and (mask is None or mask[m & low])]

    frontier = list(root_set)
    nodes = len(root_set)
    depth_left = i_max
    truncated = False
    small_seen: set[int] = set()  # breaks the backward 1 <-> 2 loop
    while depth_left > 0 and frontier and not truncated and len(frontier) <= _BFS_SWITCH:
        nxt = []
        for y in frontier:
            for m in (2 * y, (2 * y - 1) // 3 if y >= 2 and (2 * y - 1) % 3 == 0 else 0):
                if not m or m in root_set:
                    continue
                if m < 1024:
                    if m in small_seen:
                        continue
                    small_seen.add(m)
                nxt.append(m)
                nodes += 1
                if m >= 3 and (mask is None or mask[m & low]):
                    candidates.append(m)
                if nodes >= node_cap:
                    truncated = True
                    break
            if truncated:
                break
        frontier = nxt
        depth_left -= 1

    if depth_left > 0 and frontier and not truncated:
        global _neighborhood_filter
        _neighborhood_filter = (mask, low, root_set)
        chunk = max(1, len(frontier) // max(8 * workers, 8))
        tasks = [frontier[i : i + chunk] for i in range(0, len(frontier), chunk)]
        budget = max(1, (node_cap - nodes) // len(tasks))
        args = [(t, depth_left, budget) for t in tasks]
        if workers > 1:
            import multiprocessing

            ctx = multiprocessing.get_context("fork")
            with ctx.Pool(workers) as pool:
                results = pool.map(_dfs_chunk, args)
        else:
            results = [_dfs_chunk(a) for a in args]
        for found, visits in results:
            candidates.extend(found)
            nodes += visits
            if visits >= budget:
                truncated = True

    candidates = sorted(set(candidates))

    hits = []
    fits = [m for m in candidates if m.bit_length() <= 62]
    big = [m for m in candidates if m.bit_length() > 62]
    if fits:
        codes = kernels.falling_times_exact(np.array(fits, dtype=np.uint64),
                                            max_jumps=max_jumps)
        hits.extend((m, int(c)) for m, c in zip(fits, codes)
                    if c != kernels.EXHAUSTED and c >= ft_threshold)
    for m in big:
        res = falling_time(m, max_jumps=max_jumps)
        if res.count is not None and res.count >= ft_threshold:
            hits.append((m, res.count))
    hits.sort()
    return NeighborhoodResult(tuple(hits), nodes, truncated)


@dataclass(frozen=True)
class RandomHit:
    n: int
    ft: int | None
    sft: int | None


def random_search(
    bits: int,
    count: int,
    ft_threshold: int | None = None,
    sft_threshold: int | None = None,
    seed: int = 0,
    max_jumps: int = DEFAULT_MAX_JUMPS,
) -> list[RandomHit]:
    """Draw odd integers uniformly from [2^(bits-1), 2^bits) and keep the
    ones whose ft or sft reaches its threshold.

    Reproducible across platforms: the generator is CPython's Mersenne
    Twister seeded with ``seed``, one ``getrandbits(bits - 2)`` draw per
    candidate (top and bottom bits are forced to 1).
    """
    if bits < 2:
        raise ValueError(f"bits must be >= 2, got {bits}")
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    rng = random.Random(seed)
    hits = []
    for _ in range(count):
        middle = rng.getrandbits(bits - 2) if bits > 2 else 0
        n = (1 << (bits - 1)) | (middle << 1) | 1
        ft_res = falling_time(n, max_jumps=max_jumps) if ft_threshold is not None else None
        sft_res = syr_falling_time(n, max_jumps=max_jumps) if sft_threshold is not None else None
        keep = False
        if ft_res is not None and (ft_res.count is None or ft_res.count >= ft_threshold):
            keep = True
        if sft_res is not None and (sft_res.count is None or sft_res.count >= sft_threshold):
            keep = True
        if keep:
            hits.append(RandomHit(n,
                                  ft_res.count if ft_res else None,
                                  sft_res.count if sft_res else None))
    return hits


# --- glide-record verification ----------------------------------------------


@dataclass(frozen=True)
class FieldCheck:
    record: str
    field: str
    expected: int
    computed: int | None

    @property
    def ok(self) -> bool:
        return self.expected == self.computed


@dataclass(frozen=True)
class VerifyReport:
    checks: tuple[FieldCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def mismatches(self) -> list[FieldCheck]:
        return [c for c in self.checks if not c.ok]


def verify_glide_records(records: tuple[GlideRecord, ...] | None = None) -> VerifyReport:
    """Recompute every column of the embedded table and diff it.

    Also asserts the one-jump flattening: ft_18 = 1 and sft_12 = 1 for
    every record.
    """
    if records is None:
        records = GLIDE_RECORDS
    checks = []
    budget = 10**5
    for rec in records:
        n = rec.n
        checks.append(FieldCheck(rec.name, "bit_length", rec.bit_length, n.bit_length()))
        checks.append(FieldCheck(rec.name, "glide", rec.glide, glide(n, budget).value))
        checks.append(FieldCheck(rec.name, "stopping_time", rec.stopping_time,
                                 stopping_time(n, budget).value))
        checks.append(FieldCheck(rec.name, "falling_time", rec.falling_time,
                                 falling_time(n).count))
        checks.append(FieldCheck(rec.name, "syr_falling_time", rec.syr_falling_time,
                                 syr_falling_time(n).count))
        checks.append(FieldCheck(rec.name, f"ft_{FLAT_JUMP_H}", 1,
                                 falling_time_h(n, FLAT_JUMP_H).count))
        checks.append(FieldCheck(rec.name, f"sft_{FLAT_SYR_JUMP_H}", 1,
                                 syr_falling_time_h(n, FLAT_SYR_JUMP_H).count))
    return VerifyReport(tuple(checks))
