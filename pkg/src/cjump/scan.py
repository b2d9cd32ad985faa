"""Deterministic chunked range scans: record tables and histograms.

A scan walks an integer range in fixed absolute chunks, computes falling
times for every candidate with the array kernels, and reduces chunk
results in ascending order.  Because the reduce is ordered, the output is
byte-identical regardless of worker count or interruption:

* worker processes only ever compute per-chunk candidate lists;
* the merge (which owns the running record state) is sequential;
* the checkpoint stores the merge state after every finished chunk and an
  interrupted scan resumes from the last completed chunk on the same
  absolute grid.

Output files carry a deterministic header (format version, config hash,
canonical scan description); volatile run facts (wall time, worker count,
backend) go to a ``<out>.meta.json`` sidecar so reruns stay bit-identical.

Checkpoint layout (text, one field per line, written atomically via
rename)::

    cjump-checkpoint 1
    config <sha256 hex of the canonical scan description>
    scan <canonical scan description>
    done <exclusive end of the completed prefix>
    max <running record maximum>          (record scans)
    seen <comma-joined values>            (new-ft scans)
    entries <count>
    <kind>\\t<n>\\t<bit length>\\t<value>   one line per partial entry
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import kernels
from .residues import enumerate_persistent, persistent_mask

FORMAT_VERSION = 1
DEFAULT_CHUNK = 1 << 20

FT_RECORDS = "ft-records"
NEW_FT = "new-ft"
SFT_RECORDS = "sft-records"
SCAN_KINDS = (FT_RECORDS, NEW_FT, SFT_RECORDS)

KIND_LABEL = {FT_RECORDS: "FtRecord", NEW_FT: "NewFt", SFT_RECORDS: "SftRecord"}

FILTER_MOD4EQ3 = "mod4eq3"
FILTER_ODD = "odd"
FILTER_PERSISTENT24 = "persistent24"
SCAN_FILTERS = (FILTER_MOD4EQ3, FILTER_ODD, FILTER_PERSISTENT24)

POPULATIONS = ("odd", "mod4eq1", "mod4eq3", "persistent24")


class ScanBudgetError(RuntimeError):
    """A single candidate exhausted its jump budget; the scan is aborted."""

    def __init__(self, n: int, max_jumps: int):
        super().__init__(f"jump budget ({max_jumps}) exhausted at n = {n}")
        self.n = n


@dataclass(frozen=True)
class RecordEntry:
    kind: str
    n: int
    bit_length: int
    value: int

    def line(self) -> str:
        return f"{self.kind}\t{self.n}\t{self.bit_length}\t{self.value}"


@dataclass(frozen=True)
class ScanConfig:
    """Everything that affects scan results; hashed into outputs."""

    kind: str
    lo: int
    hi: int
    filter: str = FILTER_MOD4EQ3
    max_jumps: int = 64
    chunk_size: int = DEFAULT_CHUNK
    seed_max: int = 0  # running record maximum carried in when lo > 3

    def __post_init__(self):
        if self.kind not in SCAN_KINDS:
            raise ValueError(f"kind must be one of {SCAN_KINDS}, got {self.kind!r}")
        if self.filter not in SCAN_FILTERS:
            raise ValueError(f"filter must be one of {SCAN_FILTERS}, got {self.filter!r}")
        if self.kind == SFT_RECORDS and self.lo < 7:
            raise ValueError("sft record scans start at n >= 7")
        if not 3 <= self.lo <= self.hi:
            raise ValueError(f"need 3 <= lo <= hi, got [{self.lo}, {self.hi}]")
        if self.chunk_size < 4:
            raise ValueError("chunk_size must be >= 4")

    def canonical(self) -> str:
        return (
            f"scan={self.kind} range={self.lo}..{self.hi} filter={self.filter} "
            f"max-jumps={self.max_jumps} chunk={self.chunk_size} "
            f"seed-max={self.seed_max} v={FORMAT_VERSION}"
        )

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()

    def chunks(self) -> list[tuple[int, int]]:
        # absolute grid anchored at lo, so resume points never move
        out = []
        start = self.lo
        while start <= self.hi:
            end = min(start + self.chunk_size, self.hi + 1)
            out.append((start, end))
            start = end
        return out


def _candidates(cfg: ScanConfig, lo: int, hi: int, mask: np.ndarray | None) -> np.ndarray:
    """Candidate starts in [lo, hi), ascending, as uint64."""
    if cfg.filter == FILTER_MOD4EQ3:
        first = lo + ((3 - lo) % 4)
        ns = np.arange(first, hi, 4, dtype=np.uint64)
    elif cfg.filter == FILTER_ODD:
        first = lo | 1
        ns = np.arange(first, hi, 2, dtype=np.uint64)
    else:
        first = lo | 1
        ns = np.arange(first, hi, 2, dtype=np.uint64)
        ns = ns[mask[ns & np.uint64((1 << 24) - 1)]]
    if cfg.kind == SFT_RECORDS:
        ns = ns[ns & np.uint64(1) == 1]
    return ns


_worker_mask: np.ndarray | None = None


def _chunk_task(args) -> list[tuple[int, int]]:
    """Local candidate list for one chunk (records or first-seen values)."""
    cfg, lo, hi = args
    global _worker_mask
    if cfg.filter == FILTER_PERSISTENT24 and _worker_mask is None:
        _worker_mask = persistent_mask(24)
    ns = _candidates(cfg, lo, hi, _worker_mask)
    if not ns.size:
        return []
    if cfg.kind == SFT_RECORDS:
        codes = kernels.syr_falling_times_exact(ns, max_jumps=cfg.max_jumps)
    else:
        codes = kernels.falling_times_exact(ns, max_jumps=cfg.max_jumps)
    bad = np.nonzero(codes == kernels.EXHAUSTED)[0]
    if bad.size:
        raise ScanBudgetError(int(ns[bad[0]]), cfg.max_jumps)
    if cfg.kind == NEW_FT:
        # first index of each distinct value, in ascending n order
        _, first = np.unique(codes, return_index=True)
        first.sort()
        return [(int(ns[i]), int(codes[i])) for i in first]
    # strictly-increasing running maximum within the chunk
    cummax = np.maximum.accumulate(codes)
    hits = np.nonzero(codes == cummax)[0]
    out = []
    best = 0
    for i in hits:
        if codes[i] > best:
            best = int(codes[i])
            out.append((int(ns[i]), best))
    return out


@dataclass
class _MergeState:
    """Sequential reduce state; exactly what the checkpoint persists."""

    entries: list[RecordEntry]
    best: int
    seen: set[int]
    done: int

    @classmethod
    def fresh(cls, cfg: ScanConfig) -> "_MergeState":
        return cls([], cfg.seed_max, set(), cfg.lo)

    def absorb(self, cfg: ScanConfig, chunk_end: int, local: list[tuple[int, int]]):
        label = KIND_LABEL[cfg.kind]
        for n, value in local:
            if cfg.kind == NEW_FT:
                if value in self.seen:
                    continue
                self.seen.add(value)
            else:
                if value <= self.best:
                    continue
                self.best = value
            self.entries.append(RecordEntry(label, n, n.bit_length(), value))
        self.done = chunk_end


@dataclass(frozen=True)
class ScanResult:
    config: ScanConfig
    entries: tuple[RecordEntry, ...]
    resumed: bool
    wall_time_s: float


def run_scan(
    cfg: ScanConfig,
    workers: int = 1,
    checkpoint_path: str | None = None,
    progress=None,
) -> ScanResult:
    """Execute a scan, optionally in parallel, optionally checkpointed."""
    t0 = time.monotonic()
    state = _MergeState.fresh(cfg)
    resumed = False
    if checkpoint_path and os.path.exists(checkpoint_path):
        state = _load_checkpoint(cfg, checkpoint_path)
        resumed = True
    todo = [(cfg, lo, hi) for lo, hi in cfg.chunks() if lo >= state.done]
    if todo and todo[0][1] != state.done:
        raise RuntimeError("checkpoint is not aligned with the chunk grid")
    global _worker_mask
    if cfg.filter == FILTER_PERSISTENT24 and _worker_mask is None:
        _worker_mask = persistent_mask(24)  # built once, inherited by forks

    if workers > 1 and len(todo) > 1:
        kernels.warmup()  # compile once in the parent, before forking
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(workers) as pool:
            for (_, _, hi), local in zip(todo, pool.imap(_chunk_task, todo, chunksize=1)):
                state.absorb(cfg, hi, local)
                if checkpoint_path:
                    _write_checkpoint(cfg, state, checkpoint_path)
                if progress:
                    progress(state.done)
    else:
        for task in todo:
            local = _chunk_task(task)
            state.absorb(cfg, task[2], local)
            if checkpoint_path:
                _write_checkpoint(cfg, state, checkpoint_path)
            if progress:
                progress(state.done)

    return ScanResult(cfg, tuple(state.entries), resumed, time.monotonic() - t0)


def scan_ft_records(lo, hi, filter=FILTER_MOD4EQ3, max_jumps=64, workers=1):
    """Falling-time record setters in [lo, hi], ascending."""
    cfg = ScanConfig(FT_RECORDS, lo, hi, filter=filter, max_jumps=max_jumps)
    return list(run_scan(cfg, workers=workers).entries)


def scan_new_ft(lo, hi, filter=FILTER_MOD4EQ3, max_jumps=64, workers=1):
    """First occurrence of each falling-time value in [lo, hi], ascending."""
    cfg = ScanConfig(NEW_FT, lo, hi, filter=filter, max_jumps=max_jumps)
    return list(run_scan(cfg, workers=workers).entries)


def scan_sft_records(lo, hi, max_jumps=64, workers=1):
    """Syracuse falling-time record setters in [lo, hi] (odd, 3 mod 4), ascending."""
    cfg = ScanConfig(SFT_RECORDS, max(lo, 7), hi, max_jumps=max_jumps)
    return list(run_scan(cfg, workers=workers).entries)


# --- checkpoint I/O ---------------------------------------------------------


def _write_checkpoint(cfg: ScanConfig, state: _MergeState, path: str) -> None:
    lines = [
        f"cjump-checkpoint {FORMAT_VERSION}",
        f"config {cfg.config_hash()}",
        f"scan {cfg.canonical()}",
        f"done {state.done}",
    ]
    if cfg.kind == NEW_FT:
        lines.append("seen " + ",".join(str(v) for v in sorted(state.seen)))
    else:
        lines.append(f"max {state.best}")
    lines.append(f"entries {len(state.entries)}")
    lines.extend(e.line() for e in state.entries)
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _load_checkpoint(cfg: ScanConfig, path: str) -> _MergeState:
    with open(path) as fh:
        lines = fh.read().splitlines()
    fields = {}
    body_at = 0
    for i, line in enumerate(lines):
        key, _, rest = line.partition(" ")
        if i == 0:
            if line != f"cjump-checkpoint {FORMAT_VERSION}":
                raise RuntimeError(f"unrecognised checkpoint header in {path}")
            continue
        fields[key] = rest
        if key == "entries":
            body_at = i + 1
            break
    if fields.get("config") != cfg.config_hash():
        raise RuntimeError(
            "checkpoint was written by a different scan configuration; refusing to "
            f"resume ({path} has scan {fields.get('scan')!r})"
        )
    entries = []
    for line in lines[body_at : body_at + int(fields["entries"])]:
        kind, n, bits, value = line.split("\t")
        entries.append(RecordEntry(kind, int(n), int(bits), int(value)))
    seen = set()
    if cfg.kind == NEW_FT and fields.get("seen"):
        seen = {int(v) for v in fields["seen"].split(",")}
    return _MergeState(entries, int(fields.get("max", 0)), seen, int(fields["done"]))


# --- output files -----------------------------------------------------------


def records_bytes(result: ScanResult, fmt: str = "tsv") -> bytes:
    """Serialise entries with the deterministic header."""
    cfg = result.config
    head = [
        f"# cjump records v{FORMAT_VERSION}",
        f"# config-hash {cfg.config_hash()}",
        f"# {cfg.canonical()}",
    ]
    if fmt == "tsv":
        rows = [e.line() for e in result.entries]
    elif fmt == "csv":
        rows = [f"{e.kind},{e.n},{e.bit_length},{e.value}" for e in result.entries]
    elif fmt == "jsonl":
        rows = [
            json.dumps(
                {"kind": e.kind, "n": e.n, "bit_length": e.bit_length, "value": e.value},
                sort_keys=True,
            )
            for e in result.entries
        ]
    else:
        raise ValueError(f"format must be tsv, csv or jsonl, got {fmt!r}")
    return ("\n".join(head + rows) + "\n").encode()


def write_output(path: str, payload: bytes, meta: dict) -> None:
    """Write payload atomically plus a volatile .meta.json sidecar."""
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(payload)
    os.replace(tmp, path)
    with open(f"{path}.meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def run_meta(canonical: str, wall_time_s: float, **extra) -> dict:
    """Sidecar metadata: volatile facts live here, never in the payload."""
    from . import __version__

    meta = {
        "tool": "cjump",
        "version": __version__,
        "format_version": FORMAT_VERSION,
        "command": canonical,
        "config_hash": hashlib.sha256(canonical.encode()).hexdigest(),
        "wall_time_s": round(wall_time_s, 6),
        "backend": kernels.active_backend(),
    }
    meta.update(extra)
    return meta


# --- histograms -------------------------------------------------------------


@dataclass(frozen=True)
class HistogramRow:
    """Exact falling-time split of one dyadic interval [2^l, 2^(l+1))."""

    ell: int
    n1: int
    n2: int
    n3plus: int

    @property
    def total(self) -> int:
        return self.n1 + self.n2 + self.n3plus

    @property
    def p1(self) -> Fraction:
        return Fraction(self.n1, self.total)

    @property
    def p2(self) -> Fraction:
        return Fraction(self.n2, self.total)

    @property
    def p3plus(self) -> Fraction:
        return Fraction(self.n3plus, self.total)


def histogram(
    ell_lo: int,
    ell_hi: int,
    population: str = "odd",
    chunk_size: int = DEFAULT_CHUNK,
) -> list[HistogramRow]:
    """Proportions of ft = 1, 2, >= 3 per dyadic interval, from exact counts."""
    if population not in POPULATIONS:
        raise ValueError(f"population must be one of {POPULATIONS}, got {population!r}")
    lo_min = 24 if population == "persistent24" else 2
    if not lo_min <= ell_lo <= ell_hi:
        raise ValueError(f"need {lo_min} <= ell_lo <= ell_hi for {population}")
    residues = enumerate_persistent(24).astype(np.uint64) if population == "persistent24" else None
    rows = []
    for ell in range(ell_lo, ell_hi + 1):
        counts = np.zeros(3, dtype=np.int64)
        if residues is not None:
            # dyadic intervals with l >= 24 are aligned to whole 2^24 blocks,
            # so candidates come straight from the residue list
            step = 1 << 24
            spans = ((base, base + step) for base in range(1 << ell, 1 << (ell + 1), step))
        else:
            spans = ((lo, min(lo + chunk_size, 1 << (ell + 1)))
                     for lo in range(1 << ell, 1 << (ell + 1), chunk_size))
        for lo, hi in spans:
            ns = _population_chunk(population, lo, hi, residues)
            if not ns.size:
                continue
            # two jumps decide the buckets: 1, 2, or >= 3 (EXHAUSTED)
            codes = kernels.falling_times_exact(ns, max_jumps=2)
            counts[0] += int((codes == 1).sum())
            counts[1] += int((codes == 2).sum())
            counts[2] += int((codes == kernels.EXHAUSTED).sum())
        if not counts.sum():
            raise ValueError(f"population {population} is empty in [2^{ell}, 2^{ell + 1})")
        rows.append(HistogramRow(ell, int(counts[0]), int(counts[1]), int(counts[2])))
    return rows


def _population_chunk(population, lo, hi, residues):
    if population == "odd":
        return np.arange(lo | 1, hi, 2, dtype=np.uint64)
    if population == "mod4eq1":
        return np.arange(lo + ((1 - lo) % 4), hi, 4, dtype=np.uint64)
    if population == "mod4eq3":
        return np.arange(lo + ((3 - lo) % 4), hi, 4, dtype=np.uint64)
    return np.uint64(lo) + residues


def histogram_csv_bytes(rows: list[HistogramRow]) -> bytes:
    """CSV with columns l,a,b,c (proportions for ft = 1, 2, >= 3)."""
    out = ["l,a,b,c"]
    for r in rows:
        out.append(f"{r.ell},{float(r.p1)!r},{float(r.p2)!r},{float(r.p3plus)!r}")
    return ("\n".join(out) + "\n").encode()
