"""Command-line surface.

Every flag has an environment-variable mirror named CJUMP_<FLAG> with
dashes turned into underscores (so ``--max-jumps 32`` equals
``CJUMP_MAX_JUMPS=32``); explicit flags win over the environment.  Big
integers are accepted as decimal or in the forms ``2^K``, ``2^K-C`` and
``2^K+C`` (a decimal command line for a 500000-bit number is not
practical).

Exit codes: 0 success, 1 verification mismatch or budget exhaustion,
2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import time

from . import __version__
from .core import glide, stopping_time, total_stopping_time
from .jumps import (
    JUMP,
    SYR_JUMP,
    falling_time,
    falling_time_h,
    jump,
    jump_h,
    jump_orbit,
    syr_falling_time,
    syr_falling_time_h,
    syr_jump,
    syr_jump_h,
)
from .probes import mersenne_falling_times, neighborhood, random_search, verify_glide_records
from .residues import count_persistent, enumerate_persistent, write_persistent
from .scan import (
    SCAN_FILTERS,
    SCAN_KINDS,
    ScanBudgetError,
    ScanConfig,
    histogram,
    histogram_csv_bytes,
    records_bytes,
    run_meta,
    run_scan,
    write_output,
)

_NAT_RE = re.compile(r"^(?:(\d+)|2\^(\d+)(?:([+-])(\d+))?)$")


def parse_nat(text: str) -> int:
    """Decimal or 2^K, 2^K-C, 2^K+C."""
    m = _NAT_RE.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"not an integer or 2^K[+-C] expression: {text!r}")
    if m.group(1) is not None:
        return int(m.group(1))
    n = 1 << int(m.group(2))
    if m.group(3):
        c = int(m.group(4))
        n = n + c if m.group(3) == "+" else n - c
    if n < 0:
        raise argparse.ArgumentTypeError(f"expression is negative: {text!r}")
    return n


def parse_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"range must look like LO..HI, got {text!r}")
    return parse_nat(lo), parse_nat(hi)


def _env(name: str, default, cast=None):
    raw = os.environ.get(f"CJUMP_{name}")
    if raw is None:
        return default
    if cast is not None:
        return cast(raw)
    return type(default)(raw) if default is not None else raw


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cjump",
        description="Accelerated Collatz dynamics: jumps, falling times, residue "
        "sieves and record scans.",
        epilog="Environment mirrors: CJUMP_WORKERS, CJUMP_MAX_JUMPS, CJUMP_MAX_BITS, "
        "CJUMP_STEP_BUDGET, CJUMP_CHUNK_SIZE, CJUMP_FORMAT, CJUMP_SEED, CJUMP_BACKEND.",
    )
    p.add_argument("--version", action="version", version=f"cjump {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add_budgets(sp):
        sp.add_argument("--max-jumps", type=int, default=_env("MAX_JUMPS", 64))
        sp.add_argument("--max-bits", type=int, default=_env("MAX_BITS", None, int))

    sp = sub.add_parser("eval", help="evaluate one quantity at one integer")
    sp.add_argument("n", type=parse_nat)
    sp.add_argument("what", choices=["sigma", "sigma-inf", "glide", "ft", "sft",
                                     "ft_h", "sft_h", "jp", "sjp"])
    sp.add_argument("--h", type=int, default=1, help="h for ft_h/sft_h/jp/sjp variants")
    sp.add_argument("--step-budget", type=int, default=_env("STEP_BUDGET", 10**6))
    add_budgets(sp)
    sp.set_defaults(fn=cmd_eval)

    sp = sub.add_parser("orbit", help="print a jump orbit prefix")
    sp.add_argument("n", type=parse_nat)
    sp.add_argument("--kind", choices=["jump", "sjump"], default="jump")
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--max-terms", type=int, default=32)
    sp.add_argument("--max-bits", type=int, default=_env("MAX_BITS", None, int))
    sp.set_defaults(fn=cmd_orbit)

    sp = sub.add_parser("scan", help="range scan for records or new falling times")
    sp.add_argument("kind", choices=list(SCAN_KINDS))
    sp.add_argument("--range", type=parse_range, required=True, metavar="LO..HI")
    sp.add_argument("--filter", choices=list(SCAN_FILTERS), default="mod4eq3")
    sp.add_argument("--seed-max", type=int, default=0,
                    help="record maximum carried in when the scan does not start at 3")
    sp.add_argument("--max-jumps", type=int, default=_env("MAX_JUMPS", 64))
    sp.add_argument("--chunk-size", type=int, default=_env("CHUNK_SIZE", 1 << 20))
    sp.add_argument("--workers", type=int, default=_env("WORKERS", 1))
    sp.add_argument("--checkpoint", default=_env("CHECKPOINT", None))
    sp.add_argument("--out", default=_env("OUT", None))
    sp.add_argument("--format", choices=["tsv", "csv", "jsonl"],
                    default=_env("FORMAT", "tsv"))
    sp.set_defaults(fn=cmd_scan)

    sp = sub.add_parser("histogram", help="falling-time split per dyadic interval")
    sp.add_argument("--range", type=parse_range, required=True, metavar="LO..HI",
                    help="range of l for the intervals [2^l, 2^(l+1))")
    sp.add_argument("--population", choices=["odd", "mod4eq1", "mod4eq3", "persistent24"],
                    default="odd")
    sp.add_argument("--out", default=_env("OUT", None))
    sp.set_defaults(fn=cmd_histogram)

    sp = sub.add_parser("mersenne", help="falling times of 2^l - 1 over a range of l")
    sp.add_argument("--range", type=parse_range, required=True, metavar="LO..HI")
    sp.add_argument("--kind", choices=["ft", "sft"], default="ft")
    sp.add_argument("--max-jumps", type=int, default=_env("MAX_JUMPS", 64))
    sp.add_argument("--out", default=_env("OUT", None))
    sp.set_defaults(fn=cmd_mersenne)

    sp = sub.add_parser("neighborhood", help="tree neighbors of a seed, filtered")
    sp.add_argument("seed", type=parse_nat)
    sp.add_argument("--i-max", type=int, required=True, help="backward steps")
    sp.add_argument("--j-max", type=int, required=True, help="forward steps")
    sp.add_argument("--persist-k", type=int, default=24,
                    help="persistence filter (0 disables)")
    sp.add_argument("--ft-threshold", type=int, default=0)
    sp.add_argument("--node-cap", type=int, default=10_000_000)
    sp.add_argument("--workers", type=int, default=_env("WORKERS", 1))
    sp.add_argument("--out", default=_env("OUT", None))
    sp.set_defaults(fn=cmd_neighborhood)

    sp = sub.add_parser("random", help="random odd integers of a given size, thresholded")
    sp.add_argument("--bits", type=int, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--ft-threshold", type=int, default=None)
    sp.add_argument("--sft-threshold", type=int, default=None)
    sp.add_argument("--seed", type=int, default=_env("SEED", 0))
    sp.add_argument("--max-jumps", type=int, default=_env("MAX_JUMPS", 64))
    sp.add_argument("--out", default=_env("OUT", None))
    sp.set_defaults(fn=cmd_random)

    sp = sub.add_parser("verify", help="recompute embedded datasets and diff")
    sp.add_argument("target", choices=["glide-records"])
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("persistent", help="persistent residue classes mod 2^k")
    sp.add_argument("action", choices=["count", "list"])
    sp.add_argument("k", type=int)
    sp.add_argument("--out", default=_env("OUT", None))
    sp.set_defaults(fn=cmd_persistent)

    return p


def cmd_eval(args) -> int:
    n, what, h = args.n, args.what, args.h
    if what == "sigma":
        res = stopping_time(n, args.step_budget)
        meta = f"steps={res.steps_used}"
        value = res.value
    elif what == "sigma-inf":
        res = total_stopping_time(n, args.step_budget)
        meta = f"steps={res.steps_used}"
        value = res.value
    elif what == "glide":
        res = glide(n, args.step_budget)
        meta = f"steps={res.steps_used}"
        value = res.value
    elif what in ("ft", "ft_h"):
        res = falling_time_h(n, h, max_jumps=args.max_jumps, max_bits=args.max_bits) \
            if what == "ft_h" else falling_time(n, args.max_jumps, args.max_bits)
        meta = f"jumps={res.jumps_used} witness={res.witness}"
        value = res.count
    elif what in ("sft", "sft_h"):
        res = syr_falling_time_h(n, h, max_jumps=args.max_jumps, max_bits=args.max_bits) \
            if what == "sft_h" else syr_falling_time(n, args.max_jumps, args.max_bits)
        meta = f"jumps={res.jumps_used} witness={res.witness}"
        value = res.count
    elif what == "jp":
        value = jump(n) if h == 1 else jump_h(n, h)
        meta = f"steps={h * n.bit_length()}"
    else:
        value = syr_jump(n) if h == 1 else syr_jump_h(n, h)
        meta = f"steps={h * n.bit_length()}"
    if value is None:
        print(f"budget exhausted ({meta})", file=sys.stderr)
        return 1
    print(value)
    print(f"# {meta}", file=sys.stderr)
    return 0


def cmd_orbit(args) -> int:
    kind = JUMP if args.kind == "jump" else SYR_JUMP
    trace = jump_orbit(args.n, kind=kind, h=args.h, max_terms=args.max_terms,
                       max_bits=args.max_bits)
    print(" ".join(str(t) for t in trace.terms))
    print("# steps-per-term " + " ".join(str(s) for s in trace.steps_per_term),
          file=sys.stderr)
    if trace.truncated:
        print("# truncated: bit cap exceeded", file=sys.stderr)
        return 1
    return 0


def cmd_scan(args) -> int:
    lo, hi = args.range
    cfg = ScanConfig(args.kind, lo, hi, filter=args.filter, max_jumps=args.max_jumps,
                     chunk_size=args.chunk_size, seed_max=args.seed_max)
    try:
        result = run_scan(cfg, workers=args.workers, checkpoint_path=args.checkpoint)
    except ScanBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if result.resumed:
        print(f"# resumed from checkpoint {args.checkpoint}", file=sys.stderr)
    payload = records_bytes(result, args.format)
    if args.out:
        meta = run_meta(cfg.canonical(), result.wall_time_s,
                        workers=args.workers, entries=len(result.entries))
        write_output(args.out, payload, meta)
        print(f"# wrote {args.out} ({len(result.entries)} entries)", file=sys.stderr)
    else:
        sys.stdout.write(payload.decode())
    return 0


def cmd_histogram(args) -> int:
    lo, hi = args.range
    t0 = time.monotonic()
    rows = histogram(lo, hi, args.population)
    payload = histogram_csv_bytes(rows)
    if args.out:
        meta = run_meta(f"histogram range={lo}..{hi} population={args.population}",
                        time.monotonic() - t0, rows=len(rows))
        write_output(args.out, payload, meta)
    else:
        sys.stdout.write(payload.decode())
    return 0


def cmd_mersenne(args) -> int:
    lo, hi = args.range
    t0 = time.monotonic()
    pairs = mersenne_falling_times(lo, hi, kind=args.kind, max_jumps=args.max_jumps)
    lines = [f"{ell}\t{'-' if v is None else v}" for ell, v in pairs]
    payload = ("\n".join([f"# cjump mersenne kind={args.kind} range={lo}..{hi}"] + lines)
               + "\n").encode()
    if args.out:
        meta = run_meta(f"mersenne kind={args.kind} range={lo}..{hi}",
                        time.monotonic() - t0)
        write_output(args.out, payload, meta)
    else:
        sys.stdout.write(payload.decode())
    if any(v is None for _, v in pairs):
        print("# budget exhausted for some l", file=sys.stderr)
        return 1
    return 0


def cmd_neighborhood(args) -> int:
    t0 = time.monotonic()
    res = neighborhood(args.seed, args.i_max, args.j_max, persist_k=args.persist_k,
                       ft_threshold=args.ft_threshold, node_cap=args.node_cap,
                       workers=args.workers)
    lines = [f"{n}\t{ft}" for n, ft in res.hits]
    head = (f"# cjump neighborhood seed={args.seed} i-max={args.i_max} "
            f"j-max={args.j_max} persist-k={args.persist_k} "
            f"ft-threshold={args.ft_threshold}")
    payload = ("\n".join([head] + lines) + "\n").encode()
    if args.out:
        meta = run_meta(head.lstrip("# "), time.monotonic() - t0,
                        nodes=res.nodes, truncated=res.truncated)
        write_output(args.out, payload, meta)
    else:
        sys.stdout.write(payload.decode())
    if res.truncated:
        print(f"# truncated at node cap {args.node_cap}", file=sys.stderr)
    return 0


def cmd_random(args) -> int:
    t0 = time.monotonic()
    hits = random_search(args.bits, args.count, ft_threshold=args.ft_threshold,
                         sft_threshold=args.sft_threshold, seed=args.seed,
                         max_jumps=args.max_jumps)
    lines = [f"{h.n}\t{'-' if h.ft is None else h.ft}\t{'-' if h.sft is None else h.sft}"
             for h in hits]
    head = (f"# cjump random bits={args.bits} count={args.count} seed={args.seed} "
            f"ft-threshold={args.ft_threshold} sft-threshold={args.sft_threshold}")
    payload = ("\n".join([head] + lines) + "\n").encode()
    if args.out:
        write_output(args.out, payload,
                     run_meta(head.lstrip("# "), time.monotonic() - t0,
                              seed=args.seed, hits=len(hits)))
    else:
        sys.stdout.write(payload.decode())
    return 0


def cmd_verify(args) -> int:
    report = verify_glide_records()
    bad = report.mismatches()
    for c in report.checks:
        status = "ok" if c.ok else "MISMATCH"
        line = f"{c.record} {c.field}: expected {c.expected}, computed {c.computed} [{status}]"
        if not c.ok:
            print(line)
    print(f"{len(report.checks)} checks, {len(bad)} mismatches")
    return 1 if bad else 0


def cmd_persistent(args) -> int:
    if args.action == "count":
        print(count_persistent(args.k))
        return 0
    if args.out:
        n = write_persistent(args.k, args.out)
        print(f"# wrote {n} residues to {args.out}", file=sys.stderr)
    else:
        for r in enumerate_persistent(args.k):
            print(int(r))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
