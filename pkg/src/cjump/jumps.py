"""Jump acceleration of Collatz orbits and the induced falling times.

A jump at n applies T exactly l times where l = bitlen(n); the Syracuse
jump does the same with Syr.  The h-variants apply h*l steps instead.
The falling time ft(n) is the number of jumps needed to get strictly
below n; sft(n) is the Syracuse analog.  Both are conjecturally finite,
so every search here carries an explicit jump budget and a bit-size cap,
and exhaustion is reported as a distinct outcome rather than a value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import StepTable, bitlen, default_table, iterate_t, step_syr

DEFAULT_MAX_JUMPS = 64

JUMP = "jump"
SYR_JUMP = "syr-jump"


def default_max_bits(n: int) -> int:
    # jump values gain at most log2(3) bits per step; 4x start size plus
    # slack caps any plausible excursion while still catching runaway growth
    return 4 * bitlen(n) + 64


def jump(n: int, table: StepTable | None = None) -> int:
    """jp(n) = T^(l)(n) with l = bitlen(n)."""
    return iterate_t(n, bitlen(n), table)


def jump_h(n: int, h: int, table: StepTable | None = None) -> int:
    """jp_h(n) = T^(h*l)(n); h = 1 recovers jump."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return iterate_t(n, h * bitlen(n), table)


def syr_jump(n: int) -> int:
    """sjp(n) = Syr^(l)(n) with l = bitlen(n); n must be odd."""
    if not n & 1 or n < 1:
        raise ValueError(f"syr_jump needs odd n >= 1, got {n}")
    for _ in range(bitlen(n)):
        n, _ = step_syr(n)
    return n


def syr_jump_h(n: int, h: int) -> int:
    """sjp_h(n) = Syr^(h*l)(n); h = 1 recovers syr_jump."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    if not n & 1 or n < 1:
        raise ValueError(f"syr_jump_h needs odd n >= 1, got {n}")
    for _ in range(h * bitlen(n)):
        n, _ = step_syr(n)
    return n


@dataclass(frozen=True)
class FallingTimeResult:
    """Falling-time outcome: count is None when a budget was hit.

    When finite, ``witness`` is the first jump value strictly below the
    start and all earlier jump values were >= the start.
    """

    count: int | None
    witness: int | None
    jumps_used: int

    @property
    def exhausted(self) -> bool:
        return self.count is None

    def expect(self) -> int:
        if self.count is None:
            raise RuntimeError(f"budget exhausted after {self.jumps_used} jumps")
        return self.count


def falling_time(
    n: int,
    max_jumps: int = DEFAULT_MAX_JUMPS,
    max_bits: int | None = None,
    table: StepTable | None = None,
) -> FallingTimeResult:
    """ft(n): least k >= 1 with jp^(k)(n) < n.  Needs n >= 3.

    Reports exhaustion after max_jumps jumps, or as soon as a jump value
    exceeds max_bits bits (default 4*bitlen(n) + 64).
    """
    return _falling_time(n, 1, max_jumps, max_bits, table, syracuse=False)


def falling_time_h(
    n: int,
    h: int,
    max_jumps: int = DEFAULT_MAX_JUMPS,
    max_bits: int | None = None,
    table: StepTable | None = None,
) -> FallingTimeResult:
    """ft_h(n): falling time with jp_h in place of jp."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return _falling_time(n, h, max_jumps, max_bits, table, syracuse=False)


def syr_falling_time(
    n: int,
    max_jumps: int = DEFAULT_MAX_JUMPS,
    max_bits: int | None = None,
) -> FallingTimeResult:
    """sft(n): least k >= 1 with sjp^(k)(n) < n.  Needs odd n >= 3."""
    return _falling_time(n, 1, max_jumps, max_bits, None, syracuse=True)


def syr_falling_time_h(
    n: int,
    h: int,
    max_jumps: int = DEFAULT_MAX_JUMPS,
    max_bits: int | None = None,
) -> FallingTimeResult:
    """sft_h(n): Syracuse falling time with sjp_h in place of sjp."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    return _falling_time(n, h, max_jumps, max_bits, None, syracuse=True)


def _falling_time(n, h, max_jumps, max_bits, table, syracuse):
    # jp(1) = jp(2) = 2 never fall, and sft excludes 1 as well
    if n < 3:
        raise ValueError(f"falling time needs n >= 3, got {n}")
    if syracuse and not n & 1:
        raise ValueError(f"Syracuse falling time needs odd n, got {n}")
    if max_bits is None:
        max_bits = default_max_bits(n)
    if not syracuse and table is None:
        table = default_table()
    v = n
    for k in range(1, max_jumps + 1):
        steps = h * bitlen(v)
        if syracuse:
            for _ in range(steps):
                v, _ = step_syr(v)
        else:
            v = iterate_t(v, steps, table)
        if v < n:
            return FallingTimeResult(k, v, k)
        if v.bit_length() > max_bits:
            return FallingTimeResult(None, None, k)
    return FallingTimeResult(None, None, max_jumps)


@dataclass(frozen=True)
class JumpTrace:
    """A finite prefix of an orbit under jumps or Syracuse jumps.

    terms[0] is the start; terms[i+1] arises from terms[i] by exactly
    steps_per_term[i] = h * bitlen(terms[i]) applications of the base map.
    ``truncated`` is set when the bit cap stopped the trace early.
    """

    start: int
    kind: str
    h: int
    terms: tuple[int, ...] = field(default_factory=tuple)
    steps_per_term: tuple[int, ...] = field(default_factory=tuple)
    truncated: bool = False


def jump_orbit(
    n: int,
    kind: str = JUMP,
    h: int = 1,
    max_terms: int = 32,
    max_bits: int | None = None,
    table: StepTable | None = None,
) -> JumpTrace:
    """Trace up to max_terms jump values starting at n."""
    if kind not in (JUMP, SYR_JUMP):
        raise ValueError(f"kind must be {JUMP!r} or {SYR_JUMP!r}, got {kind!r}")
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    syracuse = kind == SYR_JUMP
    if n < 1 or (syracuse and not n & 1):
        raise ValueError(f"orbit start must be {'odd ' if syracuse else ''}>= 1, got {n}")
    if max_bits is None:
        max_bits = default_max_bits(n)
    if not syracuse and table is None:
        table = default_table()
    terms = [n]
    steps = []
    truncated = False
    v = n
    while len(terms) < max_terms:
        s = h * bitlen(v)
        if syracuse:
            for _ in range(s):
                v, _ = step_syr(v)
        else:
            v = iterate_t(v, s, table)
        terms.append(v)
        steps.append(s)
        if v.bit_length() > max_bits:
            truncated = True
            break
    return JumpTrace(n, kind, h, tuple(terms), tuple(steps), truncated)
