"""Exact arbitrary-precision Collatz maps and batched iteration.

Three maps act on the positive integers:

    T(n)   = n/2 if n even, (3n+1)/2 if n odd      (the compressed map)
    C(n)   = n/2 if n even, 3n+1 if n odd          (the classic slow map)
    Syr(x) = largest odd factor of 3x+1            (odd x only)

Everything here is plain Python int arithmetic, so values of millions of
bits are handled exactly.  ``StepTable`` batches ``w`` steps of T into one
shift/multiply/add, which is what makes long orbits of huge integers cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_STEP_BUDGET = 10**6
DEFAULT_TABLE_WIDTH = 16


def step_t(n: int) -> int:
    """One step of T.  Rejects n < 1."""
    if n < 1:
        raise ValueError(f"T is defined on positive integers, got {n}")
    return (3 * n + 1) // 2 if n & 1 else n // 2


def step_c(n: int) -> int:
    """One step of the slow map C.  Rejects n < 1."""
    if n < 1:
        raise ValueError(f"C is defined on positive integers, got {n}")
    return 3 * n + 1 if n & 1 else n // 2


def step_syr(x: int) -> tuple[int, int]:
    """One Syracuse step: (largest odd factor of 3x+1, its 2-adic valuation)."""
    if x < 1 or not x & 1:
        raise ValueError(f"Syr is defined on odd positive integers, got {x}")
    y = 3 * x + 1
    nu = (y & -y).bit_length() - 1
    return y >> nu, nu


def bitlen(n: int) -> int:
    """Number of binary digits of n, i.e. the l with 2^(l-1) <= n < 2^l."""
    if n < 1:
        raise ValueError(f"bit length needs n >= 1, got {n}")
    return n.bit_length()


class StepTable:
    """Precomputed w-step acceleration table for T.

    For every residue r mod 2^w the table stores o(r), the number of odd
    iterates among the first w steps, and d(r) = T^(w)(r).  The affine
    identity

        T^(w)(n) = 3^o(r) * (n >> w) + d(r)      where r = n mod 2^w

    then advances any integer by w steps at once.  The table is immutable
    and safe to share across threads and forked workers.
    """

    __slots__ = ("width", "odd_counts", "tails", "_pow3")

    def __init__(self, width: int = DEFAULT_TABLE_WIDTH):
        if not 1 <= width <= 24:
            raise ValueError(f"table width must be in [1, 24], got {width}")
        self.width = width
        size = 1 << width
        v = np.arange(size, dtype=np.int64)
        o = np.zeros(size, dtype=np.uint8)
        for _ in range(width):
            odd = (v & 1).astype(bool)
            o += odd
            # 0 is treated as even and halves to 0, which keeps the identity
            # valid for n < 2^w
            v = np.where(odd, (3 * v + 1) >> 1, v >> 1)
        self.odd_counts = o
        self.tails = v
        self._pow3 = tuple(3**i for i in range(width + 1))

    def advance(self, n: int) -> int:
        """T^(width)(n) via the affine identity."""
        r = n & ((1 << self.width) - 1)
        return self._pow3[int(self.odd_counts[r])] * (n >> self.width) + int(self.tails[r])


_default_table: StepTable | None = None


def default_table() -> StepTable:
    global _default_table
    if _default_table is None:
        _default_table = StepTable(DEFAULT_TABLE_WIDTH)
    return _default_table


def iterate_t(n: int, k: int, table: StepTable | None = None) -> int:
    """T^(k)(n): k applications of T, table-batched in blocks of the width."""
    if n < 1:
        raise ValueError(f"iterate_t needs n >= 1, got {n}")
    if k < 0:
        raise ValueError(f"iterate_t needs k >= 0, got {k}")
    if table is None:
        table = default_table()
    w = table.width
    while k >= w:
        n = table.advance(n)
        k -= w
    for _ in range(k):
        n = (3 * n + 1) // 2 if n & 1 else n // 2
    return n


@dataclass(frozen=True)
class BudgetedResult:
    """Outcome of an iteration that is only conjecturally finite.

    ``value`` is None exactly when the step budget ran out; ``steps_used``
    then equals the configured budget.
    """

    value: int | None
    steps_used: int

    @property
    def exhausted(self) -> bool:
        return self.value is None

    def expect(self) -> int:
        """The value, raising if the budget was exhausted."""
        if self.value is None:
            raise RuntimeError(f"budget exhausted after {self.steps_used} steps")
        return self.value


def stopping_time(n: int, budget: int = DEFAULT_STEP_BUDGET) -> BudgetedResult:
    """Least s >= 1 with T^(s)(n) < n.  Needs n >= 2."""
    if n < 2:
        raise ValueError(f"stopping time needs n >= 2, got {n}")
    v = n
    for s in range(1, budget + 1):
        v = (3 * v + 1) // 2 if v & 1 else v // 2
        if v < n:
            return BudgetedResult(s, s)
    return BudgetedResult(None, budget)


def glide(n: int, budget: int = DEFAULT_STEP_BUDGET) -> BudgetedResult:
    """Least s >= 1 with C^(s)(n) < n.  Needs n >= 2."""
    if n < 2:
        raise ValueError(f"glide needs n >= 2, got {n}")
    v = n
    for s in range(1, budget + 1):
        v = 3 * v + 1 if v & 1 else v // 2
        if v < n:
            return BudgetedResult(s, s)
    return BudgetedResult(None, budget)


def total_stopping_time(n: int, budget: int = DEFAULT_STEP_BUDGET) -> BudgetedResult:
    """Least r >= 1 with T^(r)(n) = 1."""
    if n < 1:
        raise ValueError(f"total stopping time needs n >= 1, got {n}")
    v = n
    for r in range(1, budget + 1):
        v = (3 * v + 1) // 2 if v & 1 else v // 2
        if v == 1:
            return BudgetedResult(r, r)
    return BudgetedResult(None, budget)


def preimages_t(y: int) -> set[int]:
    """All n with T(n) = y: always 2y, plus (2y-1)/3 when that is an integer.

    The odd preimage exists iff y = 2 mod 3 and y >= 2; it is odd
    automatically (2y-1 is odd and dividing by 3 keeps it odd).
    """
    if y < 1:
        raise ValueError(f"preimages need y >= 1, got {y}")
    pre = {2 * y}
    if (2 * y - 1) % 3 == 0 and y >= 2:
        pre.add((2 * y - 1) // 3)
    return pre
