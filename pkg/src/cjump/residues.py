"""Residue-class machinery: persistent classes mod 2^k and valuation classes.

Persistence
-----------
The parity of the first k iterates of T, and hence the affine form
T^(j)(n) = 3^o_j * (n - r)/2^j + T^(j)(r), depends only on the class
r = n mod 2^k.  A class is *k-persistent* when its growth coefficient
dominates through every one of the first k steps:

    3^o_j > 2^j   for all 1 <= j <= k.

Sufficiently large members of a persistent class stay above their start
for k steps (equality 3^o = 2^j is impossible for j >= 1).  The test
range j <= k is the convention under which the count of 24-persistent
classes mod 2^24 is exactly 286581, which is the published calibration
point; small members of a persistent class can still stop early because
of the additive term.

Valuation classes
-----------------
For odd x not divisible by 3, write x_i = Syr^(i)(x) and let k_i be the
2-adic valuation taken out at step i.  The vector (k_1, ..., k_m)
determines x modulo 2^(S+1) with S = k_1 + ... + k_m, and conversely
every odd x in that class realises the vector.  Within the domain
x = +-1 mod 6, the fiber of a vector is therefore the union of exactly
two full congruence classes mod 6*2^S, one for each residue of x mod 6
(structure theorem of Sinai).  ``valuation_class`` returns the class for
a chosen anchor x mod 6; ``valuation_classes`` returns both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import step_syr

MAX_PERSISTENT_K = 26  # enumeration is held in memory; 2^26 residues max


@dataclass(frozen=True)
class ParityProfile:
    """Odd-iterate counts o_1..o_k of the T-trajectory of a class mod 2^k."""

    residue: int
    k: int
    odd_counts: tuple[int, ...]


def parity_profile(r: int, k: int) -> ParityProfile:
    """Simulate k steps of T from r, counting odd iterates seen so far.

    The class representative 0 is treated as even throughout (it halves
    to itself), giving the all-even profile for the zero class.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 <= r < (1 << k):
        raise ValueError(f"residue must be in [0, 2^{k}), got {r}")
    v = r
    o = 0
    counts = []
    for _ in range(k):
        if v & 1:
            o += 1
            v = (3 * v + 1) // 2
        else:
            v //= 2
        counts.append(o)
    return ParityProfile(r, k, tuple(counts))


def is_persistent(r: int, k: int) -> bool:
    """Whether the class r mod 2^k passes the coefficient test 3^o_j > 2^j for j <= k."""
    profile = parity_profile(r, k)
    return all(3 ** profile.odd_counts[j - 1] > (1 << j) for j in range(1, k + 1))


def _min_odd_counts(k: int) -> np.ndarray:
    # thresholds[j] = least o with 3^o > 2^j, j = 1..k
    out = np.empty(k + 1, dtype=np.int64)
    out[0] = 0
    o, p3 = 0, 1
    for j in range(1, k + 1):
        while p3 <= (1 << j):
            p3 *= 3
            o += 1
        out[j] = o
    return out


def enumerate_persistent(k: int) -> np.ndarray:
    """All k-persistent residues mod 2^k, ascending, as an int64 array.

    Level-by-level sieve: classes mod 2^j that already fail the
    coefficient test are never extended, so memory stays proportional to
    the survivors.
    """
    if not 1 <= k <= MAX_PERSISTENT_K:
        raise ValueError(f"k must be in [1, {MAX_PERSISTENT_K}], got {k}")
    need = _min_odd_counts(k)
    pow3 = 3 ** np.arange(k + 2, dtype=np.int64)
    # survivors at level j: residues mod 2^j, their iterate T^(j)(r), and o_j
    res = np.zeros(1, dtype=np.int64)
    val = np.zeros(1, dtype=np.int64)
    odd = np.zeros(1, dtype=np.int64)
    for j in range(1, k + 1):
        half = np.int64(1 << (j - 1))
        # lift each class r mod 2^(j-1) to r and r + 2^(j-1); the iterate of
        # the lifted class after j-1 steps is 3^o * b + old value (b = 0, 1)
        res = np.concatenate((res, res + half))
        w = np.concatenate((val, pow3[odd] + val))
        odd = np.concatenate((odd, odd))
        p = w & 1
        val = np.where(p == 1, (3 * w + 1) >> 1, w >> 1)
        odd = odd + p
        keep = odd >= need[j]
        res, val, odd = res[keep], val[keep], odd[keep]
    res.sort()
    return res


def count_persistent(k: int) -> int:
    """Number of k-persistent classes mod 2^k."""
    return int(enumerate_persistent(k).size)


def persistent_mask(k: int) -> np.ndarray:
    """Boolean membership table of size 2^k for k-persistent residues."""
    mask = np.zeros(1 << k, dtype=bool)
    mask[enumerate_persistent(k)] = True
    return mask


def write_persistent(k: int, path) -> int:
    """Write the ascending residues one per line; returns the count."""
    residues = enumerate_persistent(k)
    with open(path, "w") as fh:
        for r in residues:
            fh.write(f"{int(r)}\n")
    return int(residues.size)


# --- Syracuse valuation vectors -------------------------------------------


def syracuse_valuations(x: int, m: int) -> tuple[int, ...]:
    """(k_1, ..., k_m): the 2-adic valuations of m Syracuse steps from x.

    Requires odd x not divisible by 3 (the class x = +-1 mod 6).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if x < 1 or not x & 1 or x % 3 == 0:
        raise ValueError(f"x must be odd, positive and not divisible by 3, got {x}")
    ks = []
    for _ in range(m):
        x, nu = step_syr(x)
        ks.append(nu)
    return tuple(ks)


@dataclass(frozen=True)
class ValuationClass:
    """One congruence class x = residue (mod modulus), modulus = 6*2^S."""

    residue: int
    modulus: int

    def __contains__(self, x: int) -> bool:
        return x % self.modulus == self.residue


def two_adic_class(ks: tuple[int, ...] | list[int]) -> tuple[int, int]:
    """(a, 2^(S+1)): odd x realises valuations ks iff x = a mod 2^(S+1).

    Solved by composing the affine steps x_i = (3 x_{i-1} + 1) / 2^{k_i}
    into x_i = (3^i x + c_i) / 2^{S_i} and requiring each x_i to be an
    odd integer, which pins one more block of bits per step.
    """
    ks = tuple(int(k) for k in ks)
    if not ks or any(k < 1 for k in ks):
        raise ValueError(f"valuations must all be >= 1, got {ks}")
    c = 0
    s = 0
    a = 1
    mod = 2
    for i, k in enumerate(ks, start=1):
        c = 3 * c + (1 << s) if i > 1 else 1
        s += k
        m_i = 1 << (s + 1)
        # 3^i x + c_i = 2^{S_i} (mod 2^{S_i+1})  <=>  x_i odd with the right k_i
        rhs = ((1 << s) - c) % m_i
        a_i = (pow(3, -i, m_i) * rhs) % m_i
        if a_i % mod != a:
            raise AssertionError("inconsistent 2-adic lift; valuations are not nested")
        a, mod = a_i, m_i
    return a, mod


def valuation_class(ks, start_mod_6: int = 1) -> ValuationClass:
    """The class mod 6*2^S of starts x = start_mod_6 (mod 6) realising ks."""
    if start_mod_6 not in (1, 5):
        raise ValueError(f"start_mod_6 must be 1 or 5, got {start_mod_6}")
    a, mod2 = two_adic_class(ks)
    # CRT with the mod-3 anchor; mod2 is a power of two, so 3 is invertible
    t = start_mod_6 % 3
    r = a + mod2 * ((t - a) * pow(mod2, -1, 3) % 3)
    return ValuationClass(r % (3 * mod2), 3 * mod2)


def valuation_classes(ks) -> tuple[ValuationClass, ValuationClass]:
    """Both classes (anchors 1 and 5 mod 6) whose union is the full fiber."""
    return valuation_class(ks, 1), valuation_class(ks, 5)
