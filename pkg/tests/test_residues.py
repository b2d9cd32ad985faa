import random

import numpy as np
import pytest

from cjump.residues import (
    count_persistent,
    enumerate_persistent,
    is_persistent,
    parity_profile,
    persistent_mask,
    syracuse_valuations,
    two_adic_class,
    valuation_class,
    valuation_classes,
    write_persistent,
)

from oracles import naive_sigma, naive_valuations


def test_parity_profile_examples():
    assert parity_profile(3, 2).odd_counts == (1, 2)
    assert parity_profile(0, 5).odd_counts == (0, 0, 0, 0, 0)
    assert parity_profile(1, 2).odd_counts == (1, 1)


def test_parity_profile_prefix_stability():
    # o_1..o_j only depend on r mod 2^j
    for k in (4, 8, 11):
        for r in range(1 << k):
            full = parity_profile(r, k).odd_counts
            for j in (1, k // 2, k - 1):
                trunc = parity_profile(r % (1 << j), j).odd_counts
                assert full[:j] == trunc, (r, k, j)


def test_parity_profile_counts_monotone():
    for r in range(256):
        counts = parity_profile(r, 8).odd_counts
        assert all(0 <= a <= j for j, a in enumerate(counts, start=1))
        assert all(b - a in (0, 1) for a, b in zip(counts, counts[1:]))


def test_is_persistent_small_classes():
    assert is_persistent(3, 3)
    assert not is_persistent(1, 3)
    persists = {r for r in range(8) if is_persistent(r, 3)}
    assert persists == {3, 7}
    for k in (2, 3, 4, 5):
        for r in range(0, 1 << k, 2):
            assert not is_persistent(r, k)


def test_persistence_against_large_members():
    # persistent classes mod 2^12: large members never drop within 12 steps;
    # non-persistent classes: some large member drops by step 12
    k = 12
    mod = 1 << k
    rng = random.Random(20240811)
    mask = persistent_mask(k)
    for r in range(mod):
        if mask[r]:
            for _ in range(50):
                n = r + mod * rng.randrange(1 << 28, 1 << 29)
                assert naive_sigma(n) > k, (r, n)
        else:
            found = any(
                naive_sigma(r + mod * rng.randrange(1 << 28, 1 << 29)) <= k
                for _ in range(50)
            )
            assert found, r


def test_count_persistent_small_values():
    # brute-force calibration of the class counts for tiny k
    assert count_persistent(1) == 1
    assert count_persistent(2) == 1
    assert count_persistent(3) == 2
    assert count_persistent(4) == 3
    assert [count_persistent(k) for k in range(5, 9)] == [4, 8, 13, 19]


def test_count_persistent_published_calibration():
    assert count_persistent(24) == 286581


def test_enumerate_matches_is_persistent():
    for k in (3, 6, 10):
        listed = set(enumerate_persistent(k).tolist())
        brute = {r for r in range(1 << k) if is_persistent(r, k)}
        assert listed == brute


def test_enumerate_sorted_and_bounded():
    res = enumerate_persistent(14)
    assert np.all(np.diff(res) > 0)
    assert res[0] >= 0 and res[-1] < (1 << 14)
    with pytest.raises(ValueError):
        enumerate_persistent(0)
    with pytest.raises(ValueError):
        enumerate_persistent(27)


def test_write_persistent(tmp_path):
    path = tmp_path / "p8.txt"
    n = write_persistent(8, path)
    lines = path.read_text().splitlines()
    assert len(lines) == n == count_persistent(8)
    vals = [int(s) for s in lines]
    assert vals == sorted(vals)
    assert all(is_persistent(v, 8) for v in vals)


def test_syracuse_valuations_examples():
    assert syracuse_valuations(7, 3) == (1, 1, 2)
    assert syracuse_valuations(1, 1) == (2,)
    assert syracuse_valuations(5, 1) == (4,)
    with pytest.raises(ValueError):
        syracuse_valuations(9, 1)  # divisible by 3
    with pytest.raises(ValueError):
        syracuse_valuations(8, 1)  # even


def test_valuations_match_naive():
    for x in range(1, 4000, 2):
        if x % 3 == 0:
            continue
        assert syracuse_valuations(x, 4) == naive_valuations(x, 4)


def test_two_adic_class_is_exact():
    # every odd member of the class realises the vector, and no outsider does
    for ks in [(1,), (2,), (1, 1, 2), (4,), (2, 3, 1)]:
        a, mod = two_adic_class(ks)
        s = sum(ks)
        assert mod == 1 << (s + 1)
        for x in range(1, 3 * mod, 2):
            realised = naive_valuations(x, len(ks)) == ks
            assert realised == (x % mod == a), (ks, x)


def test_valuation_class_examples():
    cls = valuation_class((2,), start_mod_6=1)
    assert (cls.residue, cls.modulus) == (1, 24)
    c1, c5 = valuation_classes((1, 1, 2))
    assert c1.modulus == c5.modulus == 96
    assert {c1.residue, c5.residue} == {7, 71}
    assert c1.residue % 6 == 1 and c5.residue % 6 == 5


def test_valuation_class_round_trip():
    rng = random.Random(7)
    for _ in range(200):
        x = rng.randrange(1, 10**6) * 2 + 1
        if x % 3 == 0:
            continue
        m = rng.randrange(1, 5)
        ks = syracuse_valuations(x, m)
        cls = valuation_class(ks, start_mod_6=x % 6)
        assert x in cls


def test_valuation_fiber_is_exactly_two_classes():
    # within x = +-1 mod 6 the fiber of a vector is the union of one full
    # class per anchor; brute force over a window of several periods
    for ks in [(1,), (2,), (1, 2), (1, 1, 2), (3, 1)]:
        m = len(ks)
        c1, c5 = valuation_classes(ks)
        lim = 6 * c1.modulus
        fiber = {
            x
            for x in range(1, lim, 2)
            if x % 3 != 0 and naive_valuations(x, m) == ks
        }
        expected = {x for x in range(1, lim) if x in c1 or x in c5}
        assert fiber == expected, ks


def test_valuation_class_rejects_bad_input():
    with pytest.raises(ValueError):
        valuation_class((0,))
    with pytest.raises(ValueError):
        valuation_class((1,), start_mod_6=3)
