import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relbc.coding import (MAX_STRING_LENGTH, BlockCode, Codeword, block_error,
                          brute_force_parity_count, cheat_probability,
                          count_parity_strings, decode_majority, early_guess_bound,
                          encode, min_distance_between_parities, parity_error,
                          shannon_info)


def residue_count(n: int, k: int) -> int:
    """Strings of length N*k with weight divisible by k, by DP over weight mod k."""
    counts = [1] + [0] * (k - 1)
    for _ in range(n * k):
        counts = [counts[r] + counts[(r - 1) % k] for r in range(k)]
    return counts[0]


def test_block_code_validation():
    assert BlockCode(4, 3).length == 12
    for n, k in ((3, 2), (0, 1), (2, 0)):
        with pytest.raises(ValueError):
            BlockCode(n, k)


def test_encode_examples():
    code = BlockCode(2, 3)
    for seed in range(10):
        bits = encode(0, code, seed).bits
        assert bits.tolist() in ([0] * 6, [1] * 6)
    seen = {tuple(encode(1, BlockCode(2, 1), s).bits) for s in range(20)}
    assert seen == {(0, 1), (1, 0)}


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 1), st.integers(1, 6).map(lambda h: 2 * h), st.integers(1, 9),
       st.integers(0, 2 ** 32))
def test_encode_round_trip(bit, n, k, seed):
    code = BlockCode(n, k)
    cw = encode(bit, code, seed)
    assert cw.parity == bit
    dec = decode_majority(cw.bits, code)
    assert dec.parity == bit and not dec.ties.any()
    np.testing.assert_array_equal(dec.block_values, cw.block_values)


def test_encode_is_uniform_over_valid_words():
    code = BlockCode(4, 1)
    rng = np.random.default_rng(0)
    words = [tuple(encode(0, code, rng).block_values) for _ in range(8000)]
    uniq, counts = np.unique(words, axis=0, return_counts=True)
    assert len(uniq) == 8 and all(sum(w) % 2 == 0 for w in uniq)
    assert counts.min() > 850 and counts.max() < 1150


def test_codeword_rejects_non_bits():
    with pytest.raises(ValueError):
        Codeword(BlockCode(2, 1), [0, 2])
    with pytest.raises(ValueError):
        encode(2, BlockCode(2, 1), 0)


def test_decode_examples():
    dec = decode_majority([1, 0, 1, 0, 0, 0], BlockCode(2, 3))
    assert dec.block_values.tolist() == [1, 0] and dec.parity == 1
    dec = decode_majority([1, 1, 0, 0, 1, 1, 1, 1], BlockCode(2, 4))
    assert dec.block_values.tolist() == [0, 1] and dec.ties.tolist() == [True, False]
    with pytest.raises(ValueError):
        decode_majority([0, 1, 1], BlockCode(2, 2))


def test_decode_batches():
    code = BlockCode(2, 3)
    batch = np.array([[1, 1, 0, 0, 0, 0], [0, 0, 0, 1, 1, 1]])
    dec = decode_majority(batch, code)
    assert dec.parity.tolist() == [1, 1]


@pytest.mark.parametrize("n,k,expected", [(2, 1, 2), (2, 2, 4), (4, 2, 64),
                                          (8, 8, 1167449707304206336)])
def test_count_parity_strings(n, k, expected):
    c = count_parity_strings(n, k)
    assert c.exact == c.trigonometric == expected
    assert c.approximate == 2.0 ** (n * k) / (2 * k)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(1, 12))
def test_count_matches_residue_dp(n, k):
    c = count_parity_strings(n, k)
    assert Fraction(residue_count(n, k), 2) == c.exact == c.trigonometric


def test_brute_force_small():
    assert brute_force_parity_count(3, 2) == 16
    with pytest.raises(ValueError):
        brute_force_parity_count(5, 5)


def test_overflow_guard():
    with pytest.raises(OverflowError):
        count_parity_strings(MAX_STRING_LENGTH, 2)
    # the guard is far above lengths used in practice
    assert count_parity_strings(64, 32).exact > 0


def test_shannon_info():
    assert shannon_info(2, 2) == pytest.approx((2.0, 0.5))
    info, eta = shannon_info(8, 8)
    assert info == pytest.approx(60.01806610922597, abs=1e-12)
    assert eta == pytest.approx(0.9377822829566558, abs=1e-14)
    etas = [shannon_info(n, 4)[1] for n in (2, 4, 8, 16, 32, 64)]
    assert all(np.diff(etas) > 0) and etas[-1] > 0.95


def test_early_guess_bound():
    _, eta = shannon_info(4, 4)
    assert early_guess_bound(4, 4) == pytest.approx(0.5 + 2 ** (-eta * 8))
    assert early_guess_bound(4, 4) == pytest.approx(0.5110056363290703, abs=1e-14)
    assert early_guess_bound(2, 1) == 1.0
    assert early_guess_bound(32, 8) - 0.5 < 1e-30


def test_block_error_examples():
    assert block_error(0.0, 5).exact == 0.0
    assert block_error(0.25, 2).exact == pytest.approx(0.4375)
    e = block_error(0.25, 20)
    assert e.exact == pytest.approx(0.01386441694376117, abs=1e-15)
    assert e.asymptotic == pytest.approx(0.010047029965849386, abs=1e-15)
    with pytest.raises(ValueError):
        block_error(0.6, 3)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.5), st.integers(1, 30))
def test_block_error_matches_scipy_tail(p, k):
    from scipy.stats import binom
    assert block_error(p, k).exact == pytest.approx(binom.sf((k + 1) // 2 - 1, k, p), abs=1e-12)


def test_parity_error_examples():
    assert parity_error(0.0, 6) == (0.0, 0.0)
    assert parity_error(0.5, 6).closed == pytest.approx(0.5)
    e = parity_error(0.1, 2)
    assert e.closed == pytest.approx(0.18) and e.direct == pytest.approx(0.18)


@settings(max_examples=60, deadline=None)
@given(st.fractions(0, 1, max_denominator=50), st.integers(1, 12))
def test_parity_identity_over_rationals(p, n):
    """Exact rational check of the odd-term sum against the closed form."""
    direct = sum(math.comb(n, i) * p ** i * (1 - p) ** (n - i) for i in range(1, n + 1, 2))
    assert direct == Fraction(1, 2) * (1 - (1 - 2 * p) ** n)
    assert parity_error(float(p), n).direct == pytest.approx(float(direct), abs=1e-12)


def test_cheat_probability():
    assert cheat_probability(0.0, 7) == 1.0
    assert cheat_probability(1.0, 7) == 0.0
    assert cheat_probability(0.5, 10) == pytest.approx(9.765625e-4)


@pytest.mark.parametrize("n,k", [(2, 1), (2, 3), (4, 2), (4, 4), (2, 8)])
def test_min_distance_is_k(n, k):
    assert min_distance_between_parities(BlockCode(n, k)) == k
