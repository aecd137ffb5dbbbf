"""Block-parity encoding of the committed bit and its combinatorics.

The bit is the XOR of ``N`` block values; each block repeats its value
``k`` times.  Exact counts use Python integers, closed forms use floats
(or mpmath where the result must round to an exact integer).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np

# Python integers do not overflow; this only keeps enumeration tables sane.
MAX_STRING_LENGTH = 4096


@dataclass(frozen=True)
class BlockCode:
    n_blocks: int
    block_len: int

    def __post_init__(self):
        if self.n_blocks < 2 or self.n_blocks % 2:
            raise ValueError("the number of blocks must be a positive even integer")
        if self.block_len < 1:
            raise ValueError("block length must be at least 1")

    @property
    def length(self) -> int:
        return self.n_blocks * self.block_len


@dataclass(frozen=True, eq=False)
class Codeword:
    code: BlockCode
    block_values: np.ndarray

    def __post_init__(self):
        v = np.array(self.block_values, dtype=np.int8)
        if v.shape != (self.code.n_blocks,) or (v & ~1).any():
            raise ValueError("block values must be N bits")
        v.setflags(write=False)
        object.__setattr__(self, "block_values", v)

    @property
    def bits(self) -> np.ndarray:
        """The ``N*k`` transmitted bits, block by block."""
        return np.repeat(self.block_values, self.code.block_len)

    @property
    def parity(self) -> int:
        return int(self.block_values.sum() % 2)


def encode(bit: int, code: BlockCode, seed=None) -> Codeword:
    """Uniformly random block values with XOR equal to ``bit``."""
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    values = rng.integers(0, 2, code.n_blocks, dtype=np.int8)
    values[-1] ^= (int(values.sum()) + bit) % 2
    return Codeword(code, values)


class Decoded(NamedTuple):
    block_values: np.ndarray
    parity: int
    ties: np.ndarray


def decode_majority(noisy_bits, code: BlockCode) -> Decoded:
    """Majority vote per block; exact ties decode to 0 and are flagged."""
    bits = np.asarray(noisy_bits)
    if bits.shape[-1] != code.length:
        raise ValueError(f"expected {code.length} bits, got {bits.shape[-1]}")
    ones = bits.reshape(*bits.shape[:-1], code.n_blocks, code.block_len).sum(axis=-1)
    ties = 2 * ones == code.block_len
    values = (2 * ones > code.block_len).astype(np.int8)
    parity = values.sum(axis=-1) % 2
    if np.ndim(parity) == 0:
        parity = int(parity)
    return Decoded(values, parity, ties)


class ParityCount(NamedTuple):
    exact: int
    trigonometric: int
    approximate: float


def _check_length(n: int, k: int) -> None:
    if n < 1 or k < 1:
        raise ValueError("N and k must be positive")
    if n * k > MAX_STRING_LENGTH:
        raise OverflowError(f"N*k = {n * k} exceeds {MAX_STRING_LENGTH}")


def count_parity_strings(n: int, k: int) -> ParityCount:
    """Half the number of length ``N*k`` strings whose weight is a multiple of k.

    Returns the binomial sum, the trigonometric closed form evaluated in
    high precision and rounded, and the approximation ``2^(Nk) / (2k)``.
    """
    _check_length(n, k)
    L = n * k
    total = sum(math.comb(L, m * k) for m in range(n + 1))
    exact = Fraction(total, 2)
    exact = int(exact) if exact.denominator == 1 else exact
    with mpmath.workdps(L // 3 + 30):
        s = mpmath.fsum(mpmath.cos(l * mpmath.pi / k) ** L * mpmath.cos(l * n * mpmath.pi)
                        for l in range(1, k + 1))
        trig = int(mpmath.nint(mpmath.mpf(2) ** L / (2 * k) * s))
    # the float approximation becomes inf past 2^1023; the integers stay exact
    approx = math.ldexp(1.0, L) / (2 * k) if L < 1024 else math.inf
    return ParityCount(exact, trig, approx)


def brute_force_parity_count(n: int, k: int) -> Fraction:
    """Enumerate all length ``N*k`` strings; feasible for ``N*k <= 24``."""
    L = n * k
    if L > 24:
        raise ValueError("enumeration limited to N*k <= 24")
    weights = np.array([bin(x).count("1") for x in range(2 ** L)])
    return Fraction(int(np.count_nonzero(weights % k == 0)), 2)


def shannon_info(n: int, k: int) -> tuple[float, float]:
    """Bits needed to single out a string of given parity, and that per bit."""
    exact = count_parity_strings(n, k).exact
    info = math.log2(exact)
    return info, info / (n * k)


def early_guess_bound(n: int, k: int) -> float:
    """``1/2 + 2^(-eta N k / 2)``, capped at 1."""
    _, eta = shannon_info(n, k)
    return min(1.0, 0.5 + 2.0 ** (-eta * n * k / 2))


class BlockError(NamedTuple):
    exact: float
    asymptotic: float


def block_error(p: float, k: int) -> BlockError:
    """Probability that majority voting over k bits with flip rate p fails.

    Ties (k even, k/2 flips) count as failures.
    """
    if not 0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 1/2]")
    lo = (k + 1) // 2
    exact = math.fsum(math.comb(k, i) * p ** i * (1 - p) ** (k - i) for i in range(lo, k + 1))
    asym = math.sqrt(2 / (math.pi * k)) * (2 * math.sqrt(p * (1 - p))) ** k
    return BlockError(exact, asym)


class ParityError(NamedTuple):
    closed: float
    direct: float


def parity_error(p_block: float, n: int) -> ParityError:
    """Probability that an odd number of the N blocks are wrong."""
    if not 0 <= p_block <= 1:
        raise ValueError("p_block must lie in [0, 1]")
    closed = 0.5 * (1 - (1 - 2 * p_block) ** n)
    direct = math.fsum(math.comb(n, i) * p_block ** i * (1 - p_block) ** (n - i)
                       for i in range(1, n + 1, 2))
    return ParityError(closed, direct)


def cheat_probability(p_perp: float, k: int) -> float:
    """Chance that k delayed states all avoid the perp outcome."""
    if not 0 <= p_perp <= 1:
        raise ValueError("p_perp must lie in [0, 1]")
    return (1 - p_perp) ** k


def min_distance_between_parities(code: BlockCode) -> int:
    """Exhaustive minimum Hamming distance between codewords of opposite parity."""
    if code.length > 16:
        raise ValueError("exhaustive search limited to N*k <= 16")
    n = code.n_blocks
    vals = (np.arange(2 ** n)[:, None] >> np.arange(n)) & 1
    words = np.repeat(vals, code.block_len, axis=1)
    par = vals.sum(axis=1) % 2
    even, odd = words[par == 0], words[par == 1]
    dist = (even[:, None, :] != odd[None, :, :]).sum(axis=-1)
    return int(dist.min())
