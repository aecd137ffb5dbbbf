"""Cheating strategies and how often they go unnoticed.

* Bob measures early, seeing only the front half of every packet.
* Alice delays the k states of one block to postpone her choice.
* Alice announces a flipped block at disclosure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .channel import MixedInput, apply_channel, apply_channel_general, default_d_tau
from .coding import block_error, decode_majority, early_guess_bound
from .measure import Kind, full_access_error, outcome_table, perp_probability
from .protocol import (Alice, ChannelSampler, ProtocolConfig, bit_estimates, bob_povm,
                       honest_tables, run_trial, trial_rngs)
from .siggrid import TauGrid, Window, window_mass
from .states import (PolarizationVector, WavepacketSpec, make_double_hump,
                     make_input_state)


@dataclass(frozen=True)
class EarlyMeasure:
    window: Optional[Window] = None
    decoder: str = "majority"


@dataclass(frozen=True)
class Delay:
    shift: float
    target_blocks: Sequence[int] = (0,)

    def __post_init__(self):
        object.__setattr__(self, "target_blocks", tuple(self.target_blocks))
        if not self.target_blocks:
            raise ValueError("a delay attack needs at least one target block")


@dataclass(frozen=True)
class ParityFlip:
    block: int = 0


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n)


def make_delayed_state(spec: WavepacketSpec, shift: float, grid: TauGrid,
                       d_tau: Optional[float] = None,
                       polarization: PolarizationVector = PolarizationVector.basis(0)
                       ) -> MixedInput:
    """The agreed packet delayed by ``shift`` as a one-term mixture."""
    d_tau = default_d_tau(spec) if d_tau is None else d_tau
    if shift < d_tau:
        raise ValueError(f"delay {shift} is below the detection window {d_tau}")
    a = make_double_hump(spec, grid).shifted(shift)
    if abs(a.norm2() - 1) > spec.delta:
        raise ValueError("grid too short for this delay")
    return MixedInput.pure(a.normalized(), polarization)


def leading_window_mass(mixed: MixedInput, spec: WavepacketSpec, d_tau: float) -> float:
    w = spec.front_window(d_tau)
    return sum(mu * window_mass(a, w) for mu, a, _ in mixed.components)


@dataclass
class AttackStatistics:
    kind: str
    trials: int
    rate: float
    analytic: float
    sigma: float
    rows: list[dict]
    extra: dict

    @property
    def deviation(self) -> float:
        return self.rate - self.analytic

    def within(self, n_sigma: float = 3.0) -> bool:
        return abs(self.deviation) <= n_sigma * self.sigma + 1e-12


def _majority_over_clicks(bits: np.ndarray, clicked: np.ndarray, code, rng) -> np.ndarray:
    """Block values from clicked channels only; blocks without clicks get a coin."""
    ones = (bits * clicked).reshape(code.n_blocks, code.block_len).sum(axis=1)
    n = clicked.reshape(code.n_blocks, code.block_len).sum(axis=1)
    coin = rng.integers(0, 2, code.n_blocks)
    vals = np.where(2 * ones > n, 1, np.where(2 * ones < n, 0, coin))
    return vals.astype(np.int8)


def early_per_bit_error(config: ProtocolConfig, window: Window) -> float:
    """Bit error when only ``window`` is seen and misses are guessed."""
    povm = bob_povm(config)
    grid = config.channel.grid
    err = 0.0
    for b in (0, 1):
        ens = apply_channel(config.channel, make_input_state(b, config.spec, grid))
        table = outcome_table(ens, povm, window)
        right = sum(p for (k, _, r), p in zip(table.categories, table.probs)
                    if k == Kind.MODE and r == b)
        wrong = sum(p for (k, _, r), p in zip(table.categories, table.probs)
                    if k == Kind.MODE and r != b)
        err += 0.5 * (wrong + 0.5 * (1 - right - wrong))
    return err


def majority_parity_success(p: float, n_blocks: int, k: int) -> float:
    """Parity success of per-bit majority decoding with independent bit errors ``p``.

    Ties decode to 0, so they are wrong only for blocks whose value is 1.
    """
    pmf = [math.comb(k, i) * p ** i * (1 - p) ** (k - i) for i in range(k + 1)]
    above = math.fsum(pmf[i] for i in range(k + 1) if 2 * i > k)
    tie = pmf[k // 2] if k % 2 == 0 else 0.0
    q = above + 0.5 * tie
    return 0.5 + 0.5 * (1 - 2 * q) ** n_blocks


def run_early_measurement(config: ProtocolConfig, trials: int, seed: int = 0,
                          attack: EarlyMeasure = EarlyMeasure()) -> AttackStatistics:
    """Bob measures every channel seeing only one half-window and guesses the parity.

    The default window is the front output half ``[-D_tau, D_tau]``.
    """
    window = config.spec.front_window(config.d_tau) if attack.window is None else attack.window
    sampler = ChannelSampler(honest_tables(config, window))
    code = config.code
    rows = []
    wins = 0
    bit_errors = 0
    for t in range(trials):
        rng_a, rng_b = trial_rngs(config, seed, t)
        alice = Alice(config, rng_a)
        sent = alice.commit()
        out = sampler.draw(sent, rng_b)
        est = bit_estimates(out, rng_b)
        n_wrong = int(np.count_nonzero(est != sent))
        bit_errors += n_wrong
        # Bob knows the agreed channel assignment only after disclosure
        in_order = est[alice.permutation]
        if attack.decoder == "majority":
            guess = int(decode_majority(in_order, code).parity)
        elif attack.decoder == "clicks":
            clicked = (out.kind == Kind.MODE)[alice.permutation]
            guess = int(_majority_over_clicks(in_order, clicked, code, rng_b).sum() % 2)
        else:
            raise ValueError(f"unknown decoder {attack.decoder!r}")
        wins += guess == alice.bit
        rows.append({"trial": t, "committed_bit": alice.bit, "guessed_parity": guess,
                     "bit_errors": n_wrong,
                     "detected": 0, "n_perp": out.n_perp})
    per_bit = bit_errors / (trials * code.length)
    p_bit = early_per_bit_error(config, window)
    bound = early_guess_bound(code.n_blocks, code.block_len)
    rate = wins / trials
    sigma = binomial_sigma(0.5, trials)
    predicted = (majority_parity_success(p_bit, code.n_blocks, code.block_len)
                 if attack.decoder == "majority" else float("nan"))
    extra = {"per_bit_error": per_bit, "analytic_per_bit_error": p_bit,
             "per_bit_sigma": binomial_sigma(p_bit, trials * code.length),
             "bound": bound, "predicted_success": predicted,
             "within_bound": rate <= bound + 3 * sigma}
    return AttackStatistics("early", trials, rate, bound, sigma, rows, extra)


def run_delay_attack(config: ProtocolConfig, attack: Delay, trials: int,
                     seed: int = 0) -> AttackStatistics:
    """Alice delays all states of one block; count runs without a perp outcome."""
    if len(attack.target_blocks) != 1:
        raise ValueError("the delay attack targets exactly one block")
    code = config.code
    block = attack.target_blocks[0]
    if not 0 <= block < code.n_blocks:
        raise ValueError("target block out of range")
    grid = config.channel.grid
    tables = dict(honest_tables(config))
    povm = bob_povm(config)
    p_perp = []
    for b in (0, 1):
        mixed = make_delayed_state(config.spec, attack.shift, grid, config.d_tau,
                                   PolarizationVector.basis(b))
        out = apply_channel_general(config.channel, mixed)
        tables[b + 2] = outcome_table(out, povm, None, config.channel)
        p_perp.append(perp_probability(out, config.channel))
    sampler = ChannelSampler(tables)
    target = np.arange(block * code.block_len, (block + 1) * code.block_len)
    rows = []
    undetected = 0
    for t in range(trials):
        rng_a, rng_b = trial_rngs(config, seed, t)
        alice = Alice(config, rng_a)
        sent = alice.commit()
        keys = sent.astype(np.int64)
        keys[alice.permutation[target]] += 2
        out = sampler.draw(keys, rng_b)
        detected = out.n_perp > 0
        undetected += not detected
        rows.append({"trial": t, "committed_bit": alice.bit, "guessed_parity": -1,
                     "bit_errors": -1, "detected": int(detected), "n_perp": out.n_perp})
    # both polarizations see the same profiles, so p_perp does not depend on the bit
    pp = float(np.mean(p_perp))
    analytic = (1 - pp) ** code.block_len
    rate = undetected / trials
    return AttackStatistics("delay", trials, rate, analytic,
                            binomial_sigma(analytic, trials), rows,
                            {"p_perp": pp, "shift": attack.shift})


def run_parity_flip(config: ProtocolConfig, attack: ParityFlip, trials: int,
                    seed: int = 0) -> AttackStatistics:
    """Alice announces one block flipped; Bob's check of that block is the detection.

    ``rate`` is the fraction of trials where the flipped block disagrees
    with Bob's majority vote; ``abort_rate`` counts any failed check.
    """
    code = config.code
    if not 0 <= attack.block < code.n_blocks:
        raise ValueError("flipped block out of range")
    sampler = ChannelSampler(honest_tables(config))
    rows = []
    detected = aborted = 0
    for t in range(trials):
        tr, rep = run_trial(config, sampler, seed, t, flip_block=attack.block)
        hit = int(rep.block_values[attack.block] != tr.announcement.block_values[attack.block])
        detected += hit
        aborted += not rep.accepted
        rows.append({"trial": t, "committed_bit": tr.committed_bit,
                     "guessed_parity": rep.recovered_bit, "bit_errors": -1,
                     "detected": hit, "n_perp": tr.outcomes.n_perp})
    p = full_access_error(config.channel, config.gamma_variant)
    analytic = 1 - block_error(min(max(p, 0.0), 0.5), code.block_len).exact
    return AttackStatistics("flip", trials, detected / trials, analytic,
                            binomial_sigma(analytic, trials), rows,
                            {"abort_rate": aborted / trials, "per_bit_error": p})
