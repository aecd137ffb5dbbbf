"""Commitment, disclosure and verification between the two parties.

Alice (the committer) and Bob (the verifier) are small state machines
advanced by explicit events on a simulated tau timeline.  The channel has
zero length, so every time is a tau value.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channel import (ChannelModel, apply_channel, validate_channel)
from .coding import BlockCode, Codeword, block_error, decode_majority, encode, parity_error
from .measure import (Kind, OutcomeTable, PolarizationPOVM, full_access_error,
                      gamma_operator, optimal_povm, outcome_table)
from .siggrid import Window
from .states import WavepacketSpec, make_input_state


class ProtocolError(RuntimeError):
    """A party received an event that is illegal in its current state."""


class AnnouncementError(ValueError):
    """The disclosure announcement is malformed (distinct from an abort)."""


@dataclass(frozen=True)
class ProtocolConfig:
    code: BlockCode
    spec: WavepacketSpec
    channel: ChannelModel
    d_tau: Optional[float] = None
    seeds: tuple[int, int] = (0, 1)
    permutation_enabled: bool = True
    disclosure_tau: Optional[float] = None
    gamma_variant: str = "helstrom"

    def __post_init__(self):
        if self.d_tau is None:
            object.__setattr__(self, "d_tau", self.channel.d_tau)
        if abs(self.d_tau - self.channel.d_tau) > 1e-12:
            raise ValueError("d_tau disagrees with the channel's output window")
        report = validate_channel(self.channel, self.spec)
        if not report.passed:
            raise ValueError("channel fails validation: " + ", ".join(report.failed()))
        lo, hi = commitment_window(self)
        if self.disclosure_tau is not None and not lo < self.disclosure_tau < hi:
            raise ValueError(f"disclosure time must lie in ({lo}, {hi})")

    @property
    def request_tau(self) -> float:
        return commitment_window(self)[1] if self.disclosure_tau is None else self.disclosure_tau

    @property
    def verify_tau(self) -> float:
        return self.spec.tau0 + self.d_tau

    def output_windows(self) -> Window:
        return self.spec.both_windows(self.d_tau)


def commitment_window(config: ProtocolConfig) -> tuple[float, float]:
    """Interval ``(-delta_tau, delta_tau + tau0)`` in which disclosure may be demanded."""
    s = config.spec
    return (-s.delta_tau, s.delta_tau + s.tau0)


@dataclass(frozen=True, eq=False)
class Outcomes:
    """Per-channel outcomes as parallel arrays (channel order)."""

    kind: np.ndarray
    mode: np.ndarray
    result: np.ndarray
    time_tag: np.ndarray

    def __len__(self) -> int:
        return len(self.kind)

    @property
    def n_perp(self) -> int:
        return int(np.count_nonzero(self.kind == Kind.PERP))

    @property
    def n_noclick(self) -> int:
        return int(np.count_nonzero(self.kind == Kind.NOCLICK))


class ChannelSampler:
    """Draws outcomes for many channel uses from per-input outcome tables."""

    def __init__(self, tables: dict):
        self.tables = tables
        self._cat = {key: _category_arrays(t) for key, t in tables.items()}

    def draw(self, keys: np.ndarray, rng: np.random.Generator) -> Outcomes:
        n = len(keys)
        kind = np.empty(n, dtype=np.int8)
        mode = np.empty(n, dtype=np.int16)
        result = np.empty(n, dtype=np.int8)
        tags = np.empty(n)
        for key in sorted(self.tables):
            idx = np.flatnonzero(keys == key)
            if idx.size == 0:
                continue
            cat, t = self.tables[key].draw(rng, idx.size)
            k, m, r = self._cat[key]
            kind[idx], mode[idx], result[idx], tags[idx] = k[cat], m[cat], r[cat], t
        return Outcomes(kind, mode, result, tags)


def _category_arrays(table: OutcomeTable):
    k = np.array([c[0] for c in table.categories], dtype=np.int8)
    m = np.array([-1 if c[1] is None else c[1] for c in table.categories], dtype=np.int16)
    r = np.array([-1 if c[2] is None else c[2] for c in table.categories], dtype=np.int8)
    return k, m, r


def bob_povm(config: ProtocolConfig) -> PolarizationPOVM:
    return optimal_povm(gamma_operator(config.channel, config.gamma_variant))


def honest_tables(config: ProtocolConfig, window: Optional[Window] = None) -> dict:
    povm = bob_povm(config)
    grid = config.channel.grid
    return {b: outcome_table(apply_channel(config.channel, make_input_state(b, config.spec, grid)),
                             povm, window)
            for b in (0, 1)}


def bit_estimates(outcomes: Outcomes, rng: np.random.Generator) -> np.ndarray:
    """Bob's bit per channel: the POVM result, or a fair coin without one."""
    coin = rng.integers(0, 2, len(outcomes), dtype=np.int8)
    return np.where(outcomes.kind == Kind.MODE, outcomes.result, coin).astype(np.int8)


def trial_rngs(config: ProtocolConfig, seed: int, trial: int):
    """Independent generators for Alice and Bob in one trial."""
    a = np.random.default_rng([config.seeds[0], seed, trial])
    b = np.random.default_rng([config.seeds[1], seed, trial])
    return a, b


@dataclass(frozen=True, eq=False)
class Announcement:
    bit: int
    block_values: np.ndarray
    permutation: np.ndarray


@dataclass(eq=False)
class ProtocolTranscript:
    committed_bit: int
    codeword: Codeword
    outcomes: Outcomes
    announcement: Optional[Announcement] = None
    timing: list = field(default_factory=list)


class AliceState(enum.Enum):
    READY = "ready"
    COMMITTED = "committed"
    DISCLOSED = "disclosed"


class BobState(enum.Enum):
    LISTENING = "listening"
    REQUESTED = "requested"
    ANNOUNCED = "announced"
    DONE = "done"


class Alice:
    def __init__(self, config: ProtocolConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.state = AliceState.READY
        self.bit: Optional[int] = None
        self.codeword: Optional[Codeword] = None
        self.permutation: Optional[np.ndarray] = None

    def commit(self, bit: Optional[int] = None) -> np.ndarray:
        """Encode and return the bits in channel order."""
        if self.state is not AliceState.READY:
            raise ProtocolError(f"cannot commit in state {self.state.value}")
        self.bit = int(self.rng.integers(0, 2)) if bit is None else bit
        self.codeword = encode(self.bit, self.config.code, self.rng)
        n = self.config.code.length
        self.permutation = (self.rng.permutation(n) if self.config.permutation_enabled
                            else np.arange(n))
        sent = np.empty(n, dtype=np.int8)
        sent[self.permutation] = self.codeword.bits
        self.state = AliceState.COMMITTED
        return sent

    def disclose(self, flip_block: Optional[int] = None) -> Announcement:
        if self.state is not AliceState.COMMITTED:
            raise ProtocolError(f"cannot disclose in state {self.state.value}")
        values = self.codeword.block_values.copy()
        bit = self.bit
        if flip_block is not None:
            values[flip_block] ^= 1
            bit ^= 1
        self.state = AliceState.DISCLOSED
        return Announcement(bit, values, self.permutation.copy())


class Bob:
    def __init__(self, config: ProtocolConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng
        self.state = BobState.LISTENING
        self.outcomes: Optional[Outcomes] = None
        self.announcement: Optional[Announcement] = None

    def measure(self, sampler: ChannelSampler, sent: np.ndarray) -> Outcomes:
        if self.state is not BobState.LISTENING:
            raise ProtocolError(f"cannot measure in state {self.state.value}")
        self.outcomes = sampler.draw(sent, self.rng)
        return self.outcomes

    def request(self) -> float:
        if self.state is not BobState.LISTENING or self.outcomes is None:
            raise ProtocolError("disclosure requires a finished measurement")
        self.state = BobState.REQUESTED
        return self.config.request_tau

    def receive(self, announcement: Announcement) -> None:
        if self.state is not BobState.REQUESTED:
            raise ProtocolError("announcement arrived before a request")
        self.announcement = announcement
        self.state = BobState.ANNOUNCED

    def finish(self, transcript: ProtocolTranscript) -> "VerificationReport":
        if self.state is not BobState.ANNOUNCED:
            raise ProtocolError("nothing to verify")
        report = verify(transcript, self.announcement, self.config, self.rng)
        self.state = BobState.DONE
        return report


FAILURE_REASONS = ("perp_outcome", "timing_violation", "block_mismatch", "parity_mismatch")


@dataclass
class VerificationReport:
    accepted: bool
    recovered_bit: int
    reasons: list[str]
    counts: dict[str, int]
    block_values: np.ndarray


def _check_announcement(a: Announcement, code: BlockCode) -> None:
    if a.bit not in (0, 1):
        raise AnnouncementError("announced bit must be 0 or 1")
    vals = np.asarray(a.block_values)
    if vals.shape != (code.n_blocks,) or not np.isin(vals, (0, 1)).all():
        raise AnnouncementError("announced block values must be N bits")
    perm = np.asarray(a.permutation)
    if perm.shape != (code.length,) or not np.array_equal(np.sort(perm), np.arange(code.length)):
        raise AnnouncementError("announced permutation is not a permutation of the channels")


def verify(transcript: ProtocolTranscript, announcement: Announcement,
           config: ProtocolConfig, rng: Optional[np.random.Generator] = None) -> VerificationReport:
    """Bob's checks, in order: perp silence, timing, block agreement, parity.

    All checks run even after a failure so the report lists every reason.
    ``rng`` supplies Bob's coin for channels without a polarization result.
    """
    code = config.code
    _check_announcement(announcement, code)
    out = transcript.outcomes
    if len(out) != code.length:
        raise AnnouncementError("transcript length does not match the code")
    rng = np.random.default_rng(0) if rng is None else rng

    counts = {}
    counts["perp_outcome"] = out.n_perp
    tagged = ~np.isnan(out.time_tag)
    inside = config.output_windows().contains(out.time_tag[tagged])
    counts["timing_violation"] = int(np.count_nonzero(~inside))

    estimates = bit_estimates(out, rng)
    in_string_order = estimates[np.asarray(announcement.permutation)]
    decoded = decode_majority(in_string_order, code)
    counts["block_mismatch"] = int(np.count_nonzero(
        decoded.block_values != np.asarray(announcement.block_values)))
    counts["parity_mismatch"] = int(
        int(np.sum(announcement.block_values)) % 2 != announcement.bit)

    reasons = [r for r in FAILURE_REASONS if counts[r]]
    return VerificationReport(not reasons, int(decoded.parity), reasons, counts,
                              decoded.block_values)


def run_trial(config: ProtocolConfig, sampler: ChannelSampler, seed: int, trial: int,
              flip_block: Optional[int] = None) -> tuple[ProtocolTranscript, VerificationReport]:
    """One complete run of the five protocol steps."""
    rng_a, rng_b = trial_rngs(config, seed, trial)
    alice, bob = Alice(config, rng_a), Bob(config, rng_b)
    s = config.spec
    timing = [(-s.delta_tau, "A", "send")]
    sent = alice.commit()
    bob.measure(sampler, sent)
    t_req = bob.request()
    timing.append((t_req, "B", "request"))
    bob.receive(alice.disclose(flip_block))
    timing.append((t_req, "A", "announce"))
    t_ver = max(t_req, config.verify_tau)
    timing.append((t_ver, "B", "verify"))
    transcript = ProtocolTranscript(alice.bit, alice.codeword, bob.outcomes,
                                    bob.announcement, timing)
    return transcript, bob.finish(transcript)


@dataclass
class RunStatistics:
    trials: int
    acceptance_rate: float
    recovery_rate: float
    empirical_parity_error: float
    analytic_parity_error: float
    analytic_acceptance: float
    per_bit_error: float
    block_error: float
    total_perp: int
    rows: list[dict]

    @property
    def parity_error_sigma(self) -> float:
        p = self.analytic_parity_error
        return float(np.sqrt(p * (1 - p) / self.trials))


def analytic_honest(config: ProtocolConfig) -> tuple[float, float, float, float]:
    """Per-bit error, block error, parity error and acceptance probability."""
    p = full_access_error(config.channel, config.gamma_variant)
    pb = block_error(min(max(p, 0.0), 0.5), config.code.block_len).exact
    return p, pb, parity_error(pb, config.code.n_blocks).closed, (1 - pb) ** config.code.n_blocks


def run_honest(config: ProtocolConfig, trials: int, seed: int = 0,
               keep_transcripts: bool = False):
    """Run honest commitments and collect per-trial rows and aggregates.

    Returns ``(transcripts, statistics)``; transcripts is empty unless
    ``keep_transcripts`` is set.
    """
    sampler = ChannelSampler(honest_tables(config))
    rows, transcripts = [], []
    accepted = recovered = perp = 0
    for t in range(trials):
        tr, rep = run_trial(config, sampler, seed, t)
        if keep_transcripts:
            transcripts.append((tr, rep))
        accepted += rep.accepted
        recovered += rep.recovered_bit == tr.committed_bit
        perp += tr.outcomes.n_perp
        rows.append({"trial": t, "committed_bit": tr.committed_bit,
                     "recovered_bit": rep.recovered_bit, "accepted": int(rep.accepted),
                     "n_perp": tr.outcomes.n_perp, "n_noclick": tr.outcomes.n_noclick})
    p, pb, pe, pacc = analytic_honest(config)
    stats = RunStatistics(trials, accepted / trials, recovered / trials,
                          1 - recovered / trials, pe, pacc, p, pb, perp, rows)
    return transcripts, stats
