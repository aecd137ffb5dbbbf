"""Measurements on channel outputs.

Covers windowed measurements, the optimal two-outcome polarization POVM
built from the discrimination operator Gamma, the orthogonal-complement
("perp") statistics that expose delayed inputs, and a seeded sampler.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .channel import ChannelModel, OutputComponent, OutputEnsemble
from .siggrid import Amplitude, Window, inner_product, window_mass
from .states import PolarizationVector

HERMITIAN_TOL = 1e-12
ZERO_GAMMA_TOL = 1e-14


class ProbabilityError(RuntimeError):
    """Outcome probabilities add up to more than one."""


@dataclass(frozen=True, eq=False)
class GammaOperator:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("Gamma is a 2x2 matrix")
        if np.abs(m - m.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("Gamma must be Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_entries(cls, g00: float, g01: complex, g11: float) -> "GammaOperator":
        return cls(np.array([[g00, g01], [np.conj(g01), g11]], dtype=complex))

    @property
    def g00(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def g11(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def g01(self) -> complex:
        return complex(self.matrix[0, 1])

    @property
    def g10(self) -> complex:
        return complex(self.matrix[1, 0])


@dataclass(frozen=True, eq=False)
class PolarizationPOVM:
    E0: np.ndarray
    E1: np.ndarray

    def __post_init__(self):
        for E in (self.E0, self.E1):
            if np.abs(E - E.conj().T).max() > HERMITIAN_TOL:
                raise ValueError("POVM elements must be Hermitian")
            if np.linalg.eigvalsh(E).min() < -1e-12:
                raise ValueError("POVM elements must be positive semidefinite")
        if np.abs(self.E0 + self.E1 - np.eye(2)).max() > 1e-12:
            raise ValueError("POVM elements must sum to the identity")

    @classmethod
    def projective(cls, v) -> "PolarizationPOVM":
        """``E0 = |v><v|`` and its complement."""
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        P = np.outer(v, v.conj())
        return cls(P, np.eye(2) - P)

    @classmethod
    def computational(cls) -> "PolarizationPOVM":
        return cls.projective([1, 0])

    def element(self, r: int) -> np.ndarray:
        return self.E0 if r == 0 else self.E1

    def prob(self, pol: PolarizationVector, r: int) -> float:
        v = pol.as_array()
        return float(np.real(np.vdot(v, self.element(r) @ v)))


class Kind(enum.IntEnum):
    MODE = 0
    PERP = 1
    NOCLICK = 2


@dataclass(frozen=True)
class Outcome:
    kind: Kind
    mode: Optional[int] = None
    result: Optional[int] = None
    time_tag: Optional[float] = None

    def __post_init__(self):
        if self.kind == Kind.MODE:
            if self.mode is None or self.result not in (0, 1):
                raise ValueError("mode outcomes need a mode index and a 0/1 result")
        elif self.result is not None or self.mode is not None:
            raise ValueError(f"{self.kind.name} outcomes carry no polarization")


def restricted_error(a: Amplitude, w: Window) -> float:
    """Error of the best guess when only ``w`` is observable.

    Inside the window the two orthogonal polarizations are told apart
    without error; outside, the guess is right half the time.
    """
    return 0.5 * window_mass(a, w.complement())


def windowed_detection_prob(ens: OutputEnsemble, w: Window) -> float:
    return float(sum(c.weight * window_mass(c.amplitude, w) for c in ens.components))


def polarization_outputs(model: ChannelModel, bit: int) -> np.ndarray:
    """Subnormalized polarization state ``sum_i lam_i |e_{i,b}><e_{i,b}|``."""
    rho = np.zeros((2, 2), dtype=complex)
    for m in model.modes:
        rho += m.weight * m.pol_out(bit).projector()
    return rho


def gamma_operator(model: ChannelModel, variant: str = "helstrom") -> GammaOperator:
    """Discrimination operator for the two honest outputs.

    ``helstrom`` (default) is ``(rho_pol(1) - rho_pol(0)) / 2``.
    ``antisymmetric`` keeps the same diagonal but uses the off-diagonal
    ``(1/2) sum lam (alpha_1 conj(beta_0) - alpha_0 conj(beta_1))``, which
    does not give zero error on the ideal channel.
    """
    if variant == "helstrom":
        return GammaOperator(0.5 * (polarization_outputs(model, 1)
                                    - polarization_outputs(model, 0)))
    if variant == "antisymmetric":
        g00 = g11 = 0.0
        g01 = 0j
        for m in model.modes:
            a0, b0 = m.pol_out_0.alpha, m.pol_out_0.beta
            a1, b1 = m.pol_out_1.alpha, m.pol_out_1.beta
            g00 += 0.5 * m.weight * (abs(a1) ** 2 - abs(a0) ** 2)
            g11 += 0.5 * m.weight * (abs(b1) ** 2 - abs(b0) ** 2)
            g01 += 0.5 * m.weight * (a1 * np.conj(b0) - a0 * np.conj(b1))
        return GammaOperator.from_entries(g00, g01, g11)
    raise ValueError(f"unknown Gamma variant {variant!r}")


def gamma2(g: GammaOperator) -> float:
    """Smaller eigenvalue of Gamma in closed form."""
    g00, g11 = g.g00, g.g11
    return 0.5 * (g00 + g11) - 0.5 * np.sqrt((g00 - g11) ** 2 + 4 * abs(g.g01) ** 2)


def optimal_povm(g: GammaOperator) -> PolarizationPOVM:
    """Project onto the negative eigenvector of Gamma for outcome 0.

    A zero Gamma leaves every measurement equally good; the computational
    basis is returned in that case.
    """
    if np.abs(g.matrix).max() < ZERO_GAMMA_TOL:
        return PolarizationPOVM.computational()
    _, vecs = np.linalg.eigh(g.matrix)
    return PolarizationPOVM.projective(vecs[:, 0])


def full_access_error(model: ChannelModel, variant: str = "helstrom") -> float:
    return 0.5 - abs(gamma2(gamma_operator(model, variant)))


def povm_error(model: ChannelModel, povm: PolarizationPOVM) -> float:
    """Average error of deciding the bit with ``povm`` on full-access outputs.

    Absorbed photons are guessed; otherwise outcome r is read as bit r.
    Evaluated directly from the output states, without Gamma.
    """
    absorbed = 1.0 - sum(m.weight for m in model.modes)
    wrong0 = np.real(np.trace(polarization_outputs(model, 0) @ povm.E1))
    wrong1 = np.real(np.trace(polarization_outputs(model, 1) @ povm.E0))
    return float(0.5 * absorbed + 0.5 * wrong0 + 0.5 * wrong1)


def _as_components(out) -> list[OutputComponent]:
    if isinstance(out, OutputEnsemble):
        return list(out.components)
    return list(out)


def mode_overlaps(out, model: ChannelModel) -> np.ndarray:
    """``|<eta_k|u_i>|^2`` for every output component k and mode i."""
    comps = _as_components(out)
    return np.array([[abs(inner_product(m.profile, c.amplitude)) ** 2
                      for m in model.modes] for c in comps]).reshape(len(comps), len(model.modes))


def perp_probability(out, model: ChannelModel) -> float:
    """Probability of landing outside every honest output mode."""
    comps = _as_components(out)
    if not comps:
        return 0.0
    ov = mode_overlaps(comps, model)
    weights = np.array([c.weight for c in comps])
    return float(np.sum(weights * (1.0 - ov.sum(axis=1))))


@dataclass
class OverlapReport:
    max_overlap: float
    bound: float
    passed: bool
    delayed: bool


def overlap_bound_check(out, model: ChannelModel, delta: float = 1e-3) -> OverlapReport:
    """Largest squared overlap of any output component with any mode profile.

    A delayed output must not reach more than half of any profile.  An
    overlap of 1 means the input was not delayed at all; that is flagged.
    """
    ov = mode_overlaps(out, model)
    worst = float(ov.max()) if ov.size else 0.0
    bound = 0.5 + delta
    delayed = worst < 1 - 1e-9
    return OverlapReport(worst, bound, delayed and worst <= bound, delayed)


@dataclass(frozen=True, eq=False)
class OutcomeTable:
    """Categorical outcome distribution with per-category time-tag CDFs.

    Categories are ``(MODE, i, r)`` for every mode and result, then PERP,
    then NOCLICK (which takes the remaining probability).
    """

    categories: tuple[tuple[Kind, Optional[int], Optional[int]], ...]
    probs: np.ndarray
    time_cdfs: np.ndarray
    tau: np.ndarray

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.probs)

    def prob_of(self, kind: Kind) -> float:
        return float(sum(p for (k, _, _), p in zip(self.categories, self.probs) if k == kind))

    def draw(self, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Return category indices and time tags (NaN for NOCLICK)."""
        cum = self.cumulative
        cat = np.searchsorted(cum, rng.random(size) * cum[-1], side="right")
        cat = np.minimum(cat, len(self.probs) - 1)
        u = rng.random(size)
        tags = np.full(size, np.nan)
        for c in np.flatnonzero(np.bincount(cat, minlength=len(self.probs))):
            cdf = self.time_cdfs[c]
            if cdf[-1] <= 0:
                continue
            sel = cat == c
            j = np.searchsorted(cdf, u[sel] * cdf[-1], side="right")
            tags[sel] = self.tau[np.minimum(j, len(self.tau) - 1)]
        return cat, tags

    def outcome(self, cat: int, tag: float) -> Outcome:
        kind, mode, r = self.categories[cat]
        return Outcome(kind, mode, r, None if np.isnan(tag) else float(tag))


def outcome_table(out, povm: PolarizationPOVM, window: Optional[Window] = None,
                  model: Optional[ChannelModel] = None) -> OutcomeTable:
    """Build the outcome distribution for one channel use.

    ``out`` is either an honest ``OutputEnsemble`` (modes are exact, no
    perp outcomes) or a list of ``OutputComponent`` from
    ``apply_channel_general``, which needs ``model`` to project onto the
    honest mode profiles.
    """
    window = Window.full() if window is None else window
    if isinstance(out, OutputEnsemble):
        profiles = [c.amplitude for c in out.components]
        grid = profiles[0].grid if profiles else None
    else:
        if model is None:
            raise ValueError("general outputs need the channel model")
        profiles = [m.profile for m in model.modes]
        grid = model.grid
    comps = _as_components(out)
    if grid is None:
        return OutcomeTable(((Kind.PERP, None, None), (Kind.NOCLICK, None, None)),
                            np.array([0.0, 1.0]), np.zeros((2, 1)), np.zeros(1))
    mask = window.mask(grid)
    n_modes = len(profiles)
    categories = [(Kind.MODE, i, r) for i in range(n_modes) for r in (0, 1)]
    categories += [(Kind.PERP, None, None), (Kind.NOCLICK, None, None)]
    probs = np.zeros(len(categories))
    dens = np.zeros((len(categories), grid.n_samples))
    dt = grid.dt
    mode_dens = [np.where(mask, u.density, 0.0) for u in profiles]
    mode_mass = [float(d.sum() * dt) for d in mode_dens]

    if isinstance(out, OutputEnsemble):
        for i, c in enumerate(comps):
            for r in (0, 1):
                probs[2 * i + r] = c.weight * povm.prob(c.polarization, r) * mode_mass[i]
    else:
        perp_density = np.zeros(grid.n_samples)
        for c in comps:
            eta = c.amplitude.samples
            resid = eta.copy()
            for i, u in enumerate(profiles):
                amp = inner_product(c.amplitude, u)  # <u_i|eta>
                resid = resid - amp * u.samples
                w_mode = c.weight * abs(amp) ** 2 * mode_mass[i]
                for r in (0, 1):
                    probs[2 * i + r] += w_mode * povm.prob(c.polarization, r)
            perp_density += c.weight * np.where(mask, np.abs(resid) ** 2, 0.0)
        probs[-2] = float(perp_density.sum() * dt)
        dens[-2] = perp_density
    for i in range(n_modes):
        dens[2 * i] = dens[2 * i + 1] = mode_dens[i]

    total = probs[:-1].sum()
    if total > 1 + 1e-9:
        raise ProbabilityError(f"outcome probabilities sum to {total}")
    probs[-1] = max(0.0, 1.0 - total)
    cdfs = np.cumsum(dens, axis=1)
    return OutcomeTable(tuple(categories), probs, cdfs, grid.points)


def sample_outcome(out, povm: PolarizationPOVM, window: Optional[Window] = None,
                   seed=0, model: Optional[ChannelModel] = None) -> Outcome:
    """Draw a single outcome; deterministic in ``seed``."""
    table = outcome_table(out, povm, window, model)
    cat, tags = table.draw(np.random.default_rng(seed), 1)
    return table.outcome(int(cat[0]), float(tags[0]))
