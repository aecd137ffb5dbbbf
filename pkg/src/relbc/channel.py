"""The channel instrument in spectral form.

A channel is a list of output modes.  Mode ``i`` occurs with probability
``weight``; the photon leaves with temporal profile ``u_i`` and with
polarization ``pol_out_0`` or ``pol_out_1`` depending on which basis
polarization went in.  ``1 - sum(weights)`` is absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import signal

from .siggrid import Amplitude, TauGrid, inner_product, support_start, window_mass
from .states import (E0, E1, PhotonState, PolarizationVector, WavepacketSpec,
                     make_double_hump)

ORTHO_TOL = 1e-8
CAUSALITY_EPS = (0.01, 0.1, 0.25)


class ChannelValidationError(ValueError):
    pass


class HonestSubspaceError(ValueError):
    """Input amplitude is not the agreed packet; use ``apply_channel_general``."""


@dataclass(frozen=True)
class ChannelMode:
    weight: float
    profile: Amplitude
    pol_out_0: PolarizationVector
    pol_out_1: PolarizationVector

    def __post_init__(self):
        if not 0 < self.weight <= 1:
            raise ChannelValidationError(f"mode weight {self.weight} outside (0, 1]")
        if not self.profile.is_normalized(1e-8):
            raise ChannelValidationError("mode profile is not normalized")

    def pol_out(self, bit: int) -> PolarizationVector:
        return self.pol_out_0 if bit == 0 else self.pol_out_1


@dataclass(frozen=True)
class ChannelModel:
    """Spectral channel description.

    ``reference`` is the agreed honest amplitude F; the channel acts on
    delayed copies of it covariantly and loses everything orthogonal to
    them.
    """

    modes: tuple[ChannelMode, ...]
    d_tau: float
    reference: Amplitude
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if sum(m.weight for m in self.modes) > 1 + 1e-12:
            raise ChannelValidationError("mode weights sum above 1")
        for m in self.modes:
            if m.profile.grid != self.reference.grid:
                raise ChannelValidationError("mode profile on a different grid")

    @property
    def grid(self) -> TauGrid:
        return self.reference.grid

    @property
    def weights(self) -> np.ndarray:
        return np.array([m.weight for m in self.modes])


@dataclass(frozen=True)
class OutputComponent:
    weight: float
    amplitude: Amplitude
    polarization: PolarizationVector


@dataclass(frozen=True)
class OutputEnsemble:
    """Honest channel output: one component per mode, plus absorption."""

    components: tuple[OutputComponent, ...]
    absorption: float
    bit: int

    def __post_init__(self):
        total = sum(c.weight for c in self.components) + self.absorption
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"ensemble probabilities sum to {total}")


@dataclass(frozen=True)
class MixedInput:
    """Input density matrix ``sum_l w_l |mu_l><mu_l|`` with a polarization per term."""

    components: tuple[tuple[float, Amplitude, PolarizationVector], ...]

    def __post_init__(self):
        comps = tuple(self.components)
        if abs(sum(w for w, _, _ in comps) - 1.0) > 1e-9:
            raise ValueError("mixture weights must sum to 1")
        for w, a, _ in comps:
            if w < 0:
                raise ValueError("negative mixture weight")
            if not a.is_normalized(1e-8):
                raise ValueError("mixture amplitudes must be normalized")
        object.__setattr__(self, "components", comps)

    @classmethod
    def pure(cls, amplitude: Amplitude, polarization: PolarizationVector) -> "MixedInput":
        return cls(((1.0, amplitude, polarization),))


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def format(self) -> str:
        lines = []
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            lines.append(f"[{flag}] {c.name}: {c.measured:.6g}  {c.detail}".rstrip())
        return "\n".join(lines)


def validate_channel(model: ChannelModel, spec: WavepacketSpec) -> ValidationReport:
    """Check weights, orthonormality, output localization and causality.

    Failures are reported, never raised.
    """
    report = ValidationReport()
    wsum = float(model.weights.sum()) if model.modes else 0.0
    report.checks.append(CheckResult(
        "weight_sum", wsum <= 1 + 1e-12, wsum, "sum of mode weights <= 1"))

    profiles = [m.profile for m in model.modes]
    gram = np.array([[inner_product(u, v) for v in profiles] for u in profiles])
    if profiles:
        off = np.abs(gram - np.diag(np.diag(gram))).max()
        diag = np.abs(1 - np.diag(gram)).max()
    else:
        off = diag = 0.0
    report.checks.append(CheckResult(
        "orthogonality", off <= ORTHO_TOL, float(off), "max |<u_i|u_j>|, i != j"))
    report.checks.append(CheckResult(
        "normalization", diag <= ORTHO_TOL, float(diag), "max |1 - <u_i|u_i>|"))

    # front and back output windows must stay disjoint
    window_ok = spec.delta_tau < model.d_tau < spec.tau0 / 2
    report.checks.append(CheckResult(
        "window_size", window_ok, model.d_tau,
        f"need delta_tau={spec.delta_tau} < D_tau < tau0/2={spec.tau0 / 2}"))

    worst = 0.0
    for u in profiles:
        front = window_mass(u, spec.front_window(model.d_tau))
        back = window_mass(u, spec.back_window(model.d_tau))
        worst = max(worst, 0.5 - front, 0.5 - back)
    report.checks.append(CheckResult(
        "localization", worst <= spec.delta, float(worst),
        f"max half-window deficit, budget {spec.delta:g}"))

    dt = model.grid.dt
    margin = 0.0
    for eps in CAUSALITY_EPS:
        ref = support_start(model.reference, eps)
        for u in profiles:
            margin = min(margin, support_start(u, eps) - ref)
    report.checks.append(CheckResult(
        "causality", margin >= -dt - 1e-12, margin,
        "min over modes/eps of support_start(u_i) - support_start(F)"))
    return report


def detection_probability(model: ChannelModel) -> float:
    return float(sum(m.weight for m in model.modes))


def apply_channel(model: ChannelModel, state: PhotonState) -> OutputEnsemble:
    if state.bit_label is None:
        raise HonestSubspaceError("honest inputs carry a bit label")
    overlap = abs(inner_product(state.amplitude, model.reference)) ** 2
    if overlap < 1 - 1e-9:
        raise HonestSubspaceError(
            f"input overlaps the agreed packet only by {overlap:.6g}")
    comps = tuple(OutputComponent(m.weight, m.profile, m.pol_out(state.bit_label))
                  for m in model.modes)
    absorption = 1.0 - sum(c.weight for c in comps)
    return OutputEnsemble(comps, absorption, state.bit_label)


def best_shift(model: ChannelModel, a: Amplitude) -> tuple[int, complex]:
    """Grid lag ``m`` maximizing ``|<a | F shifted by m>|``, with that overlap."""
    F = model.reference
    corr = signal.correlate(a.samples, F.samples, mode="full", method="fft")
    m = int(np.argmax(np.abs(corr))) - (F.grid.n_samples - 1)
    return m, inner_product(a, F.shifted_steps(m))


def apply_channel_general(model: ChannelModel, mixed: MixedInput) -> list[OutputComponent]:
    """Channel action on an arbitrary input mixture.

    Each input term is projected onto its best-matching delayed copy of F;
    that part maps to the mode profiles delayed by the same lag, the rest
    is lost.  Polarization is read in the (e0, e1) basis, mode by mode.
    """
    out: list[OutputComponent] = []
    for mu, a, pol in mixed.components:
        m, c = best_shift(model, a)
        honest = mu * abs(c) ** 2
        if honest <= 0:
            continue
        pbit = (abs(pol.alpha) ** 2, abs(pol.beta) ** 2)
        for mode in model.modes:
            u = mode.profile.shifted_steps(m)
            if abs(u.norm2() - 1) > 1e-9:
                raise ValueError(f"grid too short to hold a lag of {m} steps")
            for bit in (0, 1):
                if pbit[bit] > 0:
                    out.append(OutputComponent(
                        honest * mode.weight * pbit[bit], u, mode.pol_out(bit)))
    return out


def _gram_schmidt(amps: Sequence[Amplitude]) -> list[Amplitude]:
    basis: list[Amplitude] = []
    for a in amps:
        v = a
        for b in basis:
            v = v - b * inner_product(v, b)
        if v.norm2() < 1e-12:
            raise ChannelValidationError("profiles are linearly dependent")
        v = v.normalized()
        # second pass keeps the residual overlap at rounding level
        for b in basis:
            v = v - b * inner_product(v, b)
        basis.append(v.normalized())
    return basis


def default_d_tau(spec: WavepacketSpec) -> float:
    return spec.delta_tau + 3 * spec.sigma


CATALOGUE = ("ideal", "rotate", "jitter", "collapse", "absorbing")


def builtin_channel(name: str, spec: WavepacketSpec, grid: TauGrid,
                    d_tau: Optional[float] = None, **params) -> ChannelModel:
    """Construct a catalogue channel and validate it.

    ``ideal``; ``rotate(theta, lam)``; ``jitter(shifts, weights)``;
    ``collapse(lam)``; ``absorbing``.
    """
    F = make_double_hump(spec, grid)
    d_tau = default_d_tau(spec) if d_tau is None else d_tau
    if name == "ideal":
        modes = [ChannelMode(1.0, F, E0, E1)]
    elif name == "rotate":
        theta = float(params.get("theta", 0.0))
        lam = float(params.get("lam", 1.0))
        modes = [ChannelMode(lam, F, E0.rotated(theta), E1.rotated(theta))]
    elif name == "jitter":
        shifts = [float(s) for s in params.get("shifts", (0.0, 2 * spec.sigma))]
        weights = [float(w) for w in params.get("weights", (0.5, 0.5))]
        if len(shifts) != len(weights):
            raise ChannelValidationError("shifts and weights differ in length")
        limit = d_tau - spec.delta_tau
        if any(s < 0 or s > limit for s in shifts):
            raise ChannelValidationError(f"jitter shifts must lie in [0, {limit}]")
        order = np.argsort(shifts, kind="stable")
        profiles = _gram_schmidt([F.shifted(shifts[i]) for i in order])
        modes = [ChannelMode(weights[i], u, E0, E1) for i, u in zip(order, profiles)]
    elif name == "collapse":
        lam = float(params.get("lam", 1.0))
        modes = [ChannelMode(lam, F, E0, E0)]
    elif name == "absorbing":
        modes = []
    else:
        raise ValueError(f"unknown channel {name!r}; choose from {CATALOGUE}")
    label = name if not params else f"{name}({', '.join(f'{k}={v}' for k, v in params.items())})"
    model = ChannelModel(tuple(modes), d_tau, F, label)
    report = validate_channel(model, spec)
    if not report.passed:
        raise ChannelValidationError(
            f"{label} fails validation: {', '.join(report.failed())}")
    return model


def custom_channel(modes: Sequence[dict], spec: WavepacketSpec, grid: TauGrid,
                   d_tau: Optional[float] = None, name: str = "custom") -> ChannelModel:
    """Channel from an explicit mode list.

    Each entry has ``weight`` and optionally ``shift`` (delay of F for the
    profile), ``theta0``/``theta1`` (rotation of the output polarization for
    input e0/e1).  Profiles are used as given, not orthogonalized, so the
    result may fail validation; nothing is raised here for that.
    """
    F = make_double_hump(spec, grid)
    d_tau = default_d_tau(spec) if d_tau is None else d_tau
    built = []
    for entry in modes:
        u = F.shifted(float(entry.get("shift", 0.0)))
        if u.norm2() < 1 - spec.delta:
            raise ChannelValidationError("mode shift pushes the profile off the grid")
        built.append(ChannelMode(
            float(entry["weight"]), u.normalized(),
            E0.rotated(float(entry.get("theta0", 0.0))),
            E1.rotated(float(entry.get("theta1", entry.get("theta0", 0.0))))))
    return ChannelModel(tuple(built), d_tau, F, name)
