"""Input photon states: a double-hump amplitude times one of two polarizations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .siggrid import Amplitude, TauGrid, Window, window_mass


class TruncationError(ValueError):
    """The grid cuts off more of a hump than the tail budget allows."""


@dataclass(frozen=True)
class WavepacketSpec:
    """Shape parameters of the double-hump packet.

    Parameters
    ----------
    sigma : float
        Width of each hump (standard deviation of ``|f|^2``).
    tau0 : float
        Separation between the two humps.
    delta_tau : float
        Half-width of the localization window around each hump.
    delta : float
        Tail-mass budget: each half may miss at most this much of its 1/2.
    """

    sigma: float = 1.0
    tau0: float = 20.0
    delta_tau: float = 5.0
    delta: float = 1e-6

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.delta_tau <= self.tau0 / 4:
            raise ValueError("delta_tau must be at most tau0/4")
        if not self.sigma < self.delta_tau:
            raise ValueError("sigma must be smaller than delta_tau")
        if not 0 < self.delta <= 1e-3:
            raise ValueError("delta must lie in (0, 1e-3]")

    def front_window(self, half_width: Optional[float] = None) -> Window:
        h = self.delta_tau if half_width is None else half_width
        return Window.of((-h, h))

    def back_window(self, half_width: Optional[float] = None) -> Window:
        h = self.delta_tau if half_width is None else half_width
        return Window.of((self.tau0 - h, self.tau0 + h))

    def both_windows(self, half_width: Optional[float] = None) -> Window:
        h = self.delta_tau if half_width is None else half_width
        return Window.of((-h, h), (self.tau0 - h, self.tau0 + h))


@dataclass(frozen=True)
class PolarizationVector:
    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-12:
            raise ValueError(f"polarization ({a}, {b}) is not unit norm")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def basis(cls, bit: int) -> "PolarizationVector":
        return cls(1.0, 0.0) if bit == 0 else cls(0.0, 1.0)

    @classmethod
    def from_array(cls, v) -> "PolarizationVector":
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        return cls(v[0], v[1])

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    def projector(self) -> np.ndarray:
        v = self.as_array()
        return np.outer(v, v.conj())

    def inner(self, other: "PolarizationVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.as_array(), other.as_array()))

    def rotated(self, theta: float) -> "PolarizationVector":
        c, s = np.cos(theta), np.sin(theta)
        return PolarizationVector(c * self.alpha - s * self.beta,
                                  s * self.alpha + c * self.beta)


E0 = PolarizationVector.basis(0)
E1 = PolarizationVector.basis(1)


@dataclass(frozen=True)
class PhotonState:
    amplitude: Amplitude
    polarization: PolarizationVector
    bit_label: Optional[int] = None

    def __post_init__(self):
        if not self.amplitude.is_normalized(1e-9):
            raise ValueError("photon amplitude must be normalized")
        if self.bit_label is not None:
            if self.polarization != PolarizationVector.basis(self.bit_label):
                raise ValueError("bit label does not match polarization")


def default_grid(spec: WavepacketSpec, max_delay: float = 0.0,
                 samples_per_sigma: int = 64) -> TauGrid:
    """Grid over ``[-8 sigma, tau0 + 8 sigma + max_delay]``.

    ``max_delay`` leaves room for delayed copies of the packet.
    """
    dt = spec.sigma / samples_per_sigma
    lo = -8 * spec.sigma
    return TauGrid.with_step(lo, spec.tau0 + 8 * spec.sigma + max_delay, dt)


def make_hump(sigma: float, center: float, grid: TauGrid) -> Amplitude:
    """Real Gaussian-modulus hump: ``|f|^2`` is N(center, sigma^2)."""
    if grid.t_min > center - 6 * sigma or grid.t_max < center + 6 * sigma:
        raise TruncationError(
            f"grid [{grid.t_min}, {grid.t_max}] does not cover "
            f"center {center} +/- 6 sigma")
    x = (grid.points - center) / sigma
    f = np.exp(-x ** 2 / 4) / (2 * np.pi * sigma ** 2) ** 0.25
    return Amplitude(grid, f).normalized()


def make_double_hump(spec: WavepacketSpec, grid: TauGrid) -> Amplitude:
    """``F = (f(tau) + f(tau - tau0)) / sqrt(2)`` with Gaussian humps."""
    f = make_hump(spec.sigma, 0.0, grid)
    g = make_hump(spec.sigma, spec.tau0, grid)
    F = ((f + g) * (1 / np.sqrt(2))).normalized()
    achieved = achieved_delta(F, spec)
    if achieved > spec.delta:
        raise ValueError(
            f"half-window deficit {achieved:.3g} exceeds budget {spec.delta:.3g}")
    return F


def achieved_delta(F: Amplitude, spec: WavepacketSpec,
                   half_width: Optional[float] = None) -> float:
    """Largest deficit ``1/2 - mass`` over the two half-windows."""
    front = window_mass(F, spec.front_window(half_width))
    back = window_mass(F, spec.back_window(half_width))
    return max(0.5 - front, 0.5 - back, 0.0)


def make_input_state(bit: int, spec: WavepacketSpec, grid: TauGrid) -> PhotonState:
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return PhotonState(make_double_hump(spec, grid), PolarizationVector.basis(bit), bit)
