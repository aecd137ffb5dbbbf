"""Uniform tau-grid numerics.

Amplitudes are complex samples on a uniform grid in the light-cone
coordinate ``tau = t - x`` (c = 1).  All integrals are rectangle sums
``sum(...) * dt``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class GridMismatchError(ValueError):
    """Two amplitudes live on different grids."""


class UndefinedSupportError(ValueError):
    """Support start requested for an amplitude with zero norm."""


@dataclass(frozen=True)
class TauGrid:
    t_min: float
    t_max: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("a grid needs at least two samples")
        if not self.t_max > self.t_min:
            raise ValueError("t_max must exceed t_min")

    @property
    def dt(self) -> float:
        return (self.t_max - self.t_min) / (self.n_samples - 1)

    @property
    def points(self) -> np.ndarray:
        return self.t_min + self.dt * np.arange(self.n_samples)

    @classmethod
    def with_step(cls, t_min: float, t_max: float, dt: float) -> "TauGrid":
        """Grid starting at ``t_min`` with step ``dt`` that reaches at least ``t_max``."""
        n_steps = int(np.ceil((t_max - t_min) / dt - 1e-9))
        return cls(t_min, t_min + n_steps * dt, n_steps + 1)

    def index_of(self, tau: float) -> int:
        """Nearest sample index, clipped to the grid."""
        return int(np.clip(np.rint((tau - self.t_min) / self.dt), 0, self.n_samples - 1))

    def steps(self, shift: float) -> int:
        """Convert a tau shift to a whole number of grid steps."""
        m = shift / self.dt
        if abs(m - np.rint(m)) > 1e-6:
            raise ValueError(f"shift {shift} is not a multiple of dt={self.dt}")
        return int(np.rint(m))


@dataclass(frozen=True, eq=False)
class Amplitude:
    grid: TauGrid
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.shape != (self.grid.n_samples,):
            raise ValueError(
                f"expected {self.grid.n_samples} samples, got shape {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    def norm2(self) -> float:
        return float(np.sum(self.density) * self.grid.dt)

    def normalized(self) -> "Amplitude":
        n2 = self.norm2()
        if n2 == 0:
            raise ValueError("cannot normalize the zero amplitude")
        return Amplitude(self.grid, self.samples / np.sqrt(n2))

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return abs(self.norm2() - 1.0) <= tol

    def shifted(self, shift: float) -> "Amplitude":
        """Delay by ``shift`` (a multiple of dt); samples leaving the grid are dropped."""
        return self.shifted_steps(self.grid.steps(shift))

    def shifted_steps(self, m: int) -> "Amplitude":
        out = np.zeros_like(self.samples)
        n = self.grid.n_samples
        if m >= 0:
            if m < n:
                out[m:] = self.samples[:n - m]
        else:
            if -m < n:
                out[:n + m] = self.samples[-m:]
        return Amplitude(self.grid, out)

    def __add__(self, other: "Amplitude") -> "Amplitude":
        _check_grids(self, other)
        return Amplitude(self.grid, self.samples + other.samples)

    def __sub__(self, other: "Amplitude") -> "Amplitude":
        _check_grids(self, other)
        return Amplitude(self.grid, self.samples - other.samples)

    def __mul__(self, c: complex) -> "Amplitude":
        return Amplitude(self.grid, self.samples * c)

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, grid: TauGrid) -> "Amplitude":
        return cls(grid, np.zeros(grid.n_samples, dtype=complex))


@dataclass(frozen=True)
class Window:
    """Sorted, disjoint union of closed tau intervals.

    Endpoints snap to the nearest grid sample; on the grid an interval
    ``[lo, hi]`` selects indices ``round(lo) <= j < round(hi)`` so that a
    window and its complement partition the samples exactly.
    """

    intervals: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        ivs = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in ivs:
            if not lo < hi:
                raise ValueError(f"empty or reversed interval [{lo}, {hi}]")
        for (_, hi0), (lo1, _) in zip(ivs, ivs[1:]):
            if not hi0 <= lo1:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def full(cls) -> "Window":
        return cls(((-np.inf, np.inf),))

    @classmethod
    def empty(cls) -> "Window":
        return cls(())

    @classmethod
    def of(cls, *intervals: Sequence[float]) -> "Window":
        return cls(tuple(sorted((lo, hi) for lo, hi in intervals)))

    def complement(self) -> "Window":
        edges = [-np.inf]
        for lo, hi in self.intervals:
            edges.extend([lo, hi])
        edges.append(np.inf)
        pairs = [(edges[i], edges[i + 1]) for i in range(0, len(edges), 2)]
        return Window(tuple((lo, hi) for lo, hi in pairs if lo < hi))

    def mask(self, grid: TauGrid) -> np.ndarray:
        m = np.zeros(grid.n_samples, dtype=bool)
        for lo, hi in self.intervals:
            m[_boundary(grid, lo):_boundary(grid, hi)] = True
        return m

    def contains(self, tau) -> np.ndarray:
        """Pointwise membership of tau values (closed intervals, no snapping)."""
        tau = np.asarray(tau, dtype=float)
        inside = np.zeros(tau.shape, dtype=bool)
        for lo, hi in self.intervals:
            inside |= (tau >= lo) & (tau <= hi)
        return inside


def _boundary(grid: TauGrid, x: float) -> int:
    if x == -np.inf:
        return 0
    if x == np.inf:
        return grid.n_samples
    return int(np.clip(np.rint((x - grid.t_min) / grid.dt), 0, grid.n_samples))


def _check_grids(a: Amplitude, b: Amplitude) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"{a.grid} != {b.grid}")


def inner_product(a: Amplitude, b: Amplitude) -> complex:
    """Return ``sum(a * conj(b)) * dt``."""
    _check_grids(a, b)
    return complex(np.vdot(b.samples, a.samples) * a.grid.dt)


def window_mass(a: Amplitude, w: Window) -> float:
    """Integral of ``|a|^2`` over the window."""
    return float(np.sum(a.density[w.mask(a.grid)]) * a.grid.dt)


def support_start(a: Amplitude, eps: float) -> float:
    """Smallest grid tau at which the cumulative mass fraction reaches ``eps``.

    The cumulative mass is taken relative to the amplitude's own squared
    norm, so sub-normalized amplitudes are handled consistently.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    cum = np.cumsum(a.density)
    total = cum[-1]
    if total <= 0:
        raise UndefinedSupportError("zero amplitude has no support")
    j = int(np.searchsorted(cum, eps * total, side="left"))
    return float(a.grid.points[min(j, a.grid.n_samples - 1)])
