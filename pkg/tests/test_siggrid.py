import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relbc.siggrid import (Amplitude, GridMismatchError, TauGrid, UndefinedSupportError,
                           Window, inner_product, support_start, window_mass)
from relbc.states import make_hump

GRID = TauGrid.with_step(-10.0, 30.0, 1 / 32)


def test_grid_step_and_points():
    assert GRID.dt == pytest.approx(1 / 32)
    assert GRID.points[0] == -10.0
    assert GRID.points[-1] == pytest.approx(30.0)
    assert GRID.index_of(0.0) == 320


def test_grid_rejects_degenerate():
    with pytest.raises(ValueError):
        TauGrid(0.0, 1.0, 1)
    with pytest.raises(ValueError):
        TauGrid(1.0, 0.0, 10)


def test_shift_must_be_grid_multiple():
    f = make_hump(1.0, 0.0, GRID)
    with pytest.raises(ValueError):
        f.shifted(0.01)


def test_gaussian_overlap_matches_closed_form():
    # <f_0 | f_s> = exp(-s^2 / (8 sigma^2)) for Gaussian-modulus humps
    f = make_hump(1.0, 0.0, GRID)
    for s in (0.5, 1.0, 2.0, 4.0):
        g = make_hump(1.0, s, GRID)
        assert inner_product(f, g).real == pytest.approx(math.exp(-s ** 2 / 8), abs=1e-12)


def test_inner_product_conjugates_second_argument():
    f = make_hump(1.0, 0.0, GRID)
    assert inner_product(f * 1j, f) == pytest.approx(1j)
    assert inner_product(f, f * 1j) == pytest.approx(-1j)


def test_grid_mismatch():
    other = TauGrid.with_step(-10.0, 30.0, 1 / 16)
    with pytest.raises(GridMismatchError):
        inner_product(make_hump(1.0, 0.0, GRID), make_hump(1.0, 0.0, other))


def test_samples_are_read_only():
    f = make_hump(1.0, 0.0, GRID)
    with pytest.raises(ValueError):
        f.samples[0] = 1.0


def test_window_mass_of_gaussian_half_line():
    f = make_hump(1.0, 0.0, GRID)
    # the boundary sample sits at tau = 0 and belongs to the right half
    left = window_mass(f, Window.of((-math.inf, 0.0)))
    assert left == pytest.approx(0.5 - 0.5 * f.density[GRID.index_of(0.0)] * GRID.dt, abs=1e-12)


def test_full_and_empty_windows():
    f = make_hump(1.0, 5.0, GRID)
    assert window_mass(f, Window.full()) == pytest.approx(1.0)
    assert window_mass(f, Window.empty()) == 0.0
    assert Window.full().complement().mask(GRID).sum() == 0


def test_support_start():
    f = make_hump(1.0, 3.0, GRID)
    # eps = 0.5 is the median of N(3, 1)
    assert support_start(f, 0.5) == pytest.approx(3.0, abs=GRID.dt)
    assert support_start(f.shifted(2.0), 0.1) - support_start(f, 0.1) == pytest.approx(2.0)
    with pytest.raises(UndefinedSupportError):
        support_start(Amplitude.zeros(GRID), 0.1)


# sorted distinct endpoints paired up give disjoint intervals
intervals = st.lists(st.floats(-12, 32), max_size=8, unique=True).map(
    lambda xs: [tuple(p) for p in np.sort(xs[: len(xs) // 2 * 2]).reshape(-1, 2)])


@settings(max_examples=60, deadline=None)
@given(intervals)
def test_window_and_complement_partition_samples(ivs):
    w = Window.of(*ivs)
    m, c = w.mask(GRID), w.complement().mask(GRID)
    assert not (m & c).any()
    assert (m | c).all()


@settings(max_examples=40, deadline=None)
@given(st.floats(-4, 20), st.integers(-200, 200))
def test_shift_preserves_norm_and_translates_support(center, steps):
    f = make_hump(1.0, center, GRID)
    g = f.shifted_steps(steps)
    lost = 1 - g.norm2()
    assert lost >= -1e-12
    if abs(center + steps * GRID.dt - 10) < 12:
        assert lost < 1e-9
        assert support_start(g, 0.3) - support_start(f, 0.3) == pytest.approx(steps * GRID.dt)


@settings(max_examples=40, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2 * np.pi))
def test_inner_product_is_hermitian_and_phase_covariant(c1, c2, phase):
    f = make_hump(1.0, c1, GRID)
    g = make_hump(1.3, c2, GRID)
    z = np.exp(1j * phase)
    assert inner_product(f, g) == pytest.approx(np.conj(inner_product(g, f)))
    assert inner_product(f * z, g * z) == pytest.approx(inner_product(f, g))
    assert abs(inner_product(f, g)) <= 1 + 1e-12
