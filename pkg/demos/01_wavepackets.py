"""Double-hump photons and what a half-window observer can learn.

The committed state is a single photon whose amplitude is split between
two Gaussian humps tau0 apart.  Until the back hump arrives, a receiver
sees only half of the norm, so it cannot tell the two polarizations
apart better than 3/4 of the time.
"""

from relbc.measure import restricted_error
from relbc.siggrid import inner_product, window_mass
from relbc.states import WavepacketSpec, achieved_delta, default_grid, make_double_hump

spec = WavepacketSpec(sigma=1.0, tau0=20.0, delta_tau=5.0)
grid = default_grid(spec)
F = make_double_hump(spec, grid)

print(f"grid: {grid.n_samples} samples, dt = {grid.dt:.5f}")
print(f"norm of F                      : {F.norm2():.12f}")
print(f"mass in front window [-5, 5]   : {window_mass(F, spec.front_window()):.9f}")
print(f"mass in back window [15, 25]   : {window_mass(F, spec.back_window()):.9f}")
print(f"localization deficit (delta)   : {achieved_delta(F, spec):.3e} (budget {spec.delta:g})")

# A copy delayed by tau0 shares exactly one hump with the original.
print(f"<F | F delayed by tau0>        : {inner_product(F.shifted(spec.tau0), F).real:.6f}")

print()
print("error of the best guess when only part of the packet is visible:")
for label, w in [("front half", spec.front_window()), ("both halves", spec.both_windows())]:
    print(f"  {label:12s}: {restricted_error(F, w):.6f}")
