"""The channel catalogue: validation and the optimal full-access error.

Each channel is a list of modes (weight, output profile, output
polarizations).  After the whole packet has arrived, the best polarization
measurement errs with probability 1/2 - |gamma2|, where gamma2 is the
negative eigenvalue of the discrimination operator.
"""

import math

from relbc.channel import builtin_channel, custom_channel, validate_channel
from relbc.measure import full_access_error, gamma2, gamma_operator, optimal_povm
from relbc.states import WavepacketSpec, default_grid

spec = WavepacketSpec()
grid = default_grid(spec)

channels = [
    builtin_channel("ideal", spec, grid),
    builtin_channel("rotate", spec, grid, theta=math.pi / 8, lam=0.8),
    builtin_channel("jitter", spec, grid),
    builtin_channel("collapse", spec, grid, lam=1.0),
    builtin_channel("absorbing", spec, grid),
]

print(f"{'channel':46s} {'detect':>7s} {'gamma2':>9s} {'P_e':>7s}")
for ch in channels:
    g = gamma_operator(ch)
    print(f"{ch.name:46s} {sum(m.weight for m in ch.modes):7.3f} "
          f"{gamma2(g):9.4f} {full_access_error(ch):7.4f}")

print()
print("optimal measurement for rotate(pi/8, 0.8), outcome-0 projector:")
print(optimal_povm(gamma_operator(channels[1])).E0.real.round(4))

# A user-defined channel that delivers the photon 3 time units early
# violates causality and is reported, not silently accepted.
fast = custom_channel([dict(weight=1.0, shift=-3.0)], spec, grid, name="superluminal")
print()
print(f"validation of {fast.name}:")
print(validate_channel(fast, spec).format())
