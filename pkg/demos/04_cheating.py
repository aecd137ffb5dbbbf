"""Three ways to cheat and how the protocol answers them.

* Bob measures before the back humps arrive and guesses the parity.
* Alice delays one block by tau0, hoping to choose its value late.
* Alice announces one block flipped.
"""

from relbc.attacks import (Delay, EarlyMeasure, ParityFlip, run_delay_attack,
                           run_early_measurement, run_parity_flip)
from relbc.channel import builtin_channel
from relbc.coding import BlockCode
from relbc.protocol import ProtocolConfig
from relbc.states import WavepacketSpec, default_grid

spec = WavepacketSpec()
grid = default_grid(spec, max_delay=2 * spec.tau0)
ideal = builtin_channel("ideal", spec, grid)

cfg = ProtocolConfig(BlockCode(4, 4), spec, ideal)
early = run_early_measurement(cfg, 5000, seed=1, attack=EarlyMeasure())
print("early measurement, N=4, k=4")
print(f"  per-bit error           : {early.extra['per_bit_error']:.4f} "
      f"(analytic {early.extra['analytic_per_bit_error']:.4f})")
print(f"  parity guessed correctly: {early.rate:.4f}")
print(f"  majority-vote prediction: {early.extra['predicted_success']:.4f}")
print(f"  information bound       : {early.extra['bound']:.4f}")

print()
print("delaying one block by tau0")
for k in (1, 3, 6):
    stats = run_delay_attack(ProtocolConfig(BlockCode(2, k), spec, ideal), Delay(spec.tau0),
                             20_000, seed=2)
    print(f"  k={k}: p_perp={stats.extra['p_perp']:.3f}  undetected {stats.rate:.5f}"
          f"  analytic {stats.analytic:.5f}")

print()
noisy = builtin_channel("rotate", spec, grid, theta=0.0, lam=0.6)
flip = run_parity_flip(ProtocolConfig(BlockCode(4, 3), spec, noisy), ParityFlip(0), 5000, seed=3)
print("announcing a flipped block over rotate(0, 0.6), k=3")
print(f"  flipped block caught: {flip.rate:.4f} (analytic {flip.analytic:.4f})")
print(f"  run aborted         : {flip.extra['abort_rate']:.4f}")
