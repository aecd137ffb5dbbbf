"""An honest commitment over a noisy channel.

Alice commits to a bit as the parity of N blocks of k repeated bits and
sends the N*k photons over shuffled channels.  Bob measures each photon
optimally, Alice discloses, and Bob checks every block by majority vote.
"""

import math

from relbc.channel import builtin_channel
from relbc.coding import BlockCode
from relbc.protocol import ChannelSampler, ProtocolConfig, honest_tables, run_honest, run_trial
from relbc.states import WavepacketSpec, default_grid

spec = WavepacketSpec()
grid = default_grid(spec, max_delay=2 * spec.tau0)
channel = builtin_channel("rotate", spec, grid, theta=math.pi / 8, lam=0.8)
config = ProtocolConfig(BlockCode(8, 16), spec, channel)

# one run, step by step
transcript, report = run_trial(config, ChannelSampler(honest_tables(config)), seed=0, trial=0)
print("timeline:")
for tau, who, what in transcript.timing:
    print(f"  tau = {tau:6.1f}  {who}: {what}")
print(f"committed {transcript.committed_bit}, recovered {report.recovered_bit}, "
      f"accepted {report.accepted}, no-clicks {transcript.outcomes.n_noclick} of "
      f"{config.code.length}")

# many runs against the analytic pipeline
_, stats = run_honest(config, trials=2000, seed=1)
print()
print(f"per-bit error (optimal measurement): {stats.per_bit_error:.4f}")
print(f"block error after majority vote    : {stats.block_error:.3e}")
print(f"parity error: analytic {stats.analytic_parity_error:.3e}, "
      f"empirical {stats.empirical_parity_error:.3e} "
      f"(3 sigma {3 * stats.parity_error_sigma:.1e})")
print(f"acceptance  : analytic {stats.analytic_acceptance:.4f}, "
      f"empirical {stats.acceptance_rate:.4f}")
