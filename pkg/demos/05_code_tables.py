"""Counting formulas behind concealment and reliability.

Prints, for a few code shapes, the number of strings of one parity, the
information Bob would need, the early-guess bound, and the block and
parity error rates for a given per-bit error.
"""

from relbc.coding import (block_error, count_parity_strings, early_guess_bound,
                          parity_error, shannon_info)

print(f"{'N':>3s} {'k':>3s} {'strings of one parity':>24s} {'I (bits)':>9s} "
      f"{'eta':>6s} {'guess bound':>12s}")
for n, k in [(2, 1), (2, 2), (4, 2), (4, 4), (8, 4), (8, 8), (16, 8)]:
    c = count_parity_strings(n, k)
    info, eta = shannon_info(n, k)
    print(f"{n:3d} {k:3d} {c.exact:24d} {info:9.3f} {eta:6.4f} {early_guess_bound(n, k):12.6g}")

print()
p = 0.1
print(f"per-bit error {p}: block and parity errors for N = 8")
for k in (4, 8, 16, 32):
    pb = block_error(p, k)
    print(f"  k={k:2d}  block {pb.exact:.3e} (asymptotic {pb.asymptotic:.3e})"
          f"  parity {parity_error(pb.exact, 8).closed:.3e}")
