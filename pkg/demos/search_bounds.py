"""Classical and quantum search with t queries, next to their bounds."""

import numpy as np

from zklab.searchlab import (
    classical_optimal_search,
    gate_grid_sweep,
    grover_search,
    single_target_bound,
)

n2 = 3
print(f"n2 = {n2}")
print(f"{'t':>2}{'classical':>11}{'(t+1)/2^n2':>12}{'grover':>9}{'10t^2/2^n2':>12}")
for t in range(5):
    c = float(classical_optimal_search(t, n2))
    g = grover_search(t, n2)
    print(f"{t:>2}{c:11.5f}{(t + 1) / 2**n2:12.5f}{g:9.5f}{10 * t * t / 2**n2:12.5f}")

# a brute-force sweep over rotation angles can stop early once Grover would overshoot
for t, m in [(1, 2), (2, 2)]:
    best = max(s for _, s in gate_grid_sweep(t, m))
    theta = np.arcsin(2.0 ** (-m / 2))
    print(f"t={t}, n2={m}: best grid success {best:.4f}, sin^2((2t+1)theta) = "
          f"{np.sin((2 * t + 1) * theta) ** 2:.4f}, capped bound {single_target_bound(t, m):.4f}")
