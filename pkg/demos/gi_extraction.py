"""Run the three-message extraction on graph isomorphism, yes and no instances.

On isomorphic graphs the witness simulator makes the extractor accept with
probability 1.  On non-isomorphic graphs every simulator is turned into a
cheating prover, and the report shows the prover never beats the optimal cheat.
"""

from zklab.extract import (
    algorithm_Z,
    gi_grover_simulator,
    gi_oracle_ignoring,
    gi_query_then_answer,
    gi_spike_simulator,
)
from zklab.protocols import gi_protocol, gi_witness_simulator

P3 = [(0, 1), (1, 2)]
P3_ALT = [(0, 2), (1, 2)]
K3 = [(0, 1), (0, 2), (1, 2)]

yes, _, witness = gi_protocol(P3, P3_ALT, vertices=3)
q, _, _ = algorithm_Z(yes, gi_witness_simulator(yes), t=1, optimal=False)
print(f"isomorphic paths, witness {witness}: q = {q:.6f}")

no, _, _ = gi_protocol(P3, K3, vertices=3)
print("\npath vs triangle")
print(f"{'simulator':<24}{'q':>8}{'cheat':>8}{'optimum':>9}{'E[s]':>8}  chain")
for make in (gi_oracle_ignoring, gi_query_then_answer, gi_grover_simulator, gi_spike_simulator):
    q, _, r = algorithm_Z(no, make(no), t=1)
    print(f"{make.__name__:<24}{q:8.4f}{r.cheat_prob:8.4f}{r.optimal_cheat:9.4f}{r.expected_s[0]:8.4f}  "
          f"{'holds' if r.chain_holds else 'FAILS'}")

# the spike simulator's chain, line by line
_, _, r = algorithm_Z(no, gi_spike_simulator(no), t=1)
print(f"\nchain for the spike simulator (delta = {r.delta:.4f})")
for line in r.chain:
    print(f"  {line.name:<20}{line.lhs:10.6f} {line.relation} {line.rhs:10.6f}")
