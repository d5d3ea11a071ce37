"""Why each round must hash the whole transcript so far.

An adversarial simulator queries the round-2 oracle at zero and sends the answer as
its first message.  If round 2 hashes only the latest message (always zero here),
the round-2 reply is fully determined by the prefix and E[s] hits 1.
"""

from zklab.extract import algorithm_Z_k, regression_simulator
from zklab.protocols import prefix_regression_protocol

spec = prefix_regression_protocol()
for mode in ("full", "last"):
    _, _, r = algorithm_Z_k(spec, regression_simulator(mode), t=1, c=2.0, prefix_mode=mode)
    e, b = r.expected_s[1], r.s_bounds[1]
    print(f"{mode:>4} prefix: round-2 E[s] = {e:.5f}, bound c t^2 / 2^n = {b:.3f} -> "
          f"{'within' if e <= b else 'VIOLATED'}")
