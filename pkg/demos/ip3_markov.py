"""Private-coin extraction: the coins and the final message are independent given
the public transcript, unless the final message leaks the coin."""

from zklab.extract import algorithm_Z_prime, coin_leak_control, hidden_coin_blind, markov_network_check
from zklab.protocols import hidden_coin_protocol

spec = hidden_coin_protocol()
q, joint, r = algorithm_Z_prime(spec, hidden_coin_blind(), t=1)
print(f"hidden coin, blind simulator: q = {q:.4f}, Markov error = {r.markov_error:.2e}")
print(f"same joint with the coin copied into the final message: "
      f"error = {markov_network_check(coin_leak_control(joint)):.4f}")
