"""Protocol specifications for the three special protocol shapes.

``QAM3``     prover alpha, verifier uniform beta, prover final message; public coins.
``IP3``      as QAM3 but the verifier holds private coins ``r`` and replies
             ``respond(r, alpha)``; the predicate sees the coins too.
``QAM_2k1``  ``2k + 1`` messages, prover first and last, verifier messages uniform.

Messages are integers; a multi-part message is the big-endian concatenation of its
parts (first part most significant).  Only the final prover message may be quantum;
its acceptance measurement is a ``QuantumPredicate`` chosen by the classical prefix.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..qcore import QuantumPredicate

SHAPES = ("QAM3", "IP3", "QAM_2k1")


def join_bits(values, widths):
    out = 0
    for v, w in zip(values, widths):
        out = (out << w) | int(v)
    return out


def split_bits(value, widths):
    parts = []
    for w in reversed(widths):
        parts.append(value & ((1 << w) - 1))
        value >>= w
    return tuple(reversed(parts))


@dataclass(frozen=True, eq=False)
class ProtocolSpec:
    shape: str
    message_lengths: tuple
    final_length: int
    accept: Callable
    coin_length: int = 0
    respond: Callable = None
    eps_c: float = 0.0
    eps_s: float = 0.5
    classical_final: bool = False
    name: str = ""
    recipe: dict = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "message_lengths", tuple(int(n) for n in self.message_lengths))
        if self.shape not in SHAPES:
            raise ConfigurationError(f"unknown protocol shape {self.shape!r}")
        lengths = self.message_lengths
        if self.shape == "QAM_2k1" and len(lengths) == 0:
            raise DomainError("a (2k+1)-round protocol needs k >= 1")
        if len(lengths) % 2 or (self.shape != "QAM_2k1" and len(lengths) != 2):
            raise ConfigurationError(f"{self.shape} cannot have message lengths {lengths}")
        if min(lengths) < 1 or self.final_length < 1:
            raise ConfigurationError("message lengths must be at least 1")
        if self.shape == "IP3" and (self.coin_length < 1 or self.respond is None):
            raise ConfigurationError("IP3 needs a coin length and a response rule")
        if not self.eps_c + self.eps_s < 2 / 3:
            raise ConfigurationError(f"eps_c + eps_s = {self.eps_c + self.eps_s} is not below 2/3")

    @property
    def k(self):
        return len(self.message_lengths) // 2

    def n(self, j):
        """Length of message ``j`` (1-based; ``j = 2k + 1`` is the final message)."""
        if j == 2 * self.k + 1:
            return self.final_length
        return self.message_lengths[j - 1]

    def N(self, i):
        """Total length of the prefix ``alpha_1 .. alpha_{2i-1}`` hashed in round ``i``."""
        return sum(self.message_lengths[: 2 * i - 1])

    @property
    def verifier_lengths(self):
        return self.message_lengths[1::2]

    @property
    def response_length(self):
        """Width of what the verifier actually sends (coins for IP3 are private)."""
        return self.message_lengths[1]

    @property
    def hash_output_length(self):
        """Width the hash verifier's function must produce in round 1."""
        return self.coin_length if self.shape == "IP3" else self.message_lengths[1]

    def predicate(self, prefix, coins=None) -> QuantumPredicate:
        key = (tuple(int(a) for a in prefix), coins)
        E = self._cache.get(key)
        if E is None:
            E = self.accept(key[0], coins) if self.shape == "IP3" else self.accept(key[0])
            if E.dim != 1 << self.final_length:
                raise ConfigurationError(
                    f"predicate dimension {E.dim} does not match {self.final_length} final qubits"
                )
            self._cache[key] = E
        return E

    def response(self, coins, alpha):
        return int(self.respond(int(coins), int(alpha)))

    def respond_table(self):
        """``table[r, alpha] = respond(r, alpha)`` for IP3 specs."""
        key = ("respond_table",)
        tab = self._cache.get(key)
        if tab is None:
            n1, nc = self.message_lengths[0], self.coin_length
            tab = np.array(
                [[self.response(r, a) for a in range(1 << n1)] for r in range(1 << nc)], dtype=np.int64
            )
            self._cache[key] = tab
        return tab

    def to_json(self):
        if self.recipe is None:
            raise ConfigurationError(f"spec {self.name!r} was not built from a serializable recipe")
        return dict(self.recipe)


@dataclass(frozen=True)
class Transcript:
    """One run: classical messages ``alpha_1 .. alpha_2k``, the final message and the coins."""

    messages: tuple
    final: object
    coins: int = None
    accept_probability: float = None
    accepted: bool = None
