"""Verifier and prover roles.

Verifiers respond to a classical prefix of odd length.  The honest verifiers are
randomized, so their reply is the ``UNIFORM`` marker that exact-mode runs expand by
enumeration; the hash verifiers are deterministic functions of the prefix and can be
handed to a simulator as a ``FunctionOracle``.

Provers expose ``next_message(prefix)`` (a ``{message: probability}`` map, prefix of
even length) and ``final_message(prefix)`` (a ``DensityMatrix`` or, for classical
final messages, a ``{basis value: probability}`` map).
"""

from dataclasses import dataclass

import numpy as np

from ..config import TOL
from ..errors import ConfigurationError, NotOracleRepresentableError, ProtocolOrderError
from ..fieldhash import HashFunction
from ..qcore import DensityMatrix, FunctionOracle
from .spec import ProtocolSpec, join_bits

UNIFORM = "uniform"


@dataclass(frozen=True)
class HonestArthur:
    spec: ProtocolSpec


@dataclass(frozen=True)
class HashArthur:
    """Arthur replying ``h_i(alpha_1 .. alpha_{2i-1})`` in round ``i``.

    With ``prefix_mode="last"`` round ``i`` hashes only ``alpha_{2i-1}``; that variant
    exists to show why the whole prefix must be hashed.
    """

    spec: ProtocolSpec
    hashes: tuple
    prefix_mode: str = "full"

    def __post_init__(self):
        object.__setattr__(self, "hashes", tuple(self.hashes))
        if self.prefix_mode not in ("full", "last"):
            raise ConfigurationError(f"unknown prefix mode {self.prefix_mode!r}")
        if len(self.hashes) != self.spec.k:
            raise ConfigurationError(f"need {self.spec.k} hash functions, got {len(self.hashes)}")
        for i, h in enumerate(self.hashes, start=1):
            n_in = self.spec.N(i) if self.prefix_mode == "full" else self.spec.n(2 * i - 1)
            if (h.n1, h.n2) != (n_in, self.spec.n(2 * i)):
                raise ConfigurationError(
                    f"round {i} hash maps {h.n1}->{h.n2} bits, expected {n_in}->{self.spec.n(2 * i)}"
                )


@dataclass(frozen=True)
class HonestIPVerifier:
    spec: ProtocolSpec
    coins: int = None


@dataclass(frozen=True)
class HashIPVerifier:
    """IP verifier that uses coins ``h(alpha)`` and otherwise behaves honestly."""

    spec: ProtocolSpec
    h: HashFunction

    def __post_init__(self):
        if (self.h.n1, self.h.n2) != (self.spec.n(1), self.spec.coin_length):
            raise ConfigurationError(
                f"hash maps {self.h.n1}->{self.h.n2} bits, expected {self.spec.n(1)}->{self.spec.coin_length}"
            )


def _check_shape(spec, verifier):
    ip = isinstance(verifier, (HonestIPVerifier, HashIPVerifier))
    if ip != (spec.shape == "IP3"):
        raise ConfigurationError(f"{type(verifier).__name__} cannot run a {spec.shape} protocol")


def verifier_response(verifier, prefix):
    prefix = tuple(int(a) for a in prefix)
    spec = verifier.spec
    if len(prefix) % 2 == 0 or len(prefix) > 2 * spec.k - 1:
        raise ProtocolOrderError(f"verifier cannot move after {len(prefix)} messages")
    i = (len(prefix) + 1) // 2
    if isinstance(verifier, HonestArthur):
        return UNIFORM
    if isinstance(verifier, HashArthur):
        h = verifier.hashes[i - 1]
        if verifier.prefix_mode == "last":
            return h(prefix[-1])
        return h(join_bits(prefix, spec.message_lengths[: len(prefix)]))
    if isinstance(verifier, HonestIPVerifier):
        return UNIFORM if verifier.coins is None else spec.response(verifier.coins, prefix[0])
    if isinstance(verifier, HashIPVerifier):
        return spec.response(verifier.h(prefix[0]), prefix[0])
    raise ConfigurationError(f"not a verifier role: {verifier!r}")


def verifier_coins(verifier, prefix):
    """Private coins an IP verifier uses on ``prefix`` (``UNIFORM`` if honest and unset)."""
    if isinstance(verifier, HashIPVerifier):
        return verifier.h(prefix[0])
    if isinstance(verifier, HonestIPVerifier):
        return UNIFORM if verifier.coins is None else int(verifier.coins)
    return None


def as_function_oracle(verifier, round=1) -> FunctionOracle:
    spec = verifier.spec
    if isinstance(verifier, (HonestArthur, HonestIPVerifier)):
        raise NotOracleRepresentableError(f"{type(verifier).__name__} is randomized, not a function")
    if isinstance(verifier, HashIPVerifier):
        if round != 1:
            raise ConfigurationError("an IP3 verifier has a single round")
        table = spec.respond_table()[verifier.h.table(), np.arange(1 << spec.n(1))]
        return FunctionOracle(spec.n(1), spec.n(2), table)
    if not 1 <= round <= spec.k:
        raise ConfigurationError(f"round {round} outside 1..{spec.k}")
    h = verifier.hashes[round - 1]
    return FunctionOracle(h.n1, h.n2, h.table())


# -- provers -----------------------------------------------------------------------


def _check_distribution(dist, what):
    total = sum(dist.values())
    if any(p < 0 for p in dist.values()) or abs(total - 1) > 1e-9:
        raise ConfigurationError(f"{what} is not a probability distribution (sum {total})")


def _normalize_final(final, spec):
    if isinstance(final, DensityMatrix):
        if final.dim != 1 << spec.final_length:
            raise ConfigurationError(f"final state has dim {final.dim}, expected 2^{spec.final_length}")
        if abs(final.trace - 1) > TOL:
            raise ConfigurationError("final state is not normalized")
        return final
    final = {int(c): float(p) for c, p in dict(final).items()}
    _check_distribution(final, "final message distribution")
    return final


class StrategyProver:
    """Prover whose moves are given by functions of the prefix."""

    def __init__(self, spec, next_fn, final_fn, name="prover"):
        self.spec = spec
        self._next = next_fn
        self._final = final_fn
        self.name = name

    def next_message(self, prefix):
        dist = dict(self._next(tuple(prefix)))
        _check_distribution(dist, f"{self.name} move after {len(prefix)} messages")
        return dist

    def final_message(self, prefix):
        return _normalize_final(self._final(tuple(prefix)), self.spec)


class TabulatedProver(StrategyProver):
    """Prover given by explicit tables keyed by the classical prefix.

    ``moves`` maps an even-length prefix tuple to the distribution of the next odd
    message; ``finals`` maps a ``2k``-length prefix to the final message.  Prefixes
    missing from the tables get the fallback: message 0, or ``|0><0|`` for the final
    message.
    """

    def __init__(self, spec, moves, finals, name="tabulated", quantum_fallback=None):
        self.moves = {tuple(k): dict(v) for k, v in moves.items()}
        self.finals = {tuple(k): v for k, v in finals.items()}
        if quantum_fallback is None:
            quantum_fallback = not spec.classical_final
        self.quantum_fallback = quantum_fallback
        super().__init__(spec, self._lookup_move, self._lookup_final, name)

    def _lookup_move(self, prefix):
        return self.moves.get(prefix, {0: 1.0})

    def _lookup_final(self, prefix):
        if prefix in self.finals:
            return self.finals[prefix]
        if self.quantum_fallback:
            return DensityMatrix.basis(0, self.spec.final_length)
        return {0: 1.0}

    @property
    def first(self):
        return self._lookup_move(())


class HonestProver(StrategyProver):
    def __init__(self, spec, next_fn, final_fn, witness=None, name="honest"):
        super().__init__(spec, next_fn, final_fn, name)
        self.witness = witness
