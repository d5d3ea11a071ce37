"""Running protocols exactly or by sampling, and brute-force optimal cheaters."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..qcore import DensityMatrix, QuantumPredicate, predicate_accept
from .roles import (
    UNIFORM,
    HonestArthur,
    HonestIPVerifier,
    TabulatedProver,
    _check_shape,
    verifier_coins,
    verifier_response,
)
from .spec import ProtocolSpec, Transcript


def final_acceptance(E: QuantumPredicate, final) -> float:
    """Acceptance of a final message given as a DensityMatrix or classical distribution."""
    if isinstance(final, DensityMatrix):
        return predicate_accept(E, final)
    return float(sum(p * E.entry(c) for c, p in final.items()))


@dataclass
class TranscriptDistribution:
    """Exact distribution over ``(messages, coins)`` with the final message of each branch.

    ``entries[(messages, coins)] = (probability, final message, accept probability)``
    where the accept probability is conditional on that branch.
    """

    entries: dict

    @property
    def acceptance(self):
        return float(sum(p * a for p, _, a in self.entries.values()))

    def message_marginal(self, j):
        """Distribution of message ``j`` (1-based)."""
        out = {}
        for (msgs, _), (p, _, _) in self.entries.items():
            out[msgs[j - 1]] = out.get(msgs[j - 1], 0.0) + p
        return out

    def total(self):
        return float(sum(p for p, _, _ in self.entries.values()))


def _verifier_branches(spec, verifier, prefix, coins):
    """Yield ``(probability, reply, coins)`` for the verifier's move after ``prefix``."""
    i = (len(prefix) + 1) // 2
    if spec.shape == "IP3":
        r = verifier_coins(verifier, prefix)
        rs = range(1 << spec.coin_length) if r == UNIFORM else [r]
        for r in rs:
            yield 1.0 / len(rs), spec.response(r, prefix[0]), r
        return
    reply = verifier_response(verifier, prefix)
    if reply == UNIFORM:
        width = spec.n(2 * i)
        for beta in range(1 << width):
            yield 1.0 / (1 << width), beta, coins
    else:
        yield 1.0, reply, coins


def run_protocol(spec: ProtocolSpec, prover, verifier, mode="exact", rng=None):
    _check_shape(spec, verifier)
    if verifier.spec is not spec and verifier.spec.message_lengths != spec.message_lengths:
        raise ConfigurationError("verifier was built for a different protocol")
    if mode == "exact":
        return _run_exact(spec, prover, verifier)
    if mode == "sampled":
        if rng is None:
            raise ConfigurationError("sampled mode needs a random generator")
        return _run_sampled(spec, prover, verifier, rng)
    raise ConfigurationError(f"unknown run mode {mode!r}")


def _run_exact(spec, prover, verifier):
    frontier = [(1.0, (), None)]
    for i in range(1, spec.k + 1):
        nxt = []
        for p, prefix, coins in frontier:
            for alpha, pa in sorted(prover.next_message(prefix).items()):
                if pa == 0:
                    continue
                head = prefix + (int(alpha),)
                for pv, beta, c in _verifier_branches(spec, verifier, head, coins):
                    nxt.append((p * pa * pv, head + (int(beta),), c))
        frontier = nxt
    entries = {}
    for p, msgs, coins in frontier:
        final = prover.final_message(msgs)
        acc = final_acceptance(spec.predicate(msgs, coins), final)
        key = (msgs, coins)
        if key in entries:
            q, f, a = entries[key]
            entries[key] = (q + p, f, a)
        else:
            entries[key] = (p, final, acc)
    return TranscriptDistribution(entries)


def _draw(dist, rng):
    keys = sorted(dist)
    probs = np.array([dist[k] for k in keys], dtype=float)
    return keys[rng.choice(len(keys), p=probs / probs.sum())]


def _run_sampled(spec, prover, verifier, rng):
    prefix, coins = (), None
    for _ in range(spec.k):
        prefix = prefix + (int(_draw(prover.next_message(prefix), rng)),)
        branches = list(_verifier_branches(spec, verifier, prefix, coins))
        _, beta, coins = branches[rng.integers(len(branches))]
        prefix = prefix + (int(beta),)
    final = prover.final_message(prefix)
    acc = final_acceptance(spec.predicate(prefix, coins), final)
    if not isinstance(final, DensityMatrix):
        final = int(_draw(final, rng))
    return Transcript(prefix, final, coins, acc, bool(rng.random() < acc))


def honest_verifier(spec):
    return HonestIPVerifier(spec) if spec.shape == "IP3" else HonestArthur(spec)


# -- optimal cheating --------------------------------------------------------------


def _best_final(E: QuantumPredicate, classical):
    """Largest acceptance over final messages and a maximizing message."""
    if E.is_diagonal:
        c = int(np.argmax(E.diagonal))
        value = float(E.diagonal[c])
        if classical:
            return value, {c: 1.0}
        return value, DensityMatrix.basis(c, E.dim.bit_length() - 1)
    w, v = np.linalg.eigh(E.matrix)
    vec = v[:, -1]
    return float(w[-1]), DensityMatrix(np.outer(vec, vec.conj()))


def _sum_predicates(terms):
    """``sum_j weight_j E_j`` as a QuantumPredicate-like object (weights sum to <= 1)."""
    if all(E.is_diagonal for _, E in terms):
        return QuantumPredicate.from_diagonal(sum(w * E.diagonal for w, E in terms))
    return QuantumPredicate(sum(w * E.dense() for w, E in terms))


def optimal_cheating_probability(spec: ProtocolSpec, tol=1e-12):
    """Exact optimum over all provers against the honest verifier, and an optimal prover.

    Ties between first messages go to the smallest message.
    """
    moves, finals = {}, {}
    classical = spec.classical_final

    def leaf(prefix):
        if spec.shape == "IP3":
            # The prover sees beta but not the coins behind it.
            alpha, beta = prefix
            rs = [r for r in range(1 << spec.coin_length) if spec.response(r, alpha) == beta]
            if not rs:
                return 0.0
            E = _sum_predicates([(1.0 / len(rs), spec.predicate(prefix, r)) for r in rs])
            value, final = _best_final(E, classical)
            finals[prefix] = final
            return value * len(rs) / (1 << spec.coin_length)
        value, final = _best_final(spec.predicate(prefix), classical)
        finals[prefix] = final
        return value

    def value(prefix):
        j = len(prefix) + 1
        if j == 2 * spec.k + 1:
            return leaf(prefix)
        best, best_alpha = -1.0, 0
        for alpha in range(1 << spec.n(j)):
            head = prefix + (alpha,)
            if spec.shape == "IP3":
                betas = sorted({spec.response(r, alpha) for r in range(1 << spec.coin_length)})
                v = sum(value(head + (b,)) for b in betas)
            else:
                width = spec.n(j + 1)
                v = sum(value(head + (b,)) for b in range(1 << width)) / (1 << width)
            if v > best + tol:
                best, best_alpha = v, alpha
        moves[prefix] = {best_alpha: 1.0}
        return best

    best = value(())
    prover = TabulatedProver(spec, moves, finals, name="optimal cheater")
    return best, prover


def cheating_probability(prover, spec: ProtocolSpec):
    """Exact acceptance of ``prover`` against the honest verifier of ``spec``."""
    if prover.spec.message_lengths != spec.message_lengths or prover.spec.shape != spec.shape:
        raise ConfigurationError("prover was built for a different protocol shape")
    return run_protocol(spec, prover, honest_verifier(spec)).acceptance

