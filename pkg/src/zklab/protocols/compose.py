"""Parallel composition: run ``copies`` instances side by side, accept iff all accept.

Every message of the composed protocol is the concatenation of the per-copy messages
with copy 0 in the most significant position; the composed predicate is the tensor
product of the per-copy predicates.
"""

from functools import reduce

import numpy as np

from ..errors import DomainError
from ..qcore import DensityMatrix, QuantumPredicate
from .roles import StrategyProver
from .spec import ProtocolSpec, join_bits, split_bits


def kron_predicates(preds):
    if all(E.is_diagonal for E in preds):
        return QuantumPredicate.from_diagonal(reduce(np.kron, [E.diagonal for E in preds]))
    return QuantumPredicate(reduce(np.kron, [E.dense() for E in preds]))


def _split_prefix(prefix, base, copies):
    """Per-copy prefixes of a composed prefix."""
    parts = [split_bits(m, [base.n(j + 1)] * copies) for j, m in enumerate(prefix)]
    return [tuple(p[c] for p in parts) for c in range(copies)]


def parallel_compose(spec: ProtocolSpec, copies: int) -> ProtocolSpec:
    if copies < 1:
        raise DomainError(f"cannot compose {copies} copies")
    if copies == 1:
        return spec
    nc = spec.coin_length

    def accept(prefix, coins=None):
        subs = _split_prefix(prefix, spec, copies)
        if spec.shape == "IP3":
            rs = split_bits(coins, [nc] * copies)
            return kron_predicates([spec.predicate(p, r) for p, r in zip(subs, rs)])
        return kron_predicates([spec.predicate(p) for p in subs])

    respond = None
    if spec.shape == "IP3":
        def respond(coins, alpha):
            rs = split_bits(coins, [nc] * copies)
            alphas = split_bits(alpha, [spec.n(1)] * copies)
            return join_bits([spec.response(r, a) for r, a in zip(rs, alphas)], [spec.n(2)] * copies)

    recipe = None
    if spec.recipe is not None:
        recipe = {"kind": "compose", "base": spec.recipe, "copies": copies}
    return ProtocolSpec(
        shape=spec.shape,
        message_lengths=tuple(n * copies for n in spec.message_lengths),
        final_length=spec.final_length * copies,
        accept=accept,
        coin_length=nc * copies,
        respond=respond,
        eps_c=1 - (1 - spec.eps_c) ** copies,
        eps_s=spec.eps_s**copies,
        classical_final=spec.classical_final,
        name=f"{spec.name} x{copies}",
        recipe=recipe,
    )


def _product(dists, widths):
    out = {(): 1.0}
    for d in dists:
        out = {k + (m,): p * q for k, p in out.items() for m, q in d.items()}
    return {join_bits(k, widths): p for k, p in out.items()}


def product_prover(composed: ProtocolSpec, base: ProtocolSpec, provers):
    """Run independent per-copy provers side by side on the composed protocol."""
    copies = len(provers)

    def next_fn(prefix):
        subs = _split_prefix(prefix, base, copies)
        j = len(prefix) + 1
        return _product([pr.next_message(s) for pr, s in zip(provers, subs)], [base.n(j)] * copies)

    def final_fn(prefix):
        subs = _split_prefix(prefix, base, copies)
        finals = [pr.final_message(s) for pr, s in zip(provers, subs)]
        if not any(isinstance(f, DensityMatrix) for f in finals):
            return _product(finals, [base.final_length] * copies)
        mats = [
            f.matrix if isinstance(f, DensityMatrix) else DensityMatrix.from_distribution(f, base.final_length).matrix
            for f in finals
        ]
        return DensityMatrix(reduce(np.kron, mats))

    return StrategyProver(composed, next_fn, final_fn, name=f"{copies} independent provers")
