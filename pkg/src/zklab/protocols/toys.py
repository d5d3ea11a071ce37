"""Small hand-made protocols that isolate individual behaviours."""

import numpy as np

from ..qcore import QuantumPredicate
from .spec import ProtocolSpec


def constant_protocol(shape="QAM3", message_lengths=(1, 1), final_length=1, accept=True, coin_length=1):
    """Predicate ``I`` (always accept) or ``0`` (always reject) on every transcript."""
    E = (QuantumPredicate.accept_all if accept else QuantumPredicate.reject_all)(final_length)
    recipe = {"kind": "constant", "shape": shape, "message_lengths": list(message_lengths),
              "final_length": final_length, "accept": bool(accept), "coin_length": coin_length}
    kwargs = {}
    if shape == "IP3":
        kwargs = {"coin_length": coin_length, "respond": lambda r, a: r & ((1 << message_lengths[1]) - 1)}
    return ProtocolSpec(shape, message_lengths, final_length, lambda prefix, coins=None: E,
                        eps_c=0.0 if accept else 1.0 / 3, eps_s=0.0 if not accept else 0.5,
                        classical_final=True, name=f"always-{'accept' if accept else 'reject'}",
                        recipe=recipe, **kwargs)


def hidden_coin_protocol():
    """IP3 with one-bit messages: the verifier replies ``r AND alpha``.

    Arthur accepts iff ``alpha = 0`` and the final bit equals the coin ``r``.  On
    ``alpha = 0`` the reply reveals nothing, so no prover beats 1/2.
    """
    zero, one = QuantumPredicate.from_diagonal([1.0, 0.0]), QuantumPredicate.from_diagonal([0.0, 1.0])
    reject = QuantumPredicate.reject_all(1)

    def accept(prefix, coins):
        if prefix[0] != 0:
            return reject
        return one if coins else zero

    return ProtocolSpec("IP3", (1, 1), 1, accept, coin_length=1, respond=lambda r, a: r & a,
                        eps_c=0.0, eps_s=0.5, classical_final=False, name="hidden coin",
                        recipe={"kind": "toy", "name": "hidden_coin"})


def parity_chain_protocol(k=2, yes=True):
    """``(2k+1)``-message protocol with one-bit messages.

    yes: accept iff ``alpha_{2i+1} = alpha_{2i-1} xor alpha_{2i}`` for every ``i``; the
    honest prover always wins.  no: accept iff each verifier bit repeats the prover's
    previous bit, which no prover can arrange with probability above ``2^-k``.
    """
    acc, rej = QuantumPredicate.accept_all(1), QuantumPredicate.reject_all(1)
    if yes:
        def accept(prefix):
            for i in range(1, k):
                if prefix[2 * i] != prefix[2 * i - 2] ^ prefix[2 * i - 1]:
                    return rej
            return QuantumPredicate.from_diagonal(np.eye(2)[prefix[-2] ^ prefix[-1]])
    else:
        def accept(prefix):
            ok = all(prefix[2 * i + 1] == prefix[2 * i] for i in range(k))
            return acc if ok else rej

    return ProtocolSpec("QAM_2k1", (1,) * (2 * k), 1, accept, eps_c=0.0,
                        eps_s=0.5 if yes else 0.5**k, classical_final=True,
                        name=f"parity chain k={k} ({'yes' if yes else 'no'})",
                        recipe={"kind": "toy", "name": "parity_chain", "k": k, "yes": yes})


def prefix_regression_protocol():
    """Five messages of widths 2, 1, 1, 2 then one final bit; Arthur accepts everything.

    Only the shape matters: it is sized so that a simulator can copy an oracle answer
    into its first message, which separates full-prefix from last-message hashing.
    """
    E = QuantumPredicate.accept_all(1)
    return ProtocolSpec("QAM_2k1", (2, 1, 1, 2), 1, lambda prefix: E, eps_c=0.0, eps_s=0.5,
                        classical_final=True, name="prefix regression",
                        recipe={"kind": "toy", "name": "prefix_regression"})


def conjugate_basis_protocol():
    """QAM3 with a genuinely quantum final message.

    Arthur projects the final qubit onto ``|0>`` when ``beta = 0`` and onto ``|+>`` when
    ``beta = 1``; the first message is ignored.
    """
    plus = np.full((2, 2), 0.5)
    E = [QuantumPredicate(np.diag([1.0, 0.0])), QuantumPredicate(plus)]
    return ProtocolSpec("QAM3", (1, 1), 1, lambda prefix: E[prefix[1]], eps_c=0.0, eps_s=0.5,
                        name="conjugate basis", recipe={"kind": "toy", "name": "conjugate_basis"})
