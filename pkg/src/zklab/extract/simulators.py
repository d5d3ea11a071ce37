"""Test simulators: honest-looking, oracle-ignoring, adaptive and adversarial.

Register names follow the extraction layout: ``A1 .. A{2k+1}`` (``A``, ``B``, ``C``
also work for three messages).  Values are written big-endian, first wire most
significant.
"""

import numpy as np

from ..errors import ConfigurationError
from ..protocols.gi import instance_of
from ..qcore import OracleCall, QueryAlgorithm, diffusion, hadamard, pauli_x, phase, xor_into
from ..qcore.circuit import cnot


def set_value(wires, value):
    """``pauli_x`` on the wires whose bit of ``value`` is 1."""
    n = len(wires)
    return [g for j, w in enumerate(wires) if (value >> (n - 1 - j)) & 1 for g in pauli_x(w)]


class _Layout:
    """Consecutive wire blocks, allocated in order."""

    def __init__(self):
        self.n = 0
        self.regs = {}

    def take(self, width, name=None):
        wires = list(range(self.n, self.n + width))
        self.n += width
        if name:
            self.regs[name] = wires
        return wires


def _message_regs(spec, lay):
    regs = [lay.take(spec.n(j), f"A{j}") for j in range(1, 2 * spec.k + 1)]
    return regs, lay.take(spec.final_length, f"A{2 * spec.k + 1}")


def fixed_transcript_simulator(spec, messages, final=0, budget=1):
    """Writes a constant transcript and final value; never queries."""
    if len(messages) != 2 * spec.k:
        raise ConfigurationError(f"expected {2 * spec.k} messages, got {len(messages)}")
    lay = _Layout()
    regs, C = _message_regs(spec, lay)
    steps = [g for r, v in zip(regs, messages) for g in set_value(r, v)] + set_value(C, final)
    return QueryAlgorithm(lay.n, steps, lay.regs, budget)


def query_then_answer_simulator(spec, alpha, answer):
    """Three messages: ``A = alpha``, ``B = oracle(alpha)``, ``C = answer(B)``."""
    lay = _Layout()
    (A, B), C = _message_regs(spec, lay)
    steps = set_value(A, alpha) + [OracleCall(A, B), xor_into(B, C, answer)]
    return QueryAlgorithm(lay.n, steps, lay.regs, 1)


def spike_simulator(spec, x0, answer=None):
    """Adaptive three-message simulator whose first message depends on an oracle answer.

    Queries the oracle at ``x0`` (work register) and sends ``A = x0`` when the answer
    is 0, ``A = x0 xor 1`` otherwise, so the verifier reply is pinned down on ``A = x0``.
    ``C = answer(y)`` for the observed value ``y`` (0 when ``answer`` is None).
    """
    lay = _Layout()
    (A, B), C = _message_regs(spec, lay)
    X = lay.take(len(A))
    Y = lay.take(len(B))
    steps = set_value(X, x0) + [
        OracleCall(X, Y),
        xor_into(Y, A, lambda y: x0 if y == 0 else x0 ^ 1),
        xor_into(Y, B, lambda y: y),
    ]
    if answer is not None:
        steps.append(xor_into(Y, C, answer))
    return QueryAlgorithm(lay.n, steps, lay.regs, 1)


def grover_simulator(spec, candidates):
    """One Grover iteration over four ``(alpha, goal, final)`` candidates.

    The oracle is queried in phase-kickback form on a ``|->`` register, marking the
    candidates whose verifier reply equals ``goal``; after one diffusion the marked
    candidate is sent with its prepared final message.  Needs a one-bit reply.
    """
    if len(candidates) != 4 or spec.n(2) != 1:
        raise ConfigurationError("the Grover simulator needs four candidates and a one-bit reply")
    alphas = [a for a, _, _ in candidates]
    goals = [g for _, g, _ in candidates]
    finals = [f for _, _, f in candidates]
    lay = _Layout()
    (A, B), C = _message_regs(spec, lay)
    J = lay.take(2)
    Y = lay.take(1)
    steps = hadamard(*J)
    steps.append(xor_into(J, A, lambda j: alphas[j]))
    steps += pauli_x(*Y) + hadamard(*Y)
    steps.append(OracleCall(A, Y))
    steps.append(phase(J, [np.pi * g for g in goals]))
    steps.append(xor_into(J, A, lambda j: alphas[j]))
    steps += hadamard(*Y) + pauli_x(*Y)
    steps.append(diffusion(J))
    steps.append(xor_into(J, A, lambda j: alphas[j]))
    steps.append(xor_into(J, C, lambda j: finals[j]))
    return QueryAlgorithm(lay.n, steps, lay.regs, 1)


# -- GI helpers ----------------------------------------------------------------------


def gi_guess(spec, b=1, perm=0):
    """``(alpha, b, answer)``: commit to ``perm(G_b)``, succeed iff the verifier asks ``b``."""
    inst = instance_of(spec)
    if spec.n(2) != 1:
        raise ConfigurationError("GI guesses are defined for a single copy")
    return int(inst.images[b][perm]), b, perm


def gi_oracle_ignoring(spec, b=1, perm=0):
    """Fixed GI transcript: commit to ``perm(G_b)``, answer ``perm`` whatever is asked."""
    inst = instance_of(spec)
    copies = spec.n(2)
    alpha = 0
    final = 0
    for _ in range(copies):
        alpha = (alpha << inst.e) | int(inst.images[b][perm])
        final = (final << inst.pb) | perm
    return fixed_transcript_simulator(spec, (alpha, 0), final)


def gi_query_then_answer(spec, b=1, perm=0):
    alpha, goal, ans = gi_guess(spec, b, perm)
    return query_then_answer_simulator(spec, alpha, lambda beta: ans if beta == goal else 0)


def gi_grover_candidates(spec):
    """The first four distinct commitments ``(perm(G_b), b, perm)`` in permutation order."""
    inst = instance_of(spec)
    out, seen = [], set()
    for p in range(len(inst.perms)):
        for b in (0, 1):
            alpha = int(inst.images[b][p])
            if alpha not in seen:
                seen.add(alpha)
                out.append((alpha, b, p))
    if len(out) < 4:
        raise ConfigurationError("the instance has fewer than four distinct commitments")
    return out[:4]


def gi_grover_simulator(spec):
    return grover_simulator(spec, gi_grover_candidates(spec))


def gi_spike_simulator(spec, perm=0):
    """Spike simulator on GI: commits to ``perm(G_0)`` and answers only when the reply is 0."""
    alpha, _, ans = gi_guess(spec, 0, perm)
    return spike_simulator(spec, alpha, lambda y: ans if y == 0 else 0)


# -- toy protocol simulators ---------------------------------------------------------


def hidden_coin_blind():
    """Zero queries: ``A = 0``, ``C = |0>``."""
    from ..protocols import hidden_coin_protocol

    return fixed_transcript_simulator(hidden_coin_protocol(), (0, 0), 0)


def hidden_coin_peek(alpha=1):
    """One query at ``alpha``; the reply is copied into both ``B`` and ``C``."""
    lay = _Layout()
    A, B, C = lay.take(1, "A1"), lay.take(1, "A2"), lay.take(1, "A3")
    steps = set_value(A, alpha) + [OracleCall(A, B), cnot(B[0], C[0])]
    return QueryAlgorithm(lay.n, steps, lay.regs, 1)


def parity_yes_simulator(k=2):
    """Honest behaviour on the parity chain: every odd message is the XOR of the two before."""
    lay = _Layout()
    regs = [lay.take(1, f"A{j}") for j in range(1, 2 * k + 2)]
    steps = hadamard(regs[0][0])
    for i in range(k):
        steps.append(OracleCall([r[0] for r in regs[: 2 * i + 1]], regs[2 * i + 1], oracle=i + 1))
        steps.append(cnot(regs[2 * i][0], regs[2 * i + 2][0]))
        steps.append(cnot(regs[2 * i + 1][0], regs[2 * i + 2][0]))
    return QueryAlgorithm(lay.n, steps, lay.regs, k)


def parity_copy_simulator(k=2):
    """Parity chain, no-instance: each odd message copies the previous oracle reply."""
    lay = _Layout()
    regs = [lay.take(1, f"A{j}") for j in range(1, 2 * k + 2)]
    steps = []
    for i in range(k):
        steps.append(OracleCall([r[0] for r in regs[: 2 * i + 1]], regs[2 * i + 1], oracle=i + 1))
        steps.append(cnot(regs[2 * i + 1][0], regs[2 * i + 2][0]))
    return QueryAlgorithm(lay.n, steps, lay.regs, k)


def regression_simulator(prefix_mode="full"):
    """Adversary for last-message hashing on the prefix-regression protocol.

    Queries the round-2 oracle at the all-zero input and sends the answer as
    ``alpha_1``; every later message is 0.  When round 2 hashes only ``alpha_3 = 0``
    the recomputed ``beta_4`` equals ``alpha_1``, so the prefix pins it down.  With
    full-prefix hashing the query point is hit only when ``alpha_1 = beta_2 = 0``.
    ``prefix_mode`` sets the oracle input width to match the hashing rule.
    """
    from ..protocols import prefix_regression_protocol

    spec = prefix_regression_protocol()
    lay = _Layout()
    regs, _ = _message_regs(spec, lay)
    Z = lay.take(spec.N(2) if prefix_mode == "full" else spec.n(3))
    return QueryAlgorithm(lay.n, [OracleCall(Z, regs[0], oracle=2)], lay.regs, 1)


# -- file format ---------------------------------------------------------------------

_RECIPES = {
    "gi_oracle_ignoring": lambda spec, r: gi_oracle_ignoring(spec, int(r.get("b", 1)), int(r.get("perm", 0))),
    "gi_query_then_answer": lambda spec, r: gi_query_then_answer(spec, int(r.get("b", 1)), int(r.get("perm", 0))),
    "gi_grover": lambda spec, r: gi_grover_simulator(spec),
    "gi_spike": lambda spec, r: gi_spike_simulator(spec, int(r.get("perm", 0))),
    "fixed": lambda spec, r: fixed_transcript_simulator(spec, tuple(r["messages"]), int(r.get("final", 0)),
                                                        int(r.get("budget", 1))),
    "hidden_coin_blind": lambda spec, r: hidden_coin_blind(),
    "hidden_coin_peek": lambda spec, r: hidden_coin_peek(int(r.get("alpha", 1))),
    "parity_yes": lambda spec, r: parity_yes_simulator(spec.k),
    "parity_copy": lambda spec, r: parity_copy_simulator(spec.k),
    "regression": lambda spec, r: regression_simulator(r.get("prefix_mode", "full")),
}


def simulator_from_json(record, spec):
    """A simulator from a circuit record (has ``steps``) or a named recipe (has ``kind``)."""
    from ..protocols.gi import gi_witness_simulator
    from ..qcore import circuit_from_json

    if "steps" in record:
        return circuit_from_json(record)
    kind = record.get("kind")
    if kind == "gi_witness":
        return gi_witness_simulator(spec)
    if kind in _RECIPES:
        return _RECIPES[kind](spec, record)
    raise ConfigurationError(f"unknown simulator recipe {kind!r}")
