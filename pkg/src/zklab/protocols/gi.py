"""Graph Isomorphism instances of the three protocol shapes.

Graphs on ``v`` vertices are encoded as the bits of their upper triangle, pair
``(0, 1)`` most significant, then ``(0, 2)``, ..., ``(v-2, v-1)``.  Permutations are
numbered in ``itertools.permutations`` order and sent in ``ceil(log2 v!)`` bits; a
permutation ``p`` maps edge ``{i, j}`` to ``{p[i], p[j]}``.

One round of the protocol: the prover sends ``H = pi(G1)`` for a uniform ``pi``, the
verifier sends a bit ``b``, the prover answers with ``sigma`` such that
``sigma(G_b) = H``.  Knowing ``phi`` with ``phi(G0) = G1`` the honest answer is ``pi``
for ``b = 1`` and ``pi o phi`` for ``b = 0``.
"""

import dataclasses
from functools import lru_cache
from itertools import combinations, permutations
from math import ceil, factorial, log2

import numpy as np

from ..errors import ConfigurationError, DomainError, NotConstructibleError
from ..qcore import OracleCall, QuantumPredicate, QueryAlgorithm, prepare_uniform, xor_into
from .compose import parallel_compose, product_prover
from .roles import HonestProver
from .spec import ProtocolSpec, join_bits, split_bits

MAX_VERTICES = 5


def edge_pairs(v):
    return list(combinations(range(v), 2))


def graph_code(graph, v=None):
    """Encode a graph: an adjacency matrix when ``v`` is None, else an edge list on ``v`` vertices."""
    if v is None:
        arr = np.asarray(graph)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ConfigurationError("an adjacency matrix must be square; pass vertices= for edge lists")
        if not np.array_equal(arr, arr.T) or np.any(np.diagonal(arr)):
            raise DomainError("adjacency matrix must be symmetric with an empty diagonal")
        v = arr.shape[0]
        edges = {(i, j) for i, j in edge_pairs(v) if arr[i, j]}
    else:
        edges = set()
        for i, j in graph:
            i, j = sorted((int(i), int(j)))
            if i == j or not 0 <= i < j < v:
                raise DomainError(f"edge ({i}, {j}) invalid on {v} vertices")
            edges.add((i, j))
    code = 0
    for i, j in edge_pairs(v):
        code = (code << 1) | ((i, j) in edges)
    return code


def code_edges(code, v):
    pairs = edge_pairs(v)
    e = len(pairs)
    return [pairs[k] for k in range(e) if (code >> (e - 1 - k)) & 1]


@lru_cache(maxsize=None)
def all_permutations(v):
    return list(permutations(range(v)))


def perm_bits(v):
    return max(1, ceil(log2(factorial(v))))


def permute_code(code, perm, v):
    return graph_code([(perm[i], perm[j]) for i, j in code_edges(code, v)], v)


def find_isomorphism(c0, c1, v):
    """Lexicographically first ``phi`` with ``phi(G0) = G1``, or None."""
    for perm in all_permutations(v):
        if permute_code(c0, perm, v) == c1:
            return perm
    return None


def _then(pi, phi):
    """The permutation ``pi o phi``: first ``phi``, then ``pi``."""
    return tuple(pi[phi[i]] for i in range(len(phi)))


class _Instance:
    """Per-instance lookup tables shared by predicates, provers and simulators."""

    def __init__(self, c0, c1, v):
        if not 2 <= v <= MAX_VERTICES:
            raise DomainError(f"vertex count {v} outside 2..{MAX_VERTICES}")
        self.v, self.codes = v, (c0, c1)
        self.e = len(edge_pairs(v))
        self.pb = perm_bits(v)
        self.perms = all_permutations(v)
        self.index = {p: i for i, p in enumerate(self.perms)}
        self.images = [np.array([permute_code(c, p, v) for p in self.perms]) for c in (c0, c1)]
        self.witness = find_isomorphism(c0, c1, v)
        self._diag = {}

    def check_vector(self, H, b):
        """0/1 vector over permutation codes: does ``sigma(G_b) = H``?"""
        key = (H, b)
        vec = self._diag.get(key)
        if vec is None:
            vec = np.zeros(1 << self.pb)
            vec[: len(self.perms)] = self.images[b] == H
            self._diag[key] = vec
        return vec

    def valid(self, sigma, H, b):
        return sigma < len(self.perms) and self.images[b][sigma] == H

    def first_distribution(self):
        vals, counts = np.unique(self.images[1], return_counts=True)
        return {int(h): c / len(self.perms) for h, c in zip(vals, counts)}

    def honest_answer(self, pi_index, b):
        if b == 1:
            return pi_index
        return self.index[_then(self.perms[pi_index], self.witness)]

    def answer_distribution(self, H, b):
        pis = np.nonzero(self.images[1] == H)[0]
        if pis.size == 0:
            return {0: 1.0}
        out = {}
        for pi in pis:
            s = self.honest_answer(int(pi), b)
            out[s] = out.get(s, 0.0) + 1.0 / pis.size
        return out


def _base_spec(inst, shape, recipe):
    if shape == "QAM3":
        def accept(prefix):
            return QuantumPredicate.from_diagonal(inst.check_vector(prefix[0], prefix[1]))

        return ProtocolSpec("QAM3", (inst.e, 1), inst.pb, accept, eps_c=0.0, eps_s=0.5,
                            classical_final=True, name="GI", recipe=recipe)
    if shape == "IP3":
        # The verifier's message is its coin; a reply that disagrees with it is rejected.
        def accept(prefix, coins):
            alpha, beta = prefix
            if beta != coins:
                return QuantumPredicate.reject_all(inst.pb)
            return QuantumPredicate.from_diagonal(inst.check_vector(alpha, beta))

        return ProtocolSpec("IP3", (inst.e, 1), inst.pb, accept, coin_length=1,
                            respond=lambda r, alpha: r, eps_c=0.0, eps_s=0.5,
                            classical_final=True, name="GI-IP", recipe=recipe)
    raise ConfigurationError(f"GI has no parallel {shape} form; use gi_sequential")


def _honest_base(spec, inst):
    return HonestProver(
        spec,
        lambda prefix: inst.first_distribution(),
        lambda prefix: inst.answer_distribution(prefix[0], prefix[1]),
        witness=inst.witness,
    )


def gi_protocol(G0, G1, copies=1, shape="QAM3", vertices=None):
    """Parallel GI protocol; returns ``(spec, honest prover or None, witness or None)``."""
    c0, c1 = graph_code(G0, vertices), graph_code(G1, vertices)
    v = vertices if vertices is not None else np.asarray(G0).shape[0]
    inst = _Instance(c0, c1, v)
    recipe = {"kind": "gi", "shape": shape, "vertices": v, "copies": copies,
              "g0": [list(p) for p in code_edges(c0, v)], "g1": [list(p) for p in code_edges(c1, v)]}
    base = _base_spec(inst, shape, recipe if copies == 1 else None)
    spec = parallel_compose(base, copies)
    if copies > 1:
        spec = dataclasses.replace(spec, recipe=recipe, name=f"{base.name} x{copies}", _cache={})
    spec._cache[("gi",)] = inst
    if inst.witness is None:
        return spec, None, None
    honest = _honest_base(base, inst)
    prover = honest if copies == 1 else product_prover(spec, base, [honest] * copies)
    return spec, prover, inst.witness


def gi_sequential(G0, G1, rounds=2, vertices=None):
    """GI repeated sequentially as a ``(2k+1)``-message protocol.

    Message ``2i+1`` for ``0 < i < k`` carries the answer ``sigma_i`` followed by the
    next committed graph ``H_{i+1}``.
    """
    c0, c1 = graph_code(G0, vertices), graph_code(G1, vertices)
    v = vertices if vertices is not None else np.asarray(G0).shape[0]
    inst = _Instance(c0, c1, v)
    e, pb, k = inst.e, inst.pb, rounds
    lengths = [e, 1] + [pb + e, 1] * (k - 1)

    def accept(prefix):
        H, b = prefix[0], prefix[1]
        for i in range(1, k):
            sigma, H_next = split_bits(prefix[2 * i], [pb, e])
            if not inst.valid(sigma, H, b):
                return QuantumPredicate.reject_all(pb)
            H, b = H_next, prefix[2 * i + 1]
        return QuantumPredicate.from_diagonal(inst.check_vector(H, b))

    recipe = {"kind": "gi_sequential", "vertices": v, "rounds": k,
              "g0": [list(p) for p in code_edges(c0, v)], "g1": [list(p) for p in code_edges(c1, v)]}
    spec = ProtocolSpec("QAM_2k1", lengths, pb, accept, eps_c=0.0, eps_s=0.5**k,
                        classical_final=True, name=f"GI sequential x{k}", recipe=recipe)
    spec._cache[("gi",)] = inst
    if inst.witness is None:
        return spec, None, None

    def next_fn(prefix):
        if not prefix:
            return inst.first_distribution()
        H = prefix[0] if len(prefix) == 2 else split_bits(prefix[-2], [pb, e])[1]
        answers = inst.answer_distribution(H, prefix[-1])
        first = inst.first_distribution()
        return {join_bits((s, h), [pb, e]): p * q for s, p in answers.items() for h, q in first.items()}

    def final_fn(prefix):
        H = prefix[0] if len(prefix) == 2 else split_bits(prefix[-2], [pb, e])[1]
        return inst.answer_distribution(H, prefix[-1])

    return spec, HonestProver(spec, next_fn, final_fn, witness=inst.witness), inst.witness


def instance_of(spec):
    inst = spec._cache.get(("gi",))
    if inst is None:
        raise ConfigurationError(f"spec {spec.name!r} is not a GI protocol")
    return inst


# -- witness simulator ----------------------------------------------------------------


def _prepare(inst, P, H):
    """Uniform ``pi`` on ``P`` and ``H = pi(G1)`` written into ``H``."""
    n = len(inst.perms)
    return [
        prepare_uniform(P, n),
        xor_into(P, H, lambda p: int(inst.images[1][p]) if p < n else 0),
    ]


def _answer(inst, P, B, S):
    """``S ^= sigma(pi, b)`` with ``pi`` on ``P`` and ``b`` on ``B``."""
    n = len(inst.perms)

    def fn(x):
        pi, b = x >> 1, x & 1
        return inst.honest_answer(pi, b) if pi < n else 0

    return xor_into(tuple(P) + tuple(B), S, fn)


def gi_witness_simulator(spec: ProtocolSpec, witness=None) -> QueryAlgorithm:
    """Black-box simulator that runs the honest prover and asks the verifier oracle for ``b``.

    The permutation register is work space; tracing it out leaves the final message
    mixed over every ``pi`` consistent with the committed graph, as in a real run.
    """
    inst = instance_of(spec)
    if witness is None:
        witness = inst.witness
    if witness is None or permute_code(inst.codes[0], witness, inst.v) != inst.codes[1]:
        raise NotConstructibleError("the graphs are not isomorphic, or the witness is wrong")
    e, pb = inst.e, inst.pb
    if spec.shape == "QAM_2k1":
        k = spec.k
        H = [list(range(i * e, (i + 1) * e)) for i in range(k)]
        base = k * e
        B = [[base + i] for i in range(k)]
        base += k
        S = [list(range(base + i * pb, base + (i + 1) * pb)) for i in range(k)]
        base += k * pb
        P = [list(range(base + i * pb, base + (i + 1) * pb)) for i in range(k)]
        steps = [s for i in range(k) for s in _prepare(inst, P[i], H[i])]
        regs = {"A1": H[0]}
        seen = list(H[0])
        for i in range(k):
            steps.append(OracleCall(seen, B[i], oracle=i + 1))
            steps.append(_answer(inst, P[i], B[i], S[i]))
            regs[f"A{2 * i + 2}"] = B[i]
            nxt = S[i] + (H[i + 1] if i + 1 < k else [])
            regs[f"A{2 * i + 3}"] = nxt
            seen = seen + B[i] + nxt
        return QueryAlgorithm(base + k * pb, steps, regs, k)
    copies = spec.n(2)
    A = list(range(copies * e))
    B = list(range(copies * e, copies * (e + 1)))
    C = list(range(copies * (e + 1), copies * (e + 1 + pb)))
    P0 = copies * (e + 1 + pb)
    steps = []
    for c in range(copies):
        steps += _prepare(inst, range(P0 + c * pb, P0 + (c + 1) * pb), A[c * e : (c + 1) * e])
    steps.append(OracleCall(A, B, oracle=1))
    for c in range(copies):
        steps.append(_answer(inst, range(P0 + c * pb, P0 + (c + 1) * pb), [B[c]], C[c * pb : (c + 1) * pb]))
    regs = {"A": A, "B": B, "C": C, "A1": A, "A2": B, "A3": C}
    return QueryAlgorithm(P0 + copies * pb, steps, regs, 1)
