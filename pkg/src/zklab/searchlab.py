"""Search-bound experiments: classical and quantum search, t-wise equivalence, the
reduction from finding ``beta_alpha`` in ``F`` to finding the 1 in ``X``.

Search algorithms are ``QueryAlgorithm``s with an output register ``"A"`` and one
oracle slot.  A planted instance ``X: {0,1}^n2 -> {0,1}`` has exactly one 1.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .config import TOL, enum_limit, fork_rng
from .errors import BudgetExceededError, ConfigurationError, DomainError, EnumerationLimitError
from .fieldhash import AllFunctions, HashFamily
from .qcore import OracleCall, PreparedAlgorithm, QueryAlgorithm, diffusion, hadamard, pauli_x, phase, ry, xor_into
from .qcore.states import register_value

C_DEFAULT = 10.0


def output_distribution(alg: QueryAlgorithm, tables, register="A"):
    """``P[row, a]``: distribution of register ``a`` for each bound table (slot 1)."""
    tables = np.asarray(tables, dtype=np.int64)
    size = tables.shape[0]
    wires = alg.register(register)
    batch, _ = PreparedAlgorithm(alg).run({1: tables} if alg.num_oracle_calls else {}, size)
    a = register_value(batch.idx, wires, alg.num_qubits)
    width = 1 << len(wires)
    flat = np.bincount(batch.rows * width + a, weights=np.abs(batch.amp) ** 2, minlength=size * width)
    return flat.reshape(size, width)


# -- classical search --------------------------------------------------------------


@dataclass
class ClassicalStrategy:
    """Deterministic decision tree: ``query(history)`` then ``output(history)``.

    ``history`` is a tuple of ``(point, value)`` pairs.  ``hit_only`` strategies look
    only at whether a value equals the target, which lets the evaluator merge all
    other values into one branch.
    """

    name: str
    query: Callable
    output: Callable
    hit_only: bool = False


def evaluate_classical(strategy: ClassicalStrategy, t, n2, beta=0):
    """Exact ``Pr[F(output) = beta]`` over a uniform random function ``F``."""
    size = 1 << n2
    p_hit = Fraction(1, size)

    def walk(history, left):
        known = dict(history)
        if left == 0:
            out = strategy.output(history)
            return Fraction(int(known[out] == beta)) if out in known else p_hit
        x = strategy.query(history)
        if x in known:
            return walk(history + ((x, known[x]),), left - 1)
        if strategy.hit_only:
            miss = (beta + 1) % size
            total = p_hit * walk(history + ((x, beta),), left - 1)
            if size > 1:
                total += (1 - p_hit) * walk(history + ((x, miss),), left - 1)
            return total
        return sum(p_hit * walk(history + ((x, v),), left - 1) for v in range(size))

    return walk((), t)


def optimal_strategy(beta=0):
    """Query ``0, 1, ..., t-1``; output a point that answered ``beta``, else an unqueried one."""

    def output(history):
        for x, v in history:
            if v == beta:
                return x
        return len(history)

    return ClassicalStrategy("optimal", lambda h: len(h), output, hit_only=True)


def classical_suite(beta=0):
    """Strategies checked against the classical bound; the first is optimal."""

    def chase_query(h):
        return h[-1][1] if h else 0

    def chase_output(h):
        return h[-1][1] if h else 0

    def last_miss(h):
        misses = [x for x, v in h if v != beta]
        return misses[-1] if misses else 0

    return [
        optimal_strategy(beta),
        ClassicalStrategy("blind", lambda h: 0, lambda h: 7, hit_only=True),
        ClassicalStrategy("repeat", lambda h: 0, lambda h: 0, hit_only=True),
        ClassicalStrategy("chase", chase_query, chase_output),
        ClassicalStrategy("contrarian", lambda h: len(h), last_miss, hit_only=True),
    ]


def classical_optimal_search(t, n2, n1=None):
    """Exact success of the optimal classical strategy with ``t`` queries, as a Fraction.

    Checked against ``1 - (1 - 2^-n2)^(t+1)`` and the weaker ``(t+1) / 2^n2``.
    """
    if t < 0:
        raise DomainError("t must be non-negative")
    n1 = max(1, t.bit_length()) if n1 is None else n1
    if t >= 1 << n1:
        raise DomainError(f"t={t} distinct queries do not fit in 2^{n1} points")
    value = evaluate_classical(optimal_strategy(), t, n2)
    closed = 1 - (1 - Fraction(1, 1 << n2)) ** (t + 1)
    if value != closed or value > Fraction(t + 1, 1 << n2):
        raise AssertionError(f"classical search value {value} disagrees with the closed form {closed}")
    return value


# -- Grover -------------------------------------------------------------------------


def planted(n2, position):
    """Truth table of ``X`` with a single 1 at ``position``."""
    if not 0 <= position < 1 << n2:
        raise DomainError(f"position {position} outside 2^{n2}")
    table = np.zeros(1 << n2, dtype=np.int64)
    table[position] = 1
    return table


def grover_algorithm(t, n2):
    """Amplitude amplification over ``n2`` wires with ``t`` phase-kickback queries."""
    if t < 0:
        raise DomainError("t must be non-negative")
    D = list(range(n2))
    y = n2
    steps = hadamard(*D) + pauli_x(y) + hadamard(y)
    for _ in range(t):
        steps += [OracleCall(D, [y]), diffusion(D)]
    return QueryAlgorithm(n2 + 1, steps, {"A": D}, t)


def grover_bound(t, n2):
    theta = np.arcsin(2.0 ** (-n2 / 2))
    return float(np.sin((2 * t + 1) * theta) ** 2)


def single_target_bound(t, n2):
    """Best planted-search success with ``t`` queries: ``sin^2(min((2t+1) theta, pi/2))``.

    Stopping early is allowed, so once ``t`` Grover iterations would overshoot the
    bound saturates at 1 rather than following ``sin^2((2t+1) theta)`` back down.
    """
    theta = np.arcsin(2.0 ** (-n2 / 2))
    return float(np.sin(min((2 * t + 1) * theta, np.pi / 2)) ** 2)


def planted_success(alg, n2):
    """Success of ``alg`` at outputting the planted position, averaged over positions."""
    tables = np.stack([planted(n2, p) for p in range(1 << n2)])
    P = output_distribution(alg, tables)
    return float(np.mean(P[np.arange(1 << n2), np.arange(1 << n2)]))


def grover_search(t, n2, c=C_DEFAULT):
    """Exact success probability of ``t``-query Grover search for one marked item."""
    if n2 > 10:
        raise DomainError("Grover search is limited to n2 <= 10")
    value = planted_success(grover_algorithm(t, n2), n2)
    if abs(value - grover_bound(t, n2)) > 1e-9:
        raise AssertionError(f"Grover success {value} differs from sin^2((2t+1) theta)")
    if t >= 1 and value > c * t * t / (1 << n2) + TOL:
        raise AssertionError(f"Grover success {value} above c t^2 / 2^n2")
    return value


def grid_algorithm(n2, angles):
    """``R(a_0)``, then per query: oracle, ``R(a_j)^T``, reflection about ``|0>``, ``R(a_j)``.

    ``R(a)`` rotates every wire by ``ry(a)``; ``a = pi/2`` throughout is Grover search.
    """
    D = list(range(n2))
    y = n2
    reflect = phase(D, [np.pi] + [0.0] * ((1 << n2) - 1))
    steps = pauli_x(y) + hadamard(y) + [ry(w, angles[0]) for w in D]
    for theta in angles[1:]:
        steps.append(OracleCall(D, [y]))
        steps += [ry(w, -theta) for w in D] + [reflect] + [ry(w, theta) for w in D]
    return QueryAlgorithm(n2 + 1, steps, {"A": D}, len(angles) - 1)


def gate_grid_sweep(t, n2, grid=None, c=C_DEFAULT):
    """Planted-search success of every grid algorithm with ``t`` queries.

    Returns rows ``(angles, success)``; the caller compares the maximum against the
    bounds.
    """
    grid = np.linspace(0, np.pi, 5) if grid is None else grid
    rows = []
    for angles in itertools.product(grid, repeat=t + 1):
        rows.append((tuple(float(a) for a in angles), planted_success(grid_algorithm(n2, angles), n2)))
    return rows


# -- t-wise equivalence --------------------------------------------------------------


def value_joint(alg, family, n1, n2, limit=None):
    """Exact distribution of ``(A, F(A))`` with ``F`` uniform over ``family``."""
    family.check_enumerable(limit)
    joint = np.zeros((1 << n1, 1 << n2))
    chunk = 1 << 14
    for start in range(0, family.size, chunk):
        idx = np.arange(start, min(family.size, start + chunk))
        tabs = family.tables(idx)
        P = output_distribution(alg, tabs)
        for a in range(1 << n1):
            joint[a] += np.bincount(tabs[:, a], weights=P[:, a], minlength=1 << n2)
    return joint / family.size


def twise_equivalence_check(alg, n1, n2, t=None, family=None, limit=None):
    """Total-variation distance between ``(A, H(A))`` and ``(A', F(A'))``.

    ``H`` is uniform over ``H(n1, n2, 2t+1)`` unless ``family`` is given; ``F`` is
    uniform over all functions.
    """
    t = alg.num_oracle_calls if t is None else t
    if alg.num_oracle_calls > t:
        raise BudgetExceededError(f"algorithm makes {alg.num_oracle_calls} queries, more than t={t}")
    family = HashFamily(n1, n2, 2 * t + 1) if family is None else family
    allf = AllFunctions(n1, n2)
    allf.check_enumerable(limit)
    P = value_joint(alg, family, n1, n2, limit)
    Q = value_joint(alg, allf, n1, n2, limit)
    return 0.5 * float(np.abs(P - Q).sum())


def equivalence_algorithms(n1=2):
    """Three fixed algorithms with 0, 1 and 2 queries into a one-bit oracle."""
    if n1 < 2:
        raise DomainError("the equivalence test algorithms need n1 >= 2")
    A = list(range(n1))
    blind = QueryAlgorithm(n1, pauli_x(A[-1]), {"A": A}, 0)
    # query 0, then send 1 or 2 depending on the answer
    X, y = list(range(n1, 2 * n1)), 2 * n1
    spike = QueryAlgorithm(2 * n1 + 1, [OracleCall(X, [y]), xor_into([y], A, lambda v: 1 if v == 0 else 2)],
                           {"A": A}, 1)
    # phase query on a superposition, interfere, then flip the low bit by F of the result
    y1, y2 = n1, n1 + 1
    steps = hadamard(*A) + pauli_x(y1) + hadamard(y1) + [OracleCall(A, [y1])] + hadamard(*A)
    steps += [OracleCall(A, [y2]), xor_into([y2], [A[-1]], lambda v: v)]
    interfere = QueryAlgorithm(n1 + 2, steps, {"A": A}, 2)
    return {"blind": blind, "spike": spike, "interfere": interfere}


# -- reduction to finding the 1 in X -------------------------------------------------


def _check_planted(X):
    X = np.asarray(X, dtype=np.int64)
    if X.ndim != 1 or int(np.count_nonzero(X)) != 1 or X.max() != 1:
        raise DomainError("X must have exactly one 1")
    return X


def gadget_algorithm(alg, beta_table, G, Z, n1, n2):
    """``alg`` with every ``F`` query replaced by the two-query ``X`` gadget.

    ``F(alpha) = beta_alpha`` if ``X(G(alpha)) = 1`` else ``Z_alpha``: compute ``G`` into
    a work register, query ``X``, write the selected value, query ``X`` again to
    uncompute, clear the work register.
    """
    beta_table, G, Z = (np.asarray(v, dtype=np.int64) for v in (beta_table, G, Z))
    if np.any(Z == beta_table):
        raise DomainError("Z_alpha must differ from beta_alpha everywhere")
    W = list(range(alg.num_qubits, alg.num_qubits + n2))
    b = alg.num_qubits + n2
    steps = []
    for s in alg.steps:
        if not isinstance(s, OracleCall):
            steps.append(s)
            continue
        if len(s.in_wires) != n1 or len(s.out_wires) != n2:
            raise ConfigurationError("oracle call does not match the n1 -> n2 widths")
        steps += [
            xor_into(s.in_wires, W, lambda a: int(G[a])),
            OracleCall(W, [b]),
            xor_into(list(s.in_wires) + [b], s.out_wires,
                     lambda v: int(beta_table[v >> 1]) if v & 1 else int(Z[v >> 1])),
            OracleCall(W, [b]),
            xor_into(s.in_wires, W, lambda a: int(G[a])),
        ]
    return QueryAlgorithm(b + 1, steps, alg.output_registers, 2 * alg.num_oracle_calls)


def induced_function(beta_table, G, Z, X):
    beta_table, G, Z, X = (np.asarray(v, dtype=np.int64) for v in (beta_table, G, Z, X))
    return np.where(X[G] == 1, beta_table, Z)


def algorithm_B(alg, beta_table, X, n1, n2, seed=0):
    """One seeded run: draw ``G`` and ``Z``, run the gadget algorithm, measure ``A'``.

    Returns ``(G(A'), number of X queries)``.
    """
    X = _check_planted(X)
    rng = fork_rng(seed, "searchlab/B")
    G = rng.integers(0, 1 << n2, size=1 << n1)
    beta_table = np.asarray(beta_table, dtype=np.int64)
    Z = (beta_table + rng.integers(1, 1 << n2, size=1 << n1)) % (1 << n2)
    gadget = gadget_algorithm(alg, beta_table, G, Z, n1, n2)
    P = output_distribution(gadget, X[None, :])[0]
    a = int(rng.choice(P.size, p=P / P.sum()))
    return int(G[a]), gadget.num_oracle_calls


def reduction_check(alg, beta_table, n1, n2, limit=None):
    """Exact averages over all ``(G, Z, X)``.

    Returns ``{"success_B", "success_F", "x_queries", "f_queries", "members"}`` where
    ``success_B = Pr[X(G(A')) = 1]`` for the gadget algorithm and ``success_F =
    Pr[F(A') = beta_A']`` for ``alg`` run directly on the induced ``F``.
    """
    beta_table = np.asarray(beta_table, dtype=np.int64)
    N, M = 1 << n1, 1 << n2
    members = (M**N) * ((M - 1) ** N) * M
    if members > enum_limit(limit):
        raise EnumerationLimitError(f"{members} (G, Z, X) combinations exceed the enumeration limit")
    sb = sf = 0.0
    xq = 0
    for G in itertools.product(range(M), repeat=N):
        G = np.array(G)
        for offs in itertools.product(range(1, M), repeat=N):
            Z = (beta_table + np.array(offs)) % M
            gadget = gadget_algorithm(alg, beta_table, G, Z, n1, n2)
            xq = max(xq, gadget.num_oracle_calls)
            Xs = np.stack([planted(n2, p) for p in range(M)])
            PB = output_distribution(gadget, Xs)
            sb += float(sum(PB[i, a] for i in range(M) for a in range(N) if Xs[i, G[a]] == 1))
            Fs = np.stack([induced_function(beta_table, G, Z, X) for X in Xs])
            PF = output_distribution(alg, Fs)
            sf += float(sum(PF[i, a] for i in range(M) for a in range(N) if Fs[i, a] == beta_table[a]))
    total = members
    return {"success_B": sb / total, "success_F": sf / total, "x_queries": xq,
            "f_queries": alg.num_oracle_calls, "members": members}


def reduction_algorithms(n1=1, n2=1):
    """Small ``F``-search algorithms for the reduction: 0 queries and 1 query."""
    A = list(range(n1))
    blind = QueryAlgorithm(n1, hadamard(*A), {"A": A}, 0)
    Y = list(range(n1, n1 + n2))
    steps = hadamard(*A) + [OracleCall(A, Y)] + hadamard(*A)
    probe = QueryAlgorithm(n1 + n2, steps, {"A": A}, 1)
    return {"blind": blind, "probe": probe}
