"""Sparse batched simulation of query algorithms.

A ``SparseBatch`` holds many pure states at once in coordinate form: entry ``j`` says
that state ``rows[j]`` has amplitude ``amp[j]`` on basis index ``idx[j]``.  Running one
algorithm against a whole chunk of oracle tables this way keeps the cost proportional
to the support of the states rather than to ``2**num_qubits``, which is what makes
exhaustive averaging over a hash family affordable.
"""

import time
from dataclasses import dataclass

import numpy as np

from ..config import DEFAULT_MAX_QUBITS
from ..errors import BudgetExceededError, ConfigurationError
from .circuit import OracleCall, Permutation, QueryAlgorithm, Unitary
from .states import FunctionOracle, StateVector, place_value, register_value, wires_mask

PRUNE = 1e-13
KEY_BITS = 62


@dataclass
class SparseBatch:
    num_qubits: int
    size: int
    rows: np.ndarray
    idx: np.ndarray
    amp: np.ndarray

    @classmethod
    def zeros(cls, num_qubits, size=1):
        return cls(
            num_qubits,
            size,
            np.arange(size, dtype=np.int64),
            np.zeros(size, dtype=np.int64),
            np.ones(size, dtype=np.complex128),
        )

    @classmethod
    def from_state(cls, state: StateVector):
        nz = np.nonzero(state.amplitudes)[0]
        return cls(state.num_qubits, 1, np.zeros(nz.size, dtype=np.int64), nz.astype(np.int64), state.amplitudes[nz].copy())

    def tile(self, size):
        """Copy a single-state batch into ``size`` identical rows."""
        if self.size != 1:
            raise ValueError("only a single-state batch can be tiled")
        nnz = self.idx.size
        return SparseBatch(
            self.num_qubits,
            size,
            np.repeat(np.arange(size, dtype=np.int64), nnz),
            np.tile(self.idx, size),
            np.tile(self.amp, size),
        )

    def dense(self, row=0):
        out = np.zeros(1 << self.num_qubits, dtype=np.complex128)
        sel = self.rows == row
        np.add.at(out, self.idx[sel], self.amp[sel])
        return out

    def norms(self):
        return np.bincount(self.rows, weights=np.abs(self.amp) ** 2, minlength=self.size)


def _apply_unitary(batch, gate):
    n = batch.num_qubits
    vals = register_value(batch.idx, gate.wires, n)
    if gate.is_diagonal:
        amp = batch.amp * np.diagonal(gate.matrix)[vals]
        return SparseBatch(n, batch.size, batch.rows, batch.idx, amp)
    if (max(batch.size - 1, 1)).bit_length() + n > KEY_BITS:
        raise ConfigurationError(f"batch of {batch.size} states on {n} qubits is too large to key")
    clear = batch.idx & ~wires_mask(gate.wires, n)
    keys, inverse = np.unique((batch.rows << n) | clear, return_inverse=True)
    block = np.zeros((keys.size, 1 << len(gate.wires)), dtype=np.complex128)
    np.add.at(block, (inverse.reshape(-1), vals), batch.amp)
    out = block @ gate.matrix.T
    g, v = np.nonzero(np.abs(out) > PRUNE)
    base = keys[g]
    idx = (base & ((1 << n) - 1)) | place_value(v, gate.wires, n)
    return SparseBatch(n, batch.size, base >> n, idx, out[g, v])


def _apply_permutation(batch, gate):
    n = batch.num_qubits
    table = np.asarray(gate.table, dtype=np.int64)
    vals = register_value(batch.idx, gate.wires, n)
    idx = (batch.idx & ~wires_mask(gate.wires, n)) | place_value(table[vals], gate.wires, n)
    return SparseBatch(n, batch.size, batch.rows, idx, batch.amp)


def _apply_oracle(batch, call, tables):
    n = batch.num_qubits
    x = register_value(batch.idx, call.in_wires, n)
    a = register_value(batch.idx, call.out_wires, n) ^ tables[batch.rows, x]
    idx = (batch.idx & ~wires_mask(call.out_wires, n)) | place_value(a, call.out_wires, n)
    return SparseBatch(n, batch.size, batch.rows, idx, batch.amp)


def apply_step(batch, step, tables=None):
    if isinstance(step, Unitary):
        return _apply_unitary(batch, step)
    if isinstance(step, Permutation):
        return _apply_permutation(batch, step)
    if tables is None or step.oracle not in tables:
        raise ConfigurationError(f"no function bound to oracle slot {step.oracle}")
    return _apply_oracle(batch, step, tables[step.oracle])


def check_tables(alg: QueryAlgorithm, tables):
    """Validate that every bound table fits the wires of the calls that use it."""
    for call in alg.oracle_calls():
        if call.oracle not in tables:
            raise ConfigurationError(f"no function bound to oracle slot {call.oracle}")
        tab = tables[call.oracle]
        if tab.shape[-1] != 1 << len(call.in_wires):
            raise ConfigurationError(
                f"oracle {call.oracle}: table over 2^{tab.shape[-1].bit_length() - 1} inputs "
                f"but the call has {len(call.in_wires)} input wires"
            )
        if tab.size and tab.max() >= 1 << len(call.out_wires):
            raise ConfigurationError(
                f"oracle {call.oracle}: values exceed the {len(call.out_wires)} output wires"
            )


class PreparedAlgorithm:
    """An algorithm with its oracle-free prefix already simulated once."""

    def __init__(self, alg: QueryAlgorithm):
        self.alg = alg
        steps = list(alg.steps)
        first = next((i for i, s in enumerate(steps) if isinstance(s, OracleCall)), len(steps))
        batch = SparseBatch.zeros(alg.num_qubits)
        for step in steps[:first]:
            batch = apply_step(batch, step)
        self.prefix = batch
        self.tail = steps[first:]

    def run(self, tables, size):
        """Run against ``size`` oracle bindings at once; returns ``(batch, queries)``.

        ``tables`` maps an oracle slot to an int array of shape ``(size, 2**n_in)``.
        """
        tables = {k: np.asarray(v, dtype=np.int64).reshape(size, -1) for k, v in tables.items()}
        check_tables(self.alg, tables)
        batch = self.prefix.tile(size)
        queries = 0
        for step in self.tail:
            if isinstance(step, OracleCall):
                queries += 1
                if queries > self.alg.query_budget:
                    raise BudgetExceededError(f"query {queries} exceeds budget {self.alg.query_budget}")
            batch = apply_step(batch, step, tables)
        return batch, queries


@dataclass(frozen=True)
class RunRecord:
    state: StateVector
    queries: int
    elapsed: float


def _bind(f):
    if f is None:
        return {}
    if isinstance(f, FunctionOracle):
        f = {1: f}
    return {int(k): v.as_array()[None, :] for k, v in f.items()}


def run_query_algorithm(alg: QueryAlgorithm, f=None, max_qubits=DEFAULT_MAX_QUBITS) -> RunRecord:
    """Run from ``|0...0>`` with ``f`` (a FunctionOracle, or ``{slot: FunctionOracle}``) bound."""
    if alg.num_qubits > max_qubits:
        raise ConfigurationError(f"{alg.num_qubits} qubits exceeds the dense cap {max_qubits}")
    start = time.perf_counter()
    batch, queries = PreparedAlgorithm(alg).run(_bind(f), 1)
    state = StateVector(batch.dense(0), max_qubits)
    return RunRecord(state, queries, time.perf_counter() - start)


def apply_oracle(state: StateVector, f: FunctionOracle, in_wires, out_wires) -> StateVector:
    if len(in_wires) != f.n1 or len(out_wires) != f.n2:
        raise ConfigurationError(
            f"oracle {f.n1}->{f.n2} bits does not fit {len(in_wires)} input / {len(out_wires)} output wires"
        )
    call = OracleCall(in_wires, out_wires)
    used = call.in_wires + call.out_wires
    if len(set(used)) != len(used) or any(not 0 <= w < state.num_qubits for w in used):
        raise ConfigurationError(f"invalid oracle wires {used} for {state.num_qubits} qubits")
    batch = _apply_oracle(SparseBatch.from_state(state), call, f.as_array()[None, :])
    return StateVector(batch.dense(0), state.max_qubits)
