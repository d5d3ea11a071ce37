import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import dense_run
from zklab.errors import BudgetExceededError, ConfigurationError, DomainError
from zklab.qcore import (
    DensityMatrix,
    FunctionOracle,
    OracleCall,
    QuantumPredicate,
    QueryAlgorithm,
    StateVector,
    apply_oracle,
    circuit_from_json,
    circuit_to_json,
    cnot,
    diffusion,
    hadamard,
    measure,
    partial_trace,
    phase,
    predicate_accept,
    prepare_uniform,
    ry,
    run_query_algorithm,
    xor_into,
)


def random_state(rng, n):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v / np.linalg.norm(v))


def test_state_validation():
    with pytest.raises(DomainError):
        StateVector(np.array([1.0, 1.0]))
    with pytest.raises(ConfigurationError):
        StateVector(np.ones(3) / np.sqrt(3))


def test_oracle_is_xor_permutation_big_endian():
    f = FunctionOracle(1, 2, (2, 1))
    # |x=1>|a=0> on wires (0 | 1 2): index 0b100
    out = apply_oracle(StateVector.basis(0b100, 3), f, [0], [1, 2])
    assert np.argmax(np.abs(out.amplitudes)) == 0b101
    out = apply_oracle(StateVector.basis(0b011, 3), f, [0], [1, 2])
    assert np.argmax(np.abs(out.amplitudes)) == 0b001


def test_oracle_wire_checks():
    f = FunctionOracle(1, 1, (0, 1))
    with pytest.raises(ConfigurationError):
        apply_oracle(StateVector.zero(2), f, [0, 1], [1])
    with pytest.raises(ConfigurationError):
        apply_oracle(StateVector.zero(2), f, [0], [0])


def _mixed_algorithm():
    steps = hadamard(0, 1) + [OracleCall([0, 1], [2]), ry(3, 0.7), cnot(2, 3),
                              phase([0], [0.0, 1.1]), OracleCall([1, 3], [2], oracle=2),
                              diffusion([0, 1]), xor_into([0], [3], lambda x: x),
                              prepare_uniform([4, 5], 3)]
    return QueryAlgorithm(6, steps, {"A": [0, 1]}, 2)


def test_engine_matches_dense_tensor_simulator():
    alg = _mixed_algorithm()
    rng = np.random.default_rng(3)
    for _ in range(5):
        t1, t2 = rng.integers(0, 2, 4), rng.integers(0, 2, 4)
        rec = run_query_algorithm(alg, {1: FunctionOracle(2, 1, t1), 2: FunctionOracle(2, 1, t2)})
        ref = dense_run(alg, {1: t1, 2: t2})
        assert np.allclose(rec.state.amplitudes, ref, atol=1e-12)
        assert rec.queries == 2


def test_budget_enforced():
    with pytest.raises(BudgetExceededError):
        QueryAlgorithm(2, [OracleCall([0], [1])], {}, 0)


def test_circuit_json_roundtrip():
    alg = _mixed_algorithm()
    back = circuit_from_json(circuit_to_json(alg))
    tabs = {1: FunctionOracle(2, 1, (0, 1, 1, 0)), 2: FunctionOracle(2, 1, (1, 0, 0, 0))}
    a = run_query_algorithm(alg, tabs).state.amplitudes
    b = run_query_algorithm(back, tabs).state.amplitudes
    assert np.allclose(a, b)


def test_measure_and_partial_trace_agree():
    rng = np.random.default_rng(0)
    psi = random_state(rng, 3)
    dist = measure(psi, [0])
    assert abs(dist.total() - 1) < 1e-12
    rho = partial_trace(psi.to_density().matrix, [1, 2], 3)
    # measuring wire 0 and forgetting the outcome leaves the same reduced state
    assert np.allclose(dist.remix().matrix, rho, atol=1e-12)


def test_prepare_uniform():
    rec = run_query_algorithm(QueryAlgorithm(2, [prepare_uniform([0, 1], 3)]))
    assert np.allclose(rec.state.probabilities(), [1 / 3, 1 / 3, 1 / 3, 0])


def test_predicates():
    E = QuantumPredicate.from_diagonal([1.0, 0.0])
    rho = DensityMatrix(np.array([[0.25, 0.1], [0.1, 0.75]]))
    assert abs(predicate_accept(E, rho) - 0.25) < 1e-12
    with pytest.raises(Exception):
        QuantumPredicate(np.array([[2.0, 0], [0, 0]]))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**31 - 1))
def test_oracle_involution_property(n1, n2, seed):
    rng = np.random.default_rng(seed)
    f = FunctionOracle(n1, n2, rng.integers(0, 1 << n2, 1 << n1))
    psi = random_state(rng, n1 + n2)
    ins, outs = list(range(n1)), list(range(n1, n1 + n2))
    twice = apply_oracle(apply_oracle(psi, f, ins, outs), f, ins, outs)
    assert np.allclose(twice.amplitudes, psi.amplitudes, atol=1e-10)
