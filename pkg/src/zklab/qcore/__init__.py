from .circuit import (
    OracleCall,
    Permutation,
    QueryAlgorithm,
    Unitary,
    circuit_from_json,
    circuit_to_json,
    cnot,
    diffusion,
    hadamard,
    pauli_x,
    phase,
    prepare_uniform,
    ry,
    xor_into,
)
from .engine import PreparedAlgorithm, RunRecord, SparseBatch, apply_oracle, run_query_algorithm
from .states import (
    DensityMatrix,
    FunctionOracle,
    OutcomeDistribution,
    QuantumPredicate,
    StateVector,
    measure,
    mix,
    partial_trace,
    predicate_accept,
)
