from ..errors import ConfigurationError
from .compose import kron_predicates, parallel_compose, product_prover
from .gi import gi_protocol, gi_sequential, gi_witness_simulator, graph_code
from .roles import (
    UNIFORM,
    HashArthur,
    HashIPVerifier,
    HonestArthur,
    HonestIPVerifier,
    HonestProver,
    StrategyProver,
    TabulatedProver,
    as_function_oracle,
    verifier_response,
)
from .runner import (
    TranscriptDistribution,
    cheating_probability,
    final_acceptance,
    honest_verifier,
    optimal_cheating_probability,
    run_protocol,
)
from .spec import SHAPES, ProtocolSpec, Transcript, join_bits, split_bits
from .toys import (
    conjugate_basis_protocol,
    constant_protocol,
    hidden_coin_protocol,
    parity_chain_protocol,
    prefix_regression_protocol,
)

_TOYS = {
    "hidden_coin": lambda r: hidden_coin_protocol(),
    "parity_chain": lambda r: parity_chain_protocol(int(r.get("k", 2)), bool(r.get("yes", True))),
    "prefix_regression": lambda r: prefix_regression_protocol(),
    "conjugate_basis": lambda r: conjugate_basis_protocol(),
}


def spec_from_json(record) -> ProtocolSpec:
    """Rebuild a spec from the constructor recipe written by ``ProtocolSpec.to_json``."""
    kind = record.get("kind")
    if kind == "gi":
        return gi_protocol(record["g0"], record["g1"], int(record.get("copies", 1)),
                           record.get("shape", "QAM3"), int(record["vertices"]))[0]
    if kind == "gi_sequential":
        return gi_sequential(record["g0"], record["g1"], int(record.get("rounds", 2)), int(record["vertices"]))[0]
    if kind == "compose":
        return parallel_compose(spec_from_json(record["base"]), int(record["copies"]))
    if kind == "constant":
        return constant_protocol(record.get("shape", "QAM3"), tuple(record.get("message_lengths", (1, 1))),
                                 int(record.get("final_length", 1)), bool(record.get("accept", True)),
                                 int(record.get("coin_length", 1)))
    if kind == "toy" and record.get("name") in _TOYS:
        return _TOYS[record["name"]](record)
    raise ConfigurationError(f"unknown protocol recipe {record!r}")
