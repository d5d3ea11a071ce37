from .algorithms import algorithm_Z, algorithm_Z_k, algorithm_Z_prime, hash_families
from .diagnostics import (
    ChainLine,
    DiagnosticsReport,
    GoodSet,
    build_cheating_prover,
    closed_form_cheat,
    coin_leak_control,
    diagnose,
    good_set,
    markov_network_check,
    min_entropy_stats,
    round_table,
    verify_inequality_chain,
)
from .joint import JointDistribution, JointEntry, JointKey, build_joint, simulator_layout
from .simulators import (
    fixed_transcript_simulator,
    gi_grover_simulator,
    gi_oracle_ignoring,
    gi_query_then_answer,
    gi_spike_simulator,
    grover_simulator,
    hidden_coin_blind,
    hidden_coin_peek,
    parity_copy_simulator,
    parity_yes_simulator,
    query_then_answer_simulator,
    regression_simulator,
    simulator_from_json,
    spike_simulator,
)
from .sources import FunctionSource
