import numpy as np
import pytest

from oracles import gi_optimal_single
from zklab.errors import ConfigurationError, DomainError, NotOracleRepresentableError, ProtocolOrderError
from zklab.fieldhash import HashFamily, HashFunction
from zklab.protocols import (
    HashArthur,
    HashIPVerifier,
    HonestArthur,
    TabulatedProver,
    as_function_oracle,
    cheating_probability,
    gi_protocol,
    gi_sequential,
    graph_code,
    hidden_coin_protocol,
    honest_verifier,
    optimal_cheating_probability,
    parallel_compose,
    parity_chain_protocol,
    product_prover,
    run_protocol,
    spec_from_json,
    verifier_response,
)

P3 = [(0, 1), (1, 2)]
P3_ALT = [(0, 2), (1, 2)]
K3 = [(0, 1), (0, 2), (1, 2)]
C4 = [(0, 1), (1, 2), (2, 3), (0, 3)]
STAR = [(0, 1), (0, 2), (0, 3)]


@pytest.mark.parametrize("copies", [1, 2])
def test_gi_honest_completeness(copies):
    spec, prover, witness = gi_protocol(P3, P3_ALT, copies, vertices=3)
    assert witness is not None
    dist = run_protocol(spec, prover, HonestArthur(spec))
    assert abs(dist.acceptance - 1) < 1e-12
    assert abs(dist.total() - 1) < 1e-12
    assert spec.n(2) == copies


@pytest.mark.parametrize("g0,g1,v", [(P3, K3, 3), (C4, STAR, 4)])
def test_gi_optimal_cheat_matches_brute_force(g0, g1, v):
    spec, prover, _ = gi_protocol(g0, g1, vertices=v)
    assert prover is None
    best, cheater = optimal_cheating_probability(spec)
    expected = gi_optimal_single(graph_code(g0, v), graph_code(g1, v), v)
    assert expected == 0.5
    assert abs(best - expected) < 1e-12
    assert abs(cheating_probability(cheater, spec) - best) < 1e-12


def test_composition_multiplies_soundness():
    base, _, _ = gi_protocol(P3, K3, vertices=3)
    _, cheater = optimal_cheating_probability(base)
    spec = parallel_compose(base, 3)
    assert spec.n(2) == 3
    prover = product_prover(spec, base, [cheater] * 3)
    assert abs(cheating_probability(prover, spec) - 1 / 8) < 1e-10
    assert parallel_compose(base, 1).message_lengths == base.message_lengths
    with pytest.raises(DomainError):
        parallel_compose(base, 0)


def test_honest_arthur_marginal_uniform():
    spec, prover, _ = gi_protocol(P3, P3_ALT, 2, vertices=3)
    marg = run_protocol(spec, prover, HonestArthur(spec)).message_marginal(2)
    assert np.allclose(sorted(marg.values()), [0.25] * 4)


def test_hash_verifier_average_equals_honest():
    spec, prover, _ = gi_protocol(P3, P3_ALT, vertices=3)
    honest = run_protocol(spec, prover, HonestArthur(spec))
    fam = HashFamily(spec.n(1), spec.n(2), 3)
    avg = {}
    for idx in range(fam.size):
        d = run_protocol(spec, prover, HashArthur(spec, [fam.function(idx)]))
        for key, (p, _, _) in d.entries.items():
            avg[key] = avg.get(key, 0.0) + p / fam.size
    for key, (p, _, _) in honest.entries.items():
        assert abs(avg.get(key, 0.0) - p) < 1e-12


def test_hash_arthur_point_mass_and_prefix_dependence():
    spec = parity_chain_protocol(2)
    zero = HashFunction((0,), 1, 1)
    fam = HashFamily(3, 1, 3)
    # a generic member separates prefixes that differ only in alpha_1
    h2 = next(fam.function(i) for i in range(fam.size) if fam.function(i)(0b000) != fam.function(i)(0b100))
    v = HashArthur(spec, [zero, h2])
    assert verifier_response(v, (1,)) == 0
    # round 2 sees (alpha_1, alpha_2, alpha_3) jointly
    changed = any(verifier_response(v, (0, 0, a3)) != verifier_response(v, (1, 0, a3)) for a3 in (0, 1))
    assert changed
    with pytest.raises(ProtocolOrderError):
        verifier_response(v, (0, 0))


def test_function_oracles():
    spec = hidden_coin_protocol()
    with pytest.raises(NotOracleRepresentableError):
        as_function_oracle(HonestArthur(parity_chain_protocol(1)))
    h = HashFunction((1, 0), 1, 1)
    f = as_function_oracle(HashIPVerifier(spec, h))
    assert f.n2 == spec.n(2)
    assert list(f.table) == [spec.response(h(a), a) for a in range(2)]
    seq, _, _ = gi_sequential(P3, P3_ALT, 2, vertices=3)
    assert seq.N(2) == seq.n(1) + seq.n(2) + seq.n(3)


def test_ip_gi_response_is_the_coin():
    spec, _, _ = gi_protocol(P3, K3, shape="IP3", vertices=3)
    fam = HashFamily(spec.n(1), spec.coin_length, 3)
    h = fam.function(77)
    f = as_function_oracle(HashIPVerifier(spec, h))
    assert list(f.table) == list(h.table())


@pytest.mark.parametrize("k", [1, 2])
def test_parity_chain_values(k):
    assert abs(optimal_cheating_probability(parity_chain_protocol(k, True))[0] - 1) < 1e-12
    assert abs(optimal_cheating_probability(parity_chain_protocol(k, False))[0] - 0.5**k) < 1e-12


def test_tabulated_prover_rejects_bad_distribution():
    spec = parity_chain_protocol(1)
    bad = TabulatedProver(spec, {(): {0: 0.5}}, {})
    with pytest.raises(ConfigurationError):
        run_protocol(spec, bad, honest_verifier(spec))


def test_sampled_mode_is_seeded():
    spec, prover, _ = gi_protocol(P3, P3_ALT, vertices=3)
    a = run_protocol(spec, prover, HonestArthur(spec), "sampled", np.random.default_rng(4))
    b = run_protocol(spec, prover, HonestArthur(spec), "sampled", np.random.default_rng(4))
    assert a == b and a.accepted


@pytest.mark.parametrize("build", [
    lambda: gi_protocol(P3, K3, 2, vertices=3)[0],
    lambda: gi_sequential(P3, P3_ALT, 2, vertices=3)[0],
    lambda: parity_chain_protocol(2, False),
    hidden_coin_protocol,
])
def test_spec_json_roundtrip(build):
    spec = build()
    back = spec_from_json(spec.to_json())
    assert back.shape == spec.shape and back.message_lengths == spec.message_lengths
    assert abs(optimal_cheating_probability(back)[0] - optimal_cheating_probability(spec)[0]) < 1e-12
