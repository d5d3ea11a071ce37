import itertools
from fractions import Fraction

import numpy as np
import pytest

from oracles import binomial_closed_form, dense_run, register_tensor
from zklab.errors import BudgetExceededError, DomainError
from zklab.fieldhash import HashFamily
from zklab.searchlab import (
    algorithm_B,
    classical_optimal_search,
    classical_suite,
    equivalence_algorithms,
    evaluate_classical,
    gate_grid_sweep,
    grover_algorithm,
    grover_bound,
    grover_search,
    planted,
    reduction_algorithms,
    reduction_check,
    single_target_bound,
    twise_equivalence_check,
)


def _brute_classical(strategy, t, n2, n1):
    """Average over every F: {0,1}^n1 -> {0,1}^n2 by running the decision tree."""
    wins = 0
    for table in itertools.product(range(1 << n2), repeat=1 << n1):
        history = ()
        for _ in range(t):
            x = strategy.query(history)
            history += ((x, table[x]),)
        wins += table[strategy.output(history)] == 0
    return Fraction(wins, (1 << n2) ** (1 << n1))


@pytest.mark.parametrize("t,n2", [(0, 1), (1, 1), (1, 2), (2, 2), (3, 1)])
def test_classical_suite_matches_brute_force(t, n2):
    n1 = 3
    for strat in classical_suite():
        assert evaluate_classical(strat, t, n2) == _brute_classical(strat, t, n2, n1), strat.name


def test_classical_optimum_and_domain():
    assert classical_optimal_search(1, 2) == Fraction(7, 16)
    assert float(classical_optimal_search(3, 3)) == pytest.approx(binomial_closed_form(3, 3), abs=1e-15)
    with pytest.raises(DomainError):
        classical_optimal_search(4, 2, n1=2)
    best = max(evaluate_classical(s, 2, 2) for s in classical_suite())
    assert best == classical_optimal_search(2, 2)


@pytest.mark.parametrize("t,n2", [(1, 2), (2, 3), (3, 4)])
def test_grover_matches_dense_simulation(t, n2):
    alg = grover_algorithm(t, n2)
    pos = (1 << n2) - 1
    psi = dense_run(alg, {1: planted(n2, pos)})
    T = register_tensor(psi, alg.num_qubits, [alg.register("A")])
    p = float(np.sum(np.abs(T[pos]) ** 2))
    assert abs(p - grover_bound(t, n2)) < 1e-10
    assert abs(grover_search(t, n2) - p) < 1e-10


def test_single_target_bound_saturates():
    # two iterations on four items overshoot: the formula falls back to 0.25
    assert grover_bound(2, 2) == pytest.approx(0.25)
    assert single_target_bound(2, 2) == 1.0
    assert single_target_bound(1, 4) == pytest.approx(grover_bound(1, 4))


@pytest.mark.parametrize("t", [1, 2])
@pytest.mark.parametrize("n2", [1, 2, 3])
def test_grid_never_beats_bounds(t, n2):
    best = max(s for _, s in gate_grid_sweep(t, n2))
    assert best <= single_target_bound(t, n2) + 1e-9
    assert best <= 10 * t * t / 2**n2 + 1e-12


def test_equivalence_and_control():
    algs = equivalence_algorithms(2)
    for name, alg in algs.items():
        assert twise_equivalence_check(alg, 2, 1, t=2) <= 1e-10, name
    control = [twise_equivalence_check(alg, 2, 1, t=2, family=HashFamily(2, 1, 1)) for alg in algs.values()]
    assert max(control) > 1e-3
    with pytest.raises(BudgetExceededError):
        twise_equivalence_check(algs["interfere"], 2, 1, t=1)


@pytest.mark.parametrize("name", ["blind", "probe"])
def test_reduction(name):
    alg = reduction_algorithms()[name]
    beta = np.array([1, 0])
    res = reduction_check(alg, beta, 1, 1)
    assert res["x_queries"] <= 2 * max(1, alg.num_oracle_calls)
    assert abs(res["success_B"] - res["success_F"]) < 1e-10
    g, xq = algorithm_B(alg, beta, planted(1, 1), 1, 1, seed=2)
    assert g in (0, 1) and xq == 2 * alg.num_oracle_calls
    assert algorithm_B(alg, beta, planted(1, 1), 1, 1, seed=2) == (g, xq)


def test_planted_domain():
    with pytest.raises(DomainError):
        planted(2, 4)
