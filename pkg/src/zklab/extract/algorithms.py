"""The three extraction algorithms.

Each one runs a black-box simulator against hash verifiers drawn from a
``(2t+1)``-wise independent family, recomputes the verifier messages of the simulated
transcript with the drawn functions, and feeds the result to the honest predicate.
All three return ``(q, joint, report)``.
"""

from ..config import fork_rng
from ..errors import BudgetExceededError, EnumerationLimitError, WrongShapeError
from ..fieldhash import AllFunctions, HashFamily
from ..protocols import optimal_cheating_probability
from .diagnostics import diagnose
from .joint import build_joint
from .sources import FunctionSource


def hash_families(spec, t, prefix_mode="full"):
    """Round families ``H(domain, width, 2t+1)`` the hash verifiers are drawn from."""
    d = 2 * t + 1
    if spec.shape == "IP3":
        return [HashFamily(spec.n(1), spec.coin_length, d)]
    fams = []
    for i in range(1, spec.k + 1):
        width = spec.N(i) if prefix_mode == "full" else spec.n(2 * i - 1)
        fams.append(HashFamily(width, spec.n(2 * i), d))
    return fams


def _check(spec, alg, t, shapes):
    if spec.shape not in shapes:
        raise WrongShapeError(f"this algorithm needs a {' or '.join(shapes)} spec, got {spec.shape}")
    if t < 1:
        raise BudgetExceededError("the query bound t must be at least 1")
    if alg.num_oracle_calls > t:
        raise BudgetExceededError(f"simulator makes {alg.num_oracle_calls} oracle queries, more than t={t}")


def _source(families, mode, samples, seed, limit, label):
    if mode == "exact":
        return FunctionSource(families, "exact", limit=limit)
    return FunctionSource(families, "mc", samples=samples, rng=fork_rng(seed, label))


def _optimal(spec, optimal):
    if optimal is True:
        return optimal_cheating_probability(spec)[0]
    if optimal in (False, None):
        return None
    return float(optimal)


def _finish(joint, c, delta, optimal, spec, f_joint=None, **extra):
    report, _ = diagnose(joint, c, delta, _optimal(spec, optimal), f_joint=f_joint)
    report.extra.update(extra)
    return joint.q, joint, report


def algorithm_Z(spec, S, t=1, c=10.0, delta="auto", mode="exact", samples=4096, seed=0,
                limit=None, optimal=True):
    """Three-message public-coin extraction: accept on ``(A, H(A), C)``."""
    _check(spec, S, t, ("QAM3",))
    source = _source(hash_families(spec, t), mode, samples, seed, limit, "extract/zq3")
    joint = build_joint(spec, S, source, t)
    return _finish(joint, c, delta, optimal, spec, algorithm="Z")


def algorithm_Z_prime(spec, S, t=1, c=10.0, delta="auto", mode="exact", samples=4096, seed=0,
                      limit=None, optimal=True):
    """Private-coin version: ``H`` hashes the first message to coins.

    When every function ``{0,1}^n1 -> {0,1}^nc`` can be enumerated, a second joint over
    all of them is built as well; the Markov-network check, the s table and the chain
    are then read off that one.
    """
    _check(spec, S, t, ("IP3",))
    source = _source(hash_families(spec, t), mode, samples, seed, limit, "extract/zip3")
    joint = build_joint(spec, S, source, t, ip=True)
    allf = AllFunctions(spec.n(1), spec.coin_length)
    try:
        allf.check_enumerable(limit)
        f_joint = build_joint(spec, S, FunctionSource([allf], "exact", limit=limit), t, ip=True)
    except EnumerationLimitError:
        f_joint = None
    return _finish(joint, c, delta, optimal, spec, f_joint=f_joint, algorithm="Z'")


def algorithm_Z_k(spec, S, t=1, c=10.0, delta="auto", mode="exact", samples=4096, seed=0,
                  limit=None, optimal=True, prefix_mode="full"):
    """``2k+1``-message extraction with one hash per round.

    ``prefix_mode="last"`` hashes only the latest prover message instead of the whole
    preceding transcript; it exists to show why that shortcut is unsound.
    """
    _check(spec, S, t, ("QAM_2k1", "QAM3"))
    source = _source(hash_families(spec, t, prefix_mode), mode, samples, seed, limit, "extract/zk")
    joint = build_joint(spec, S, source, t, prefix_mode=prefix_mode)
    return _finish(joint, c, delta, optimal, spec, algorithm="Z_k", prefix_mode=prefix_mode)
