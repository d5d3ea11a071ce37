"""Min-entropy tables, Good sets, the cheating prover and the inequality chains.

Everything here is read off a ``JointDistribution``.  For the three-message shapes the
"round value" whose concentration matters is the recomputed verifier message (QAM)
or the coins (IP); for ``2k + 1`` messages it is the recomputed message of each round.
"""

from dataclasses import dataclass, field

import numpy as np

from ..config import TOL
from ..errors import DomainError, WrongShapeError
from ..protocols import TabulatedProver, cheating_probability
from ..qcore import DensityMatrix

TIE_TOL = 1e-15


def _value_of(key, i, ip):
    return key.coins if ip else key.transcript[2 * i - 1]


def round_table(joint, i=1):
    """``{prefix alpha_1^{2i-1}: {round value: probability}}`` for round ``i``."""
    ip = joint.shape == "IP3"
    out = {}
    for key, e in joint.entries.items():
        prefix = key.transcript[: 2 * i - 1]
        v = _value_of(key, i, ip)
        row = out.setdefault(prefix, {})
        row[v] = row.get(v, 0.0) + e.prob
    return out


def value_width(spec, i=1):
    return spec.coin_length if spec.shape == "IP3" else spec.n(2 * i)


def min_entropy_stats(joint, i=1):
    """``(s_table, expected_s, beta_table)`` for round ``i``.

    ``s_table[prefix] = max_v Pr[value = v | prefix]`` over prefixes of positive
    probability, ``expected_s`` its average under the prefix distribution, and
    ``beta_table[prefix]`` the smallest maximizing value.
    """
    s_table, beta_table, expected = {}, {}, 0.0
    for prefix, row in sorted(round_table(joint, i).items()):
        total = sum(row.values())
        if total <= 0:
            continue
        top = max(row.values())
        beta_table[prefix] = min(v for v, p in row.items() if p >= top - TIE_TOL)
        s_table[prefix] = top / total
        expected += top
    return s_table, expected, beta_table


@dataclass
class GoodSet:
    delta: float
    thresholds: list
    rounds: list
    round_masses: list
    mass: float

    @property
    def members(self):
        return self.rounds[0]

    def contains(self, transcript):
        return all(transcript[: 2 * i + 1] in good for i, good in enumerate(self.rounds))


def good_set(joint, delta, c=10.0, t=None):
    """Per-round sets ``{prefix : s <= c t^2 / (delta 2^n)}`` and the mass of their intersection."""
    if not 0 < delta <= 1:
        raise DomainError(f"delta={delta} outside (0, 1]")
    t = joint.t if t is None else t
    k = 1 if joint.shape in ("QAM3", "IP3") else joint.k
    thresholds, rounds, masses = [], [], []
    for i in range(1, k + 1):
        s_table, _, _ = min_entropy_stats(joint, i)
        thr = c * t * t / (delta * (1 << value_width(joint.spec, i)))
        members = frozenset(p for p, s in s_table.items() if s <= thr + TOL)
        marg = joint.marginal(2 * i - 1)
        thresholds.append(thr)
        rounds.append(members)
        masses.append(float(sum(p for pre, p in marg.items() if pre in members)))
    gs = GoodSet(delta, thresholds, rounds, masses, 0.0)
    gs.mass = float(sum(e.prob for key, e in joint.entries.items() if gs.contains(key.transcript)))
    return gs


# -- conditionals ----------------------------------------------------------------


def _fallback(joint):
    d = 1 << joint.spec.final_length
    if joint.storage == "dense":
        rho = np.zeros((d, d), dtype=np.complex128)
        rho[0, 0] = 1.0
        return rho
    vec = np.zeros(d)
    vec[0] = 1.0
    return vec


def _accept_of(E, state):
    if state.ndim == 1:
        return float(np.dot(E.dense().real.diagonal() if not E.is_diagonal else E.diagonal, state))
    return E.expectation(state)


class _Conditionals:
    """Cached conditional quantities of a joint."""

    def __init__(self, joint):
        self.joint = joint
        self.spec = joint.spec
        self.ip = joint.shape == "IP3"
        self.marg = {L: joint.marginal(L) for L in range(0, 2 * joint.k + 1)}
        self._states = {}
        states = {}
        for key, e in joint.entries.items():
            if key.failed:
                continue
            for cond in self._conds(key):
                s, m = states.get(cond, (None, 0.0))
                states[cond] = (e.state if s is None else s + e.state, m + e.prob)
        self.states = states
        self.fb = _fallback(joint)

    def _conds(self, key):
        yield ("T", key.transcript)
        if self.ip:
            yield ("R", key.transcript[0], key.coins)

    def final_state(self, transcript):
        """Normalized ``C | transcript`` (fallback when unseen) and its mass."""
        s, m = self.states.get(("T", tuple(transcript)), (None, 0.0))
        return (self.fb, 0.0) if s is None or m <= 0 else (s / m, m)

    def state_given_coins(self, alpha, r):
        s, m = self.states.get(("R", alpha, r), (None, 0.0))
        return (self.fb, 0.0) if s is None or m <= 0 else (s / m, m)

    def odd_conditional(self, prefix):
        """``{alpha: Pr[next odd message = alpha | prefix]}`` (empty if the prefix is unseen)."""
        L = len(prefix)
        base = self.marg[L].get(tuple(prefix), 0.0)
        if base <= 0:
            return {}
        return {p[L]: m / base for p, m in self.marg[L + 1].items() if p[:L] == tuple(prefix) and m > 0}

    def even_conditional(self, prefix, value):
        L = len(prefix)
        base = self.marg[L].get(tuple(prefix), 0.0)
        if base <= 0:
            return 0.0
        return self.marg[L + 1].get(tuple(prefix) + (value,), 0.0) / base


# -- cheating prover ---------------------------------------------------------------


def build_cheating_prover(joint, spec=None):
    """Prover replaying the joint's conditionals against the honest verifier.

    Unseen conditions fall back to message 0 and the final state ``|0><0|``.
    """
    spec = joint.spec if spec is None else spec
    cond = _Conditionals(joint)
    moves, finals = {}, {}
    for L in range(0, 2 * spec.k, 2):
        for prefix in cond.marg[L]:
            dist = cond.odd_conditional(prefix)
            if dist:
                moves[prefix] = dist
    for key in joint.entries:
        tr = key.transcript
        if tr in finals:
            continue
        state, mass = cond.final_state(tr)
        if mass <= 0:
            continue
        if state.ndim == 1:
            finals[tr] = {int(c): float(p) for c, p in enumerate(state) if p > 0}
        else:
            finals[tr] = DensityMatrix((state + state.conj().T) / 2)
    return TabulatedProver(spec, moves, finals, name="extracted cheater",
                           quantum_fallback=joint.storage == "dense")


def closed_form_cheat(joint):
    """The cheating probability written as the explicit sum over transcripts.

    QAM shapes: ``sum Pr[A_1] 2^{-n_2} Pr[A_3 | A_1^2] ... 2^{-n_2k} Tr(E rho)``, with the
    fallback on unseen prefixes.  IP3: ``sum_{alpha, r} Pr[A = alpha] 2^{-n_c}
    Tr(E_r (C | A = alpha, B = V^r(alpha)))``.
    """
    spec = joint.spec
    cond = _Conditionals(joint)
    if joint.shape == "IP3":
        total = 0.0
        nc = spec.coin_length
        for (alpha,), p in cond.marg[1].items():
            for r in range(1 << nc):
                beta = spec.response(r, alpha)
                state, _ = cond.final_state((alpha, beta))
                total += p / (1 << nc) * _accept_of(spec.predicate((alpha, beta), r), state)
        return total

    def walk(prefix, weight):
        if len(prefix) == 2 * spec.k:
            state, _ = cond.final_state(prefix)
            return weight * _accept_of(spec.predicate(prefix), state)
        dist = cond.odd_conditional(prefix) or {0: 1.0}
        width = spec.n(len(prefix) + 2)
        total = 0.0
        for alpha, pa in sorted(dist.items()):
            for beta in range(1 << width):
                total += walk(prefix + (alpha, beta), weight * pa / (1 << width))
        return total

    return walk((), 1.0)


# -- Markov network ----------------------------------------------------------------


def _trace_norm(x):
    if x.ndim == 1:
        return float(np.abs(x).sum())
    return float(np.abs(np.linalg.eigvalsh((x + x.conj().T) / 2)).sum())


def markov_network_check(joint):
    """Largest ``sum_r Pr[r | alpha, beta] || C_r - C ||_1`` over seen ``(alpha, beta)``.

    Zero means the coins ``F(alpha)`` and the final message are independent given
    ``(A', B') = (alpha, beta)``.
    """
    if joint.shape != "IP3":
        raise WrongShapeError(f"the Markov-network check needs an IP3 joint, got {joint.shape}")
    groups = {}
    for key, e in joint.entries.items():
        if key.failed:
            continue
        per_r = groups.setdefault(key.transcript, {})
        s, m = per_r.get(key.coins, (None, 0.0))
        per_r[key.coins] = (e.state if s is None else s + e.state, m + e.prob)
    worst = 0.0
    for per_r in groups.values():
        total = sum(m for _, m in per_r.values())
        if total <= 0:
            continue
        mean = sum(s for s, _ in per_r.values()) / total
        err = sum(m / total * _trace_norm(s / m - mean) for s, m in per_r.values() if m > 0)
        worst = max(worst, err)
    return worst


def coin_leak_control(joint):
    """Negative control: replace every final state by the classical coin value ``|r><r|``."""
    from .joint import JointDistribution, JointEntry

    entries = {}
    for key, e in joint.entries.items():
        d = e.state.shape[0]
        state = np.zeros_like(e.state)
        r = key.coins % d
        if state.ndim == 1:
            state[r] = e.prob
        else:
            state[r, r] = e.prob
        entries[key] = JointEntry(e.prob, e.accept, state)
    return JointDistribution(joint.shape, joint.spec, joint.t, entries, joint.storage, joint.source,
                             joint.prefix_mode, joint.member_accept, joint.queries, dict(joint.meta))


# -- inequality chains -------------------------------------------------------------


@dataclass
class ChainLine:
    name: str
    relation: str
    lhs: float
    rhs: float

    @property
    def slack(self):
        if self.relation == "=":
            return -abs(self.lhs - self.rhs)
        return self.lhs - self.rhs

    @property
    def holds(self):
        return self.slack >= -1e-10

    def to_json(self):
        return {"name": self.name, "relation": self.relation, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "holds": self.holds}


def resolve_delta(delta, q, k=1):
    """``delta = q / (2k)`` for ``"auto"``; q = 0 gives delta = 0 (the chain is then trivial)."""
    if delta == "auto" or delta is None:
        return q / (2 * k)
    delta = float(delta)
    if not 0 < delta <= 1:
        raise DomainError(f"delta={delta} outside (0, 1]")
    return delta


def _chain_three(joint, cheat, c, t, delta, q, f_joint=None):
    spec = joint.spec
    ip = joint.shape == "IP3"
    ref = f_joint if (ip and f_joint is not None) else joint
    cond = _Conditionals(ref)
    n = value_width(spec)
    factor = delta / (c * t * t)
    good = good_set(ref, delta, c, t) if delta > 0 else None
    in_good = (lambda a: a in good.members) if good else (lambda a: True)
    table = round_table(ref)
    closed = closed_form_cheat(ref)
    lines = [ChainLine("cheat_closed_form", "=", cheat, closed)]
    restricted, ratio, sbound, subst = 0.0, 0.0, 0.0, 0.0
    for (alpha,), p in sorted(ref.marginal(1).items()):
        if not in_good((alpha,)):
            continue
        row = table.get((alpha,), {})
        for v in range(1 << n):
            if ip:
                beta = spec.response(v, alpha)
                E = spec.predicate((alpha, beta), v)
                state_b, _ = cond.final_state((alpha, beta))
            else:
                beta = v
                E = spec.predicate((alpha, beta))
                state_b, _ = cond.final_state((alpha, beta))
            acc_b = _accept_of(E, state_b)
            restricted += p / (1 << n) * acc_b
            pj = row.get(v, 0.0)
            if pj <= 0:
                continue
            ratio += pj / (pj / p) / (1 << n) * acc_b
            sbound += factor * pj * acc_b
            if ip:
                state_r, _ = cond.state_given_coins(alpha, v)
                subst += factor * pj * _accept_of(E, state_r)
    acc_good = sum(e.accept for key, e in ref.entries.items() if in_good(key.transcript[:1]))
    bad = 1.0 - (good.mass if good else 1.0)
    q_ref = ref.q
    lines.append(ChainLine("restrict_to_good", ">=", closed, restricted))
    lines.append(ChainLine("ratio_rewrite", ">=", restricted, ratio))
    lines.append(ChainLine("min_entropy_bound", ">=", ratio, sbound))
    if ip:
        lines.append(ChainLine("markov_substitution", "=", sbound, subst))
        sbound = subst
    lines.append(ChainLine("joint_rewrite", ">=", sbound, factor * acc_good))
    lines.append(ChainLine("subtract_bad", ">=", factor * acc_good, factor * (q_ref - bad)))
    lines.append(ChainLine("markov_mass", ">=", factor * (q_ref - bad), factor * (q - delta)))
    return lines, good


def _chain_rounds(joint, cheat, c, t, delta, q, q_low):
    spec = joint.spec
    k = spec.k
    cond = _Conditionals(joint)
    factor = delta / (c * t * t)
    good = good_set(joint, delta, c, t) if delta > 0 else None
    closed = closed_form_cheat(joint)
    inserted = 0.0
    for prefix, p in joint.marginal(2 * k).items():
        if p <= 0 or (good and not good.contains(prefix)):
            continue
        w = cond.marg[1].get(prefix[:1], 0.0)
        for i in range(1, k + 1):
            w *= factor * cond.even_conditional(prefix[: 2 * i - 1], prefix[2 * i - 1])
            if i < k:
                w *= cond.odd_conditional(prefix[: 2 * i]).get(prefix[2 * i], 0.0)
        state, _ = cond.final_state(prefix)
        inserted += w * _accept_of(spec.predicate(prefix), state)
    acc_good = sum(e.accept for key, e in joint.entries.items() if good is None or good.contains(key.transcript))
    bad = 1.0 - (good.mass if good else 1.0)
    fk = factor**k
    return [
        ChainLine("cheat_closed_form", "=", cheat, closed),
        ChainLine("restrict_and_insert", ">=", closed, inserted),
        ChainLine("joint_rewrite", ">=", inserted, fk * acc_good),
        ChainLine("subtract_bad", ">=", fk * acc_good, fk * (joint.q - bad)),
        ChainLine("markov_mass", ">=", fk * (joint.q - bad), fk * (q_low - k * delta)),
    ], good


def verify_inequality_chain(joint, cheat, c=10.0, t=None, delta="auto", f_joint=None, q=None):
    """Instantiate every line of the soundness chain with exact quantities.

    Returns ``(lines, delta, good)``; each line carries lhs, rhs and slack.  For
    Monte-Carlo joints the final line uses the lower end of the 3-sigma interval of q.
    """
    t = joint.t if t is None else t
    q = joint.q if q is None else q
    k = 1 if joint.shape in ("QAM3", "IP3") else joint.k
    q_low = max(0.0, q - 3 * joint.q_sigma())
    delta = resolve_delta(delta, q_low, k)
    if k == 1 and joint.shape in ("QAM3", "IP3"):
        lines, good = _chain_three(joint, cheat, c, t, delta, q_low, f_joint)
    else:
        lines, good = _chain_rounds(joint, cheat, c, t, delta, q, q_low)
    final_rhs = (delta / (c * t * t)) ** k * (q_low - k * delta)
    lines.append(ChainLine("final_bound", ">=", cheat, final_rhs))
    if good is not None:
        lines.append(ChainLine("good_mass", ">=", good.mass, 1 - k * delta))
    return lines, delta, good


# -- report ------------------------------------------------------------------------


def _prefix_label(prefix):
    return "/".join(str(a) for a in prefix)


@dataclass
class DiagnosticsReport:
    shape: str
    q: float
    q_interval: tuple
    c: float
    t: int
    delta: float
    s_tables: list
    expected_s: list
    s_bounds: list
    beta_tables: list
    good_masses: list
    good_mass: float
    cheat_prob: float
    cheat_closed_form: float
    chain: list
    mode: str
    members: int
    queries: int
    optimal_cheat: float = None
    markov_error: float = None
    q_functions: float = None
    extra: dict = field(default_factory=dict)

    @property
    def chain_holds(self):
        return all(line.holds for line in self.chain)

    @property
    def s_bound_holds(self):
        return all(e <= b + TOL for e, b in zip(self.expected_s, self.s_bounds))

    @property
    def good_set_holds(self):
        k = len(self.good_masses)
        return self.good_mass >= 1 - k * self.delta - TOL

    @property
    def ceiling_holds(self):
        return self.optimal_cheat is None or self.cheat_prob <= self.optimal_cheat + TOL

    @property
    def ok(self):
        return self.chain_holds and self.ceiling_holds

    def to_json(self):
        return {
            "shape": self.shape,
            "q": self.q,
            "q_interval": list(self.q_interval),
            "c": self.c,
            "t": self.t,
            "delta": self.delta,
            "s_tables": [{_prefix_label(p): s for p, s in sorted(tab.items())} for tab in self.s_tables],
            "beta_tables": [{_prefix_label(p): b for p, b in sorted(tab.items())} for tab in self.beta_tables],
            "expected_s": self.expected_s,
            "s_bounds": self.s_bounds,
            "good_masses": self.good_masses,
            "good_mass": self.good_mass,
            "cheat_prob": self.cheat_prob,
            "cheat_closed_form": self.cheat_closed_form,
            "optimal_cheat": self.optimal_cheat,
            "markov_error": self.markov_error,
            "q_functions": self.q_functions,
            "chain": [line.to_json() for line in self.chain],
            "chain_holds": self.chain_holds,
            "s_bound_holds": self.s_bound_holds,
            "ceiling_holds": self.ceiling_holds,
            "mode": self.mode,
            "members": self.members,
            "queries": self.queries,
            "extra": self.extra,
        }


def diagnose(joint, c=10.0, delta="auto", optimal=None, f_joint=None, spec=None):
    """Build the cheating prover, all tables and the chain verdicts for ``joint``."""
    spec = joint.spec if spec is None else spec
    ref = f_joint if (joint.shape == "IP3" and f_joint is not None) else joint
    prover = build_cheating_prover(ref, spec)
    cheat = cheating_probability(prover, spec)
    closed = closed_form_cheat(ref)
    k = 1 if joint.shape in ("QAM3", "IP3") else joint.k
    t = joint.t
    s_tables, expected, betas, bounds = [], [], [], []
    for i in range(1, k + 1):
        s, e, b = min_entropy_stats(ref, i)
        s_tables.append(s)
        expected.append(e)
        betas.append(b)
        bounds.append(c * t * t / (1 << value_width(spec, i)))
    lines, delta_used, good = verify_inequality_chain(joint, cheat, c, t, delta, f_joint)
    q = joint.q
    sigma = joint.q_sigma()
    report = DiagnosticsReport(
        shape=joint.shape,
        q=q,
        q_interval=(max(0.0, q - 3 * sigma), min(1.0, q + 3 * sigma)),
        c=c,
        t=t,
        delta=delta_used,
        s_tables=s_tables,
        expected_s=expected,
        s_bounds=bounds,
        beta_tables=betas,
        good_masses=good.round_masses if good else [1.0] * k,
        good_mass=good.mass if good else 1.0,
        cheat_prob=cheat,
        cheat_closed_form=closed,
        chain=lines,
        mode=joint.source["mode"],
        members=joint.source["members"],
        queries=joint.queries,
        optimal_cheat=optimal,
    )
    if joint.shape == "IP3":
        report.markov_error = markov_network_check(ref)
        if f_joint is not None:
            report.q_functions = f_joint.q
    return report, prover
