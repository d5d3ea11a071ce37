"""Exact joint distribution of (verifier function, simulated transcript, final state).

The simulator is run against every member of a function source; its odd-message
registers and its copies of the verifier messages are measured, every other
non-output wire is traced out, and the remaining final-message register is kept as an
unnormalized density matrix.  Even messages of the transcript are then recomputed from
the verifier functions, exactly as the extraction algorithms prescribe, and the
result is merged across members keyed by

``JointKey(transcript, coins, sim, failed)``

where ``transcript`` is ``(alpha_1, beta_2, ..., alpha_{2k-1}, beta_2k)`` with the
recomputed ``beta``'s, ``coins`` are the IP verifier's coins (``None`` otherwise),
``sim`` holds the simulator's own verifier-message registers (recorded, never used for
acceptance) and ``failed`` marks a raised failure flag.
"""

from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError
from ..qcore import PreparedAlgorithm, QueryAlgorithm
from ..qcore.states import register_value

JointKey = namedtuple("JointKey", "transcript coins sim failed")

DENSE_LIMIT = 8
CHUNK_ENTRIES = 1 << 20


@dataclass
class JointEntry:
    prob: float
    accept: float
    state: np.ndarray


@dataclass
class JointDistribution:
    shape: str
    spec: object
    t: int
    entries: dict
    storage: str
    source: dict
    prefix_mode: str = "full"
    member_accept: np.ndarray = None
    queries: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def k(self):
        return self.spec.k

    @property
    def q(self):
        return float(sum(e.accept for e in self.entries.values()))

    def total(self):
        return float(sum(e.prob for e in self.entries.values()))

    def q_sigma(self):
        """Binomial standard error of ``q`` for Monte-Carlo joints (0 when exact)."""
        if self.member_accept is None:
            return 0.0
        q = min(max(self.q, 0.0), 1.0)
        return float(np.sqrt(q * (1 - q) / self.member_accept.size))

    def marginal(self, length):
        """Distribution of the first ``length`` transcript entries."""
        out = {}
        for key, e in self.entries.items():
            p = key.transcript[:length]
            out[p] = out.get(p, 0.0) + e.prob
        return out

    def conditional_state(self, transcript, coins=None, use_coins=False):
        """Mixed final state given the transcript (and coins if ``use_coins``), normalized.

        Failure branches are left out.  Returns ``(state, mass)``; state is None when
        the condition has no non-failed mass.
        """
        acc, mass = None, 0.0
        for key, e in self.entries.items():
            if key.failed or key.transcript != transcript or (use_coins and key.coins != coins):
                continue
            acc = e.state.copy() if acc is None else acc + e.state
            mass += e.prob
        if acc is None or mass <= 0:
            return None, 0.0
        return acc / mass, mass

    def with_sim(self, fn):
        """Copy with every recorded simulator register value replaced by ``fn(key)``."""
        entries = {}
        for key, e in self.entries.items():
            new = key._replace(sim=tuple(fn(key)))
            if new in entries:
                old = entries[new]
                entries[new] = JointEntry(old.prob + e.prob, old.accept + e.accept, old.state + e.state)
            else:
                entries[new] = JointEntry(e.prob, e.accept, e.state.copy())
        return JointDistribution(self.shape, self.spec, self.t, entries, self.storage, self.source,
                                 self.prefix_mode, self.member_accept, self.queries, dict(self.meta))


def _register(alg, names, width):
    for name in names:
        if name in alg.output_registers:
            wires = alg.output_registers[name]
            if len(wires) != width:
                raise ConfigurationError(f"register {name} has {len(wires)} wires, protocol needs {width}")
            return wires
    raise ConfigurationError(f"simulator declares none of the registers {names}")


def simulator_layout(alg: QueryAlgorithm, spec):
    """Wires of the odd messages, the simulator's even messages, the final message and FAIL."""
    k = spec.k
    odd, even = [], []
    short = k == 1
    for i in range(1, k + 1):
        odd.append(_register(alg, [f"A{2 * i - 1}"] + (["A"] if short else []), spec.n(2 * i - 1)))
        even.append(_register(alg, [f"A{2 * i}"] + (["B"] if short else []), spec.n(2 * i)))
    final = _register(alg, [f"A{2 * k + 1}"] + (["C"] if short else []), spec.final_length)
    fail = alg.output_registers.get("FAIL", ())
    used = set(w for ws in odd + even for w in ws) | set(final) | set(fail)
    if len(used) != sum(map(len, odd + even)) + len(final) + len(fail):
        raise ConfigurationError("simulator output registers overlap")
    work = tuple(w for w in range(alg.num_qubits) if w not in set(final) | set(fail)
                 and not any(w in ws for ws in odd + even))
    return odd, even, final, tuple(fail), work


def _recompute(spec, odd_vals, rows, round_tables, prefix_mode):
    """Hash-verifier replies on the simulated odd messages, round by round."""
    evens = []
    acc = np.zeros_like(odd_vals[0])
    for i in range(spec.k):
        acc = (acc << spec.n(2 * i + 1)) | odd_vals[i]
        inp = acc if prefix_mode == "full" else odd_vals[i]
        beta = round_tables[i][rows, inp]
        evens.append(beta)
        acc = (acc << spec.n(2 * i + 2)) | beta
    return evens


def _group_rows(cols, widths):
    """Distinct rows of the stacked integer columns and each row's group index.

    Columns are packed into one integer key when their widths fit, which is much
    faster than a row-wise unique.
    """
    if sum(widths) <= 62:
        key = np.zeros_like(cols[0])
        for c, w in zip(cols, widths):
            key = (key << w) | c
        uniq, inv = np.unique(key, return_inverse=True)
        rows = np.empty((uniq.size, len(cols)), dtype=np.int64)
        rest = uniq
        for j in range(len(cols) - 1, -1, -1):
            rows[:, j] = rest & ((1 << widths[j]) - 1)
            rest = rest >> widths[j]
        return rows, inv.reshape(-1)
    keys, inv = np.unique(np.stack(cols, axis=1), axis=0, return_inverse=True)
    return keys, inv.reshape(-1)


def build_joint(spec, alg: QueryAlgorithm, source, t, *, ip=False, prefix_mode="full", storage="auto"):
    """Run ``alg`` against every member of ``source`` and assemble the joint distribution.

    For ``ip=True`` the source yields the coin functions ``h`` and the simulator's oracle
    is ``alpha -> respond(h(alpha), alpha)``.
    """
    odd, even, final, fail, work = simulator_layout(alg, spec)
    d = 1 << len(final)
    if storage == "auto":
        storage = "dense" if len(final) <= DENSE_LIMIT else "classical"
    if storage == "classical" and not spec.classical_final:
        raise ConfigurationError("a quantum final message needs dense storage (at most 8 qubits)")
    if storage == "dense" and len(final) > DENSE_LIMIT:
        raise ConfigurationError(f"dense storage is limited to {DENSE_LIMIT} final qubits")
    prepared = PreparedAlgorithm(alg)
    n = alg.num_qubits
    weight = 1.0 / source.size
    support = max(1, prepared.prefix.idx.size)
    chunk = max(1, min(source.size, CHUNK_ENTRIES // support))
    respond = spec.respond_table() if ip else None
    widths = [spec.n(j) for j in range(1, 2 * spec.k + 1)]
    widths += [spec.coin_length + 1] + [len(w) for w in even] + [1]
    entries = {}
    member_accept = np.zeros(source.size) if source.mode == "mc" else None
    queries = 0
    for start in range(0, source.size, chunk):
        stop = min(source.size, start + chunk)
        tabs = source.tables(start, stop)
        if ip:
            coins_tab = tabs[0]
            oracle = {1: respond[coins_tab, np.arange(coins_tab.shape[1])[None, :]]}
            round_tables = [oracle[1]]
        else:
            oracle = {i + 1: tab for i, tab in enumerate(tabs)}
            round_tables = tabs
        batch, queries = prepared.run(oracle, stop - start)
        rows, idx, amp = batch.rows, batch.idx, batch.amp
        odd_vals = [register_value(idx, w, n) for w in odd]
        sim_vals = [register_value(idx, w, n) for w in even]
        evens = _recompute(spec, odd_vals, rows, round_tables, prefix_mode)
        coins = coins_tab[rows, odd_vals[0]] if ip else np.full(rows.size, -1, dtype=np.int64)
        failed = register_value(idx, fail, n) != 0 if fail else np.zeros(rows.size, dtype=bool)
        cval = register_value(idx, final, n)
        wval = register_value(idx, work, n)
        transcript_cols = [c for pair in zip(odd_vals, evens) for c in pair]
        cols = transcript_cols + [coins + 1] + sim_vals + [failed.astype(np.int64)]
        keys, inv = _group_rows(cols, widths)
        order = np.lexsort((cval, wval, rows, inv))
        inv, rows_s, wval, cval, amp = inv[order], rows[order], wval[order], cval[order], amp[order] * np.sqrt(weight)
        new_group = np.ones(inv.size, dtype=bool)
        new_group[1:] = (np.diff(inv) != 0) | (np.diff(rows_s) != 0) | (np.diff(wval) != 0)
        group = np.cumsum(new_group) - 1
        bounds = np.searchsorted(inv, np.arange(keys.shape[0] + 1))
        m = 2 * spec.k
        for j in range(keys.shape[0]):
            lo, hi = bounds[j], bounds[j + 1]
            row = keys[j]
            key = JointKey(
                tuple(int(x) for x in row[:m]),
                int(row[m]) - 1 if ip else None,
                tuple(int(x) for x in row[m + 1 : m + 1 + len(even)]),
                bool(row[-1]),
            )
            E = None if key.failed else spec.predicate(key.transcript, key.coins)
            p2 = np.abs(amp[lo:hi]) ** 2
            prob = float(p2.sum())
            if storage == "classical":
                state = np.bincount(cval[lo:hi], weights=p2, minlength=d)
                per_entry = np.zeros(hi - lo) if E is None else p2 * E.diagonal[cval[lo:hi]]
                entry_rows = rows_s[lo:hi]
            else:
                g = group[lo:hi] - group[lo]
                G = int(g[-1]) + 1
                M = np.zeros((G, d), dtype=np.complex128)
                M[g, cval[lo:hi]] = amp[lo:hi]
                entry_rows = np.zeros(G, dtype=np.int64)
                entry_rows[g] = rows_s[lo:hi]
                state = M.conj().T @ M
                if E is None:
                    per_entry = np.zeros(G)
                elif E.is_diagonal:
                    per_entry = (np.abs(M) ** 2) @ E.diagonal
                else:
                    per_entry = np.real(np.sum(M.conj() * (M @ E.matrix.T), axis=1))
            acc = float(per_entry.sum())
            if member_accept is not None:
                member_accept[start:stop] += np.bincount(entry_rows, weights=per_entry, minlength=stop - start) / weight
            old = entries.get(key)
            if old is None:
                entries[key] = JointEntry(prob, acc, state)
            else:
                old.prob += prob
                old.accept += acc
                old.state = old.state + state
    return JointDistribution(
        shape=spec.shape,
        spec=spec,
        t=t,
        entries=dict(sorted(entries.items())),
        storage=storage,
        source=source.describe(),
        prefix_mode=prefix_mode,
        member_accept=member_accept,
        queries=queries,
    )
