"""Independent reference implementations used to freeze expected values.

Nothing here imports the code under test beyond plain data containers: field
arithmetic is schoolbook polynomial long division, the simulator contracts dense
tensors, and acceptance probabilities are direct sums.
"""

import itertools

import numpy as np


# -- GF(2^m) ---------------------------------------------------------------------


def poly_mod(x, mod):
    dm = mod.bit_length() - 1
    while x.bit_length() - 1 >= dm:
        x ^= mod << (x.bit_length() - 1 - dm)
    return x


def poly_mul(a, b, mod):
    out = 0
    for i in range(b.bit_length()):
        if (b >> i) & 1:
            out ^= a << i
    return poly_mod(out, mod)


def is_irreducible(mod):
    """No factor of degree 1 .. deg/2 (trial division over all polynomials)."""
    d = mod.bit_length() - 1
    if d == 1:
        return True
    for f in range(2, 1 << (d // 2 + 1)):
        if f.bit_length() - 1 >= 1 and poly_mod(mod, f) == 0:
            return False
    return True


def hash_value(coeffs, alpha, n2, mod):
    """``sum_j c_j alpha^j`` in GF(2)[x]/mod, low ``n2`` bits."""
    acc, power = 0, 1
    for c in coeffs:
        acc ^= poly_mul(c, power, mod)
        power = poly_mul(power, alpha, mod)
    return acc & ((1 << n2) - 1)


# -- dense tensor simulator --------------------------------------------------------


def _apply_matrix(psi, n, wires, U):
    k = len(wires)
    t = psi.reshape((2,) * n)
    t = np.moveaxis(t, wires, range(k))
    shape = t.shape
    t = (U @ t.reshape(1 << k, -1)).reshape(shape)
    return np.moveaxis(t, range(k), wires).reshape(-1)


def _perm_matrix(table):
    P = np.zeros((len(table), len(table)))
    for v, w in enumerate(table):
        P[w, v] = 1
    return P


def dense_run(alg, tables=None):
    """Statevector of ``alg`` from |0..0>; ``tables`` maps oracle slot -> truth table."""
    from zklab.qcore import OracleCall, Permutation

    n = alg.num_qubits
    psi = np.zeros(1 << n, dtype=complex)
    psi[0] = 1
    for s in alg.steps:
        if isinstance(s, OracleCall):
            tab = tables[s.oracle]
            nin, nout = len(s.in_wires), len(s.out_wires)
            table = [(x << nout) | (a ^ int(tab[x])) for x in range(1 << nin) for a in range(1 << nout)]
            psi = _apply_matrix(psi, n, list(s.in_wires) + list(s.out_wires), _perm_matrix(table))
        elif isinstance(s, Permutation):
            psi = _apply_matrix(psi, n, list(s.wires), _perm_matrix(s.table))
        else:
            psi = _apply_matrix(psi, n, list(s.wires), np.asarray(s.matrix))
    return psi


def register_tensor(psi, n, groups):
    """Reshape amplitudes into one axis per wire group (big-endian), rest last."""
    t = psi.reshape((2,) * n)
    used = [w for g in groups for w in g]
    rest = [w for w in range(n) if w not in used]
    t = np.transpose(t, used + rest)
    return t.reshape([1 << len(g) for g in groups] + [-1])


# -- direct acceptance sums --------------------------------------------------------


def direct_q_three(spec, alg, tables, ip=False):
    """``mean_h sum_alpha Tr(E_{alpha, h(alpha)} rho_{h, alpha})`` for three messages.

    ``tables`` is a list of truth tables (hash to the verifier message, or to coins
    for ``ip``).  Registers are read by name: A1/A, A2/B, A3/C.
    """
    regs = alg.output_registers
    A = regs.get("A1", regs.get("A"))
    C = regs.get("A3", regs.get("C"))
    n = alg.num_qubits
    total = 0.0
    for h in tables:
        h = np.asarray(h)
        oracle = np.array([spec.response(h[a], a) for a in range(len(h))]) if ip else h
        psi = dense_run(alg, {1: oracle})
        T = register_tensor(psi, n, [A, C])
        for a in range(T.shape[0]):
            M = T[a]
            rho = M @ M.conj().T
            if ip:
                E = spec.predicate((a, spec.response(h[a], a)), int(h[a]))
            else:
                E = spec.predicate((a, int(h[a])))
            total += float(np.real(np.trace(E.dense() @ rho)))
    return total / len(tables)


# -- protocols --------------------------------------------------------------------


def gi_optimal_single(c0, c1, v):
    """Best single-copy GI cheating probability, by brute force over graphs and answers."""
    pairs = list(itertools.combinations(range(v), 2))

    def image(code, p):
        edges = {pairs[k] for k in range(len(pairs)) if (code >> (len(pairs) - 1 - k)) & 1}
        moved = {tuple(sorted((p[i], p[j]))) for i, j in edges}
        return sum(1 << (len(pairs) - 1 - k) for k, e in enumerate(pairs) if e in moved)

    perms = list(itertools.permutations(range(v)))
    best = 0.0
    for H in range(1 << len(pairs)):
        wins = sum(any(image(g, p) == H for p in perms) for g in (c0, c1))
        best = max(best, wins / 2)
    return best


def binomial_closed_form(t, n2):
    """Optimal classical search: ``1 - (1 - 2^-n2)^(t+1)``."""
    return 1 - (1 - 2.0**-n2) ** (t + 1)
