"""Quantum states, predicates, function oracles and computational-basis measurement.

Wire ``w`` of an ``n``-qubit register is bit ``n - 1 - w`` of the basis index, so
wire 0 is the most significant bit and a register read from a list of wires puts
its first wire in the most significant position.
"""

from dataclasses import dataclass, field

import numpy as np

from ..config import DEFAULT_MAX_QUBITS, EIG_TOL, TOL
from ..errors import ConfigurationError, DomainError


def _freeze(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


def register_value(index, wires, n):
    """Read the register on ``wires`` out of basis index (or index array) ``index``."""
    val = np.zeros_like(np.asarray(index, dtype=np.int64))
    for w in wires:
        val = (val << 1) | ((index >> (n - 1 - w)) & 1)
    return val


def place_value(value, wires, n):
    """Inverse of ``register_value``: the index bits that encode ``value`` on ``wires``."""
    value = np.asarray(value, dtype=np.int64)
    out = np.zeros_like(value)
    k = len(wires)
    for j, w in enumerate(wires):
        out |= ((value >> (k - 1 - j)) & 1) << (n - 1 - w)
    return out


def wires_mask(wires, n):
    mask = 0
    for w in wires:
        mask |= 1 << (n - 1 - w)
    return mask


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    max_qubits: int = field(default=DEFAULT_MAX_QUBITS, compare=False, repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size != 1 << n:
            raise ConfigurationError(f"{amps.size} amplitudes is not a power of two")
        if n > self.max_qubits:
            raise ConfigurationError(f"{n} qubits exceeds the cap of {self.max_qubits}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > TOL:
            raise DomainError(f"state norm^2 {norm!r} differs from 1")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    @property
    def num_qubits(self):
        return self.amplitudes.size.bit_length() - 1

    @classmethod
    def zero(cls, num_qubits, max_qubits=DEFAULT_MAX_QUBITS):
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(amps, max_qubits)

    @classmethod
    def basis(cls, value, num_qubits, max_qubits=DEFAULT_MAX_QUBITS):
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[value] = 1.0
        return cls(amps, max_qubits)

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def norm(self):
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def to_density(self):
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    """Possibly sub-normalized density matrix (trace at most 1)."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ConfigurationError(f"density matrix must be square, got {mat.shape}")
        dim = mat.shape[0]
        if dim & (dim - 1):
            raise ConfigurationError(f"dimension {dim} is not a power of two")
        if np.abs(mat - mat.conj().T).max(initial=0.0) > TOL:
            raise DomainError("density matrix is not Hermitian")
        tr = float(np.trace(mat).real)
        if tr > 1.0 + TOL or tr < -TOL:
            raise DomainError(f"trace {tr!r} outside [0, 1]")
        if dim <= 256 and np.linalg.eigvalsh(mat).min(initial=0.0) < -EIG_TOL:
            raise DomainError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", _freeze(mat))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def num_qubits(self):
        return self.dim.bit_length() - 1

    @property
    def trace(self):
        return float(np.trace(self.matrix).real)

    @classmethod
    def basis(cls, value, num_qubits):
        mat = np.zeros((1 << num_qubits, 1 << num_qubits), dtype=np.complex128)
        mat[value, value] = 1.0
        return cls(mat)

    @classmethod
    def from_distribution(cls, probs, num_qubits):
        """Diagonal state from a ``{basis value: probability}`` map."""
        mat = np.zeros((1 << num_qubits, 1 << num_qubits), dtype=np.complex128)
        for value, p in probs.items():
            mat[value, value] += p
        return cls(mat)

    def normalized(self):
        tr = self.trace
        if tr <= 0:
            raise DomainError("cannot normalize a zero-trace matrix")
        return DensityMatrix(self.matrix / tr)


@dataclass(frozen=True, eq=False)
class QuantumPredicate:
    """Two-outcome measurement ``0 <= E <= I``; accept probability is ``Tr(E rho)``.

    Stored either as a dense matrix or, for classical checks, as its diagonal.
    """

    matrix: np.ndarray = None
    diagonal: np.ndarray = None

    def __post_init__(self):
        if (self.matrix is None) == (self.diagonal is None):
            raise ConfigurationError("give exactly one of matrix / diagonal")
        if self.diagonal is not None:
            d = np.asarray(self.diagonal, dtype=np.float64).reshape(-1)
            if d.size & (d.size - 1):
                raise ConfigurationError(f"dimension {d.size} is not a power of two")
            if d.min(initial=0.0) < -EIG_TOL or d.max(initial=0.0) > 1 + EIG_TOL:
                raise DomainError("predicate eigenvalues outside [0, 1]")
            object.__setattr__(self, "diagonal", _freeze(d))
            return
        mat = np.asarray(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] & (mat.shape[0] - 1):
            raise ConfigurationError(f"bad predicate shape {mat.shape}")
        if np.abs(mat - mat.conj().T).max(initial=0.0) > TOL:
            raise DomainError("predicate is not Hermitian")
        ev = np.linalg.eigvalsh(mat)
        if ev.min() < -EIG_TOL or ev.max() > 1 + EIG_TOL:
            raise DomainError("predicate eigenvalues outside [0, 1]")
        object.__setattr__(self, "matrix", _freeze(mat))

    @classmethod
    def from_diagonal(cls, diag):
        return cls(diagonal=diag)

    @classmethod
    def accept_all(cls, num_qubits):
        return cls(diagonal=np.ones(1 << num_qubits))

    @classmethod
    def reject_all(cls, num_qubits):
        return cls(diagonal=np.zeros(1 << num_qubits))

    @property
    def is_diagonal(self):
        return self.diagonal is not None

    @property
    def dim(self):
        return (self.diagonal if self.is_diagonal else self.matrix).shape[0]

    def dense(self):
        return np.diag(self.diagonal).astype(np.complex128) if self.is_diagonal else self.matrix

    def entry(self, value):
        """``<value|E|value>``: acceptance of a classical basis message."""
        return float(self.diagonal[value] if self.is_diagonal else self.matrix[value, value].real)

    def expectation(self, rho):
        """Raw ``Tr(E rho)`` for a (possibly unnormalized) square matrix."""
        if self.is_diagonal:
            return float(np.dot(self.diagonal, np.real(np.diagonal(rho))))
        return float(np.real(np.trace(self.matrix @ rho)))


def predicate_accept(E: QuantumPredicate, rho) -> float:
    if isinstance(rho, StateVector):
        rho = rho.to_density()
    if E.dim != rho.dim:
        raise ConfigurationError(f"predicate dim {E.dim} vs state dim {rho.dim}")
    val = E.expectation(rho.matrix)
    if val < -EIG_TOL or val > rho.trace + EIG_TOL:
        raise DomainError(f"Tr(E rho) = {val!r} outside [0, Tr rho]")
    return min(1.0, max(0.0, val))


def mix(branches, renormalize=False) -> DensityMatrix:
    """Convex combination of ``(weight, DensityMatrix | StateVector)`` pairs."""
    total = 0.0
    acc = None
    for weight, rho in branches:
        if weight < 0:
            raise DomainError(f"negative mixture weight {weight}")
        mat = rho.to_density().matrix if isinstance(rho, StateVector) else rho.matrix
        acc = weight * mat if acc is None else acc + weight * mat
        total += weight
    if acc is None:
        raise DomainError("cannot mix an empty list of branches")
    if total > 1 + TOL and not renormalize:
        raise DomainError(f"mixture weights sum to {total} > 1")
    if renormalize:
        if total <= 0:
            raise DomainError("mixture has zero total weight")
        acc = acc / total
    return DensityMatrix(acc)


def partial_trace(rho, keep, num_qubits):
    """Reduced density matrix on the wires ``keep`` (in the given order)."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    keep = list(keep)
    drop = [w for w in range(num_qubits) if w not in keep]
    t = mat.reshape((2,) * (2 * num_qubits))
    perm = keep + drop + [num_qubits + w for w in keep] + [num_qubits + w for w in drop]
    t = t.transpose(perm)
    dk, dd = 1 << len(keep), 1 << len(drop)
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


@dataclass(frozen=True)
class FunctionOracle:
    """Truth table of ``f: {0,1}^n1 -> {0,1}^n2``."""

    n1: int
    n2: int
    table: tuple

    def __post_init__(self):
        table = tuple(int(v) for v in self.table)
        if len(table) != 1 << self.n1:
            raise ConfigurationError(f"table has {len(table)} entries, expected 2^{self.n1}")
        if any(not 0 <= v < (1 << self.n2) for v in table):
            raise DomainError(f"table values must fit in {self.n2} bits")
        object.__setattr__(self, "table", table)

    def __call__(self, x):
        return self.table[x]

    def as_array(self):
        return np.array(self.table, dtype=np.int64)

    def to_json(self):
        return list(self.table)

    @classmethod
    def from_json(cls, values, n2):
        n1 = len(values).bit_length() - 1
        return cls(n1, n2, tuple(values))


@dataclass(frozen=True)
class Branch:
    probability: float
    state: StateVector


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact Born-rule outcomes of a computational-basis measurement.

    ``residual_wires`` lists, in ascending order, the unmeasured wires that each
    branch's normalized residual state lives on.
    """

    measured_wires: tuple
    residual_wires: tuple
    outcomes: dict

    def probabilities(self):
        return {k: b.probability for k, b in self.outcomes.items()}

    def total(self):
        return sum(b.probability for b in self.outcomes.values())

    def remix(self):
        """Re-mixed residual branches: the reduced state on the unmeasured wires."""
        return mix([(b.probability, b.state) for b in self.outcomes.values()], renormalize=True)


def measure(state: StateVector, wires, cutoff=1e-14) -> OutcomeDistribution:
    n = state.num_qubits
    wires = tuple(int(w) for w in wires)
    if len(set(wires)) != len(wires) or any(not 0 <= w < n for w in wires):
        raise ConfigurationError(f"invalid measurement wires {wires} for {n} qubits")
    rest = tuple(w for w in range(n) if w not in wires)
    idx = np.arange(1 << n, dtype=np.int64)
    outcome = register_value(idx, wires, n)
    residual = register_value(idx, rest, n)
    probs = state.probabilities()
    per_outcome = np.bincount(outcome, weights=probs, minlength=1 << len(wires))
    outcomes = {}
    for value in np.nonzero(per_outcome > cutoff)[0]:
        p = float(per_outcome[value])
        amps = np.zeros(1 << len(rest), dtype=np.complex128)
        sel = outcome == value
        amps[residual[sel]] = state.amplitudes[sel] / np.sqrt(p)
        outcomes[int(value)] = Branch(p, StateVector(amps, max(state.max_qubits, len(rest))))
    return OutcomeDistribution(wires, rest, outcomes)
