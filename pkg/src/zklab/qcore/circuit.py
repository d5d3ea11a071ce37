"""Gate vocabulary and the ``QueryAlgorithm`` circuit description.

Steps are dense unitaries on a few wires, classical reversible permutations of a
register, and oracle-call slots.  An oracle call ``OracleCall(in_wires, out_wires,
oracle=i)`` applies ``|x>|a> -> |x>|a xor f_i(x)>`` for whichever function is bound
to slot ``i`` at run time.
"""

from dataclasses import dataclass, field

import numpy as np

from ..config import TOL
from ..errors import BudgetExceededError, ConfigurationError

MAX_DENSE_WIRES = 12


def _wires(wires):
    return tuple(int(w) for w in wires)


@dataclass(frozen=True, eq=False)
class Unitary:
    wires: tuple
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "wires", _wires(self.wires))
        mat = np.asarray(self.matrix, dtype=np.complex128)
        k = len(self.wires)
        if k > MAX_DENSE_WIRES:
            raise ConfigurationError(f"dense gate on {k} wires exceeds {MAX_DENSE_WIRES}")
        if mat.shape != (1 << k, 1 << k):
            raise ConfigurationError(f"matrix shape {mat.shape} does not match {k} wires")
        if np.abs(mat.conj().T @ mat - np.eye(1 << k)).max() > 1e-9:
            raise ConfigurationError("gate matrix is not unitary")
        mat = mat.copy()
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @property
    def is_diagonal(self):
        return not np.any(self.matrix - np.diag(np.diagonal(self.matrix)))


@dataclass(frozen=True)
class Permutation:
    """Basis permutation of the register on ``wires``: ``|v> -> |table[v]>``."""

    wires: tuple
    table: tuple

    def __post_init__(self):
        object.__setattr__(self, "wires", _wires(self.wires))
        table = tuple(int(v) for v in self.table)
        if len(table) != 1 << len(self.wires) or sorted(table) != list(range(len(table))):
            raise ConfigurationError("permutation table is not a bijection on the register")
        object.__setattr__(self, "table", table)


@dataclass(frozen=True)
class OracleCall:
    in_wires: tuple
    out_wires: tuple
    oracle: int = 1

    def __post_init__(self):
        object.__setattr__(self, "in_wires", _wires(self.in_wires))
        object.__setattr__(self, "out_wires", _wires(self.out_wires))


def step_wires(step):
    if isinstance(step, OracleCall):
        return step.in_wires + step.out_wires
    return step.wires


@dataclass(frozen=True)
class QueryAlgorithm:
    num_qubits: int
    steps: tuple
    output_registers: dict = field(default_factory=dict)
    query_budget: int = 0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        regs = {name: _wires(ws) for name, ws in dict(self.output_registers).items()}
        object.__setattr__(self, "output_registers", regs)
        n = self.num_qubits
        for step in self.steps:
            ws = step_wires(step)
            if len(set(ws)) != len(ws) or any(not 0 <= w < n for w in ws):
                raise ConfigurationError(f"step {type(step).__name__} uses invalid wires {ws}")
        for name, ws in regs.items():
            if any(not 0 <= w < n for w in ws):
                raise ConfigurationError(f"output register {name} has invalid wires {ws}")
        if self.num_oracle_calls > self.query_budget:
            raise BudgetExceededError(
                f"{self.num_oracle_calls} oracle slots exceed the query budget {self.query_budget}"
            )

    @property
    def num_oracle_calls(self):
        return sum(isinstance(s, OracleCall) for s in self.steps)

    def oracle_calls(self, oracle=None):
        return [s for s in self.steps if isinstance(s, OracleCall) and (oracle is None or s.oracle == oracle)]

    def register(self, name):
        try:
            return self.output_registers[name]
        except KeyError:
            raise ConfigurationError(f"algorithm declares no output register {name!r}") from None


# -- gate helpers ------------------------------------------------------------------

_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)


def hadamard(*wires):
    return [Unitary((w,), _H) for w in wires]


def pauli_x(*wires):
    return [Permutation((w,), (1, 0)) for w in wires]


def ry(wire, theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return Unitary((wire,), [[c, -s], [s, c]])


def phase(wires, phases):
    """Diagonal unitary ``|v> -> exp(i phases[v]) |v>``."""
    return Unitary(wires, np.diag(np.exp(1j * np.asarray(phases, dtype=float))))


def cnot(control, target):
    return Permutation((control, target), (0, 1, 3, 2))


def xor_into(in_wires, out_wires, fn):
    """Reversible ``|x>|a> -> |x>|a xor fn(x)>`` as a permutation of both registers."""
    nin, nout = len(in_wires), len(out_wires)
    table = []
    for v in range(1 << (nin + nout)):
        x, a = v >> nout, v & ((1 << nout) - 1)
        table.append((x << nout) | (a ^ (fn(x) & ((1 << nout) - 1))))
    return Permutation(tuple(in_wires) + tuple(out_wires), table)


def prepare_uniform(wires, count):
    """Real Householder reflection taking ``|0>`` to the uniform superposition of ``0..count-1``."""
    dim = 1 << len(wires)
    target = np.zeros(dim)
    target[:count] = 1 / np.sqrt(count)
    v = np.zeros(dim)
    v[0] = 1.0
    v -= target
    if np.linalg.norm(v) < TOL:
        return Unitary(wires, np.eye(dim))
    return Unitary(wires, np.eye(dim) - 2 * np.outer(v, v) / np.dot(v, v))


def diffusion(wires):
    """Inversion about the uniform superposition on ``wires``."""
    dim = 1 << len(wires)
    return Unitary(wires, 2 * np.full((dim, dim), 1 / dim) - np.eye(dim))


# -- JSON --------------------------------------------------------------------------


def _matrix_to_json(mat):
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def _matrix_from_json(rows):
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def circuit_to_json(alg: QueryAlgorithm):
    steps = []
    for s in alg.steps:
        if isinstance(s, Unitary):
            steps.append({"op": "unitary", "wires": list(s.wires), "matrix": _matrix_to_json(s.matrix)})
        elif isinstance(s, Permutation):
            steps.append({"op": "permutation", "wires": list(s.wires), "table": list(s.table)})
        else:
            steps.append({"op": "oracle", "in": list(s.in_wires), "out": list(s.out_wires), "index": s.oracle})
    return {
        "num_qubits": alg.num_qubits,
        "query_budget": alg.query_budget,
        "output_registers": {k: list(v) for k, v in alg.output_registers.items()},
        "steps": steps,
    }


def circuit_from_json(record) -> QueryAlgorithm:
    steps = []
    for s in record["steps"]:
        op = s["op"]
        if op == "unitary":
            steps.append(Unitary(s["wires"], _matrix_from_json(s["matrix"])))
        elif op == "permutation":
            steps.append(Permutation(s["wires"], s["table"]))
        elif op == "oracle":
            steps.append(OracleCall(s["in"], s["out"], int(s.get("index", 1))))
        else:
            raise ConfigurationError(f"unknown circuit op {op!r}")
    return QueryAlgorithm(
        int(record["num_qubits"]),
        steps,
        record.get("output_registers", {}),
        int(record.get("query_budget", 0)),
    )
