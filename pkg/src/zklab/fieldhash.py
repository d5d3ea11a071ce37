"""Arithmetic in GF(2^m) and strongly t-universal polynomial hash families.

A family ``HashFamily(n1, n2, t)`` is the set of polynomials of degree at most
``t - 1`` over GF(2^m), ``m = max(n1, n2)``.  An input ``alpha`` is embedded into
the field by zero-padding its high bits, the polynomial is evaluated with Horner's
rule and the low ``n2`` bits of the result are returned.

Functions are ordered lexicographically by their coefficient tuple
``(c0, c1, ..., c_{t-1})`` with ``c0`` the most significant digit, so the family
index of a function is the base-``2^m`` number ``c0 c1 ... c_{t-1}``.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .config import enum_limit
from .errors import DegreeMismatchError, DomainError, EnumerationLimitError

MAX_DEGREE = 16

# Lowest-weight irreducible polynomial of each degree; ties go to the smallest integer.
IRREDUCIBLE = {
    1: 0x2,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
}


def _check_degree(m):
    if not 1 <= m <= MAX_DEGREE:
        raise DomainError(f"field degree m={m} outside 1..{MAX_DEGREE}")


def clmul(a, b):
    """Carry-less product of two non-negative ints."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def reduce_poly(x, m):
    """Reduce ``x`` modulo the fixed irreducible polynomial of degree ``m``."""
    mod = IRREDUCIBLE[m]
    for bit in range(x.bit_length() - 1, m - 1, -1):
        if (x >> bit) & 1:
            x ^= mod << (bit - m)
    return x


def gf_mul(a, b, m):
    _check_degree(m)
    return reduce_poly(clmul(a, b), m)


def gf_mul_array(a, b, m):
    """Elementwise GF(2^m) product of broadcastable integer arrays."""
    _check_degree(m)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    a, b = np.broadcast_arrays(a, b)
    out = np.zeros(a.shape, dtype=np.int64)
    for i in range(m):
        out ^= np.where((b >> i) & 1, a << i, 0)
    mod = IRREDUCIBLE[m]
    for bit in range(2 * m - 2, m - 1, -1):
        out ^= np.where((out >> bit) & 1, mod << (bit - m), 0)
    return out


@dataclass(frozen=True)
class FieldElement:
    value: int
    m: int

    def __post_init__(self):
        _check_degree(self.m)
        if not 0 <= self.value < (1 << self.m):
            raise DomainError(f"value {self.value} does not fit in GF(2^{self.m})")

    def __add__(self, other):
        if self.m != other.m:
            raise DegreeMismatchError(f"GF(2^{self.m}) + GF(2^{other.m})")
        return FieldElement(self.value ^ other.value, self.m)

    __sub__ = __add__

    def __mul__(self, other):
        return field_mul(self, other)

    def __int__(self):
        return self.value


def field_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.m != b.m:
        raise DegreeMismatchError(f"cannot multiply GF(2^{a.m}) by GF(2^{b.m})")
    return FieldElement(gf_mul(a.value, b.value, a.m), a.m)


@dataclass(frozen=True)
class HashFunction:
    """One member of ``HashFamily(n1, n2, len(coefficients))``."""

    coefficients: tuple
    n1: int
    n2: int

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        if not self.coefficients:
            raise DomainError("a hash function needs at least one coefficient")
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError("message widths must be positive")
        _check_degree(self.m)
        for c in self.coefficients:
            if not 0 <= c < (1 << self.m):
                raise DomainError(f"coefficient {c} outside GF(2^{self.m})")

    @property
    def m(self):
        return max(self.n1, self.n2)

    @property
    def t(self):
        return len(self.coefficients)

    def __call__(self, alpha):
        return eval_hash(self, alpha)

    def table(self):
        """Outputs on every input, as an int64 array of length ``2**n1``."""
        return _horner_tables(np.array([self.coefficients], dtype=np.int64), self.n1, self.n2)[0]

    def to_json(self):
        return {"m": self.m, "n1": self.n1, "n2": self.n2, "coefficients": list(self.coefficients)}

    @classmethod
    def from_json(cls, record):
        h = cls(tuple(record["coefficients"]), int(record["n1"]), int(record["n2"]))
        if "m" in record and int(record["m"]) != h.m:
            raise DomainError(f"record declares m={record['m']} but max(n1, n2)={h.m}")
        return h


def eval_hash(h: HashFunction, alpha: int) -> int:
    if not 0 <= alpha < (1 << h.n1):
        raise DomainError(f"alpha={alpha} does not fit in n1={h.n1} bits")
    acc = 0
    for c in reversed(h.coefficients):
        acc = gf_mul(acc, alpha, h.m) ^ c
    return acc & ((1 << h.n2) - 1)


def _horner_tables(coeffs, n1, n2):
    """Evaluate many polynomials (rows of ``coeffs``) on every n1-bit input."""
    m = max(n1, n2)
    alphas = np.arange(1 << n1, dtype=np.int64)[None, :]
    acc = np.broadcast_to(coeffs[:, -1:], (coeffs.shape[0], 1 << n1)).copy()
    for j in range(coeffs.shape[1] - 2, -1, -1):
        acc = gf_mul_array(acc, alphas, m) ^ coeffs[:, j : j + 1]
    return acc & ((1 << n2) - 1)


@dataclass(frozen=True)
class HashFamily:
    n1: int
    n2: int
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise DomainError("independence parameter t must be at least 1")
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError("message widths must be positive")
        _check_degree(self.m)

    @property
    def m(self):
        return max(self.n1, self.n2)

    @property
    def size(self):
        return 1 << (self.m * self.t)

    def check_enumerable(self, limit=None):
        cap = enum_limit(limit)
        if self.size > cap:
            raise EnumerationLimitError(
                f"family H(n1={self.n1}, n2={self.n2}, t={self.t}) has 2^{self.m * self.t} "
                f"members, above the enumeration limit {cap}"
            )

    def coefficients(self, indices):
        """Coefficient matrix (rows c0..c_{t-1}) for an array of family indices."""
        idx = np.asarray(indices, dtype=np.int64)
        mask = (1 << self.m) - 1
        shifts = self.m * np.arange(self.t - 1, -1, -1, dtype=np.int64)
        return (idx[..., None] >> shifts) & mask

    def function(self, index):
        if not 0 <= index < self.size:
            raise DomainError(f"index {index} outside family of size {self.size}")
        return HashFunction(tuple(self.coefficients([index])[0]), self.n1, self.n2)

    def index_of(self, h: HashFunction):
        if (h.n1, h.n2, h.t) != (self.n1, self.n2, self.t):
            raise DomainError("hash function does not belong to this family")
        idx = 0
        for c in h.coefficients:
            idx = (idx << self.m) | c
        return idx

    def tables(self, indices):
        """Output tables, shape ``(len(indices), 2**n1)``, for many members at once."""
        return _horner_tables(self.coefficients(indices), self.n1, self.n2)

    def tables_from_coefficients(self, coeffs):
        """Output tables for rows of raw coefficients ``(c0, ..., c_{t-1})``."""
        return _horner_tables(np.asarray(coeffs, dtype=np.int64).reshape(-1, self.t), self.n1, self.n2)


def sample_hash(family: HashFamily, rng: np.random.Generator) -> HashFunction:
    coeffs = rng.integers(0, 1 << family.m, size=family.t)
    return HashFunction(tuple(int(c) for c in coeffs), family.n1, family.n2)


def enumerate_family(family: HashFamily, limit=None):
    """Every member once, in lexicographic coefficient order."""
    family.check_enumerable(limit)
    for index in range(family.size):
        yield family.function(index)


def all_tables(family: HashFamily, limit=None, chunk=1 << 16):
    """Yield ``(start, tables)`` chunks covering the whole enumerated family."""
    family.check_enumerable(limit)
    for start in range(0, family.size, chunk):
        stop = min(family.size, start + chunk)
        yield start, family.tables(np.arange(start, stop))


@dataclass(frozen=True)
class AllFunctions:
    """Every function {0,1}^n1 -> {0,1}^n2, indexed by its table read as base-2^n2 digits.

    Exposes the same ``size`` / ``tables`` surface as ``HashFamily`` so the two can be
    swapped wherever an oracle source is expected.
    """

    n1: int
    n2: int

    @property
    def size(self):
        return 1 << (self.n2 << self.n1)

    def check_enumerable(self, limit=None):
        cap = enum_limit(limit)
        bits = self.n2 << self.n1
        if bits > 62 or self.size > cap:
            raise EnumerationLimitError(
                f"all functions {self.n1}->{self.n2} bits: 2^{bits} tables, above the "
                f"enumeration limit {cap}"
            )

    def tables(self, indices):
        idx = np.asarray(indices, dtype=np.int64)
        shifts = self.n2 * np.arange((1 << self.n1) - 1, -1, -1, dtype=np.int64)
        return (idx[..., None] >> shifts) & ((1 << self.n2) - 1)


# -- exhaustive audits -----------------------------------------------------------


def point_uniformity(family: HashFamily, limit=None):
    """Count matrix ``counts[alpha, beta] = #{h : h(alpha) = beta}``."""
    counts = np.zeros((1 << family.n1, 1 << family.n2), dtype=np.int64)
    for _, tables in all_tables(family, limit):
        for alpha in range(1 << family.n1):
            counts[alpha] += np.bincount(tables[:, alpha], minlength=1 << family.n2)
    return counts


def universality_audit(family: HashFamily, tuple_size=None, limit=None, max_work=10**7):
    """Exhaustively test joint uniformity on every tuple of distinct inputs.

    Returns a dict with the number of tuples checked, the expected count per joint
    output and the largest absolute deviation seen (0 for a strongly universal family).
    Tuples larger than the input space are skipped, as are audits costing more than
    ``max_work`` table lookups.
    """
    k = family.t if tuple_size is None else tuple_size
    n_inputs = 1 << family.n1
    n_tuples = comb(n_inputs, k) if k <= n_inputs else 0
    if family.size * max(n_tuples, 1) > max_work:
        raise EnumerationLimitError(
            f"audit of {n_tuples} tuples over {family.size} functions exceeds {max_work}"
        )
    expected = family.size // (1 << (family.n2 * k)) if n_tuples else 0
    tables = family.tables(np.arange(family.size)) if n_tuples else None
    worst = 0
    for tup in combinations(range(n_inputs), k) if n_tuples else ():
        code = np.zeros(family.size, dtype=np.int64)
        for alpha in tup:
            code = (code << family.n2) | tables[:, alpha]
        counts = np.bincount(code, minlength=1 << (family.n2 * k))
        worst = max(worst, int(np.abs(counts - expected).max()))
    return {
        "n1": family.n1,
        "n2": family.n2,
        "t": family.t,
        "tuple_size": k,
        "family_size": family.size,
        "tuples_checked": n_tuples,
        "expected_count": expected,
        "max_deviation": worst,
        "uniform": worst == 0,
    }
