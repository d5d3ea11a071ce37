"""Process-wide knobs: enumeration cap, qubit cap, tolerances, seeded streams."""

import os
import zlib

import numpy as np

DEFAULT_ENUM_LIMIT = 2**20
DEFAULT_MAX_QUBITS = 20

# exact-arithmetic claims vs eigenvalue checks
TOL = 1e-10
EIG_TOL = 1e-8


def enum_limit(limit=None):
    """Resolve the enumeration cap: explicit argument, then ZKLAB_ENUM_LIMIT, then 2**20."""
    if limit is not None:
        return int(limit)
    env = os.environ.get("ZKLAB_ENUM_LIMIT")
    if env:
        return int(float(env))
    return DEFAULT_ENUM_LIMIT


def fork_rng(seed, label):
    """Deterministic child stream of ``seed`` keyed by a text label."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(zlib.crc32(label.encode()),))
    return np.random.default_rng(ss)
