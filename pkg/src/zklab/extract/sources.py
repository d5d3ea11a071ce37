"""Where the verifier's functions come from: exhaustive or sampled families.

A source covers one function per protocol round.  Exact sources enumerate the product
of the round families in mixed radix (round 1 most significant); Monte-Carlo sources
draw a fixed list of function tuples from a seeded stream.  Every member carries the
same weight.
"""

import numpy as np

from ..config import enum_limit
from ..errors import ConfigurationError, EnumerationLimitError
from ..fieldhash import AllFunctions, HashFamily

CACHE_ENTRIES = 1 << 22


class FunctionSource:
    def __init__(self, families, mode="exact", samples=None, rng=None, limit=None):
        self.families = list(families)
        self.mode = mode
        if mode == "exact":
            sizes = [f.size for f in self.families]
            total = 1
            for s in sizes:
                total *= s
            cap = enum_limit(limit)
            if total > cap:
                raise EnumerationLimitError(
                    f"product of round families has {total} members, above the enumeration limit {cap}; "
                    "use Monte-Carlo mode"
                )
            self.sizes = sizes
            self.size = total
            self._cache = [
                f.tables(np.arange(f.size)) if f.size * (1 << f.n1) <= CACHE_ENTRIES and f.size < total else None
                for f in self.families
            ]
        elif mode == "mc":
            if not samples or samples < 1 or rng is None:
                raise ConfigurationError("Monte-Carlo mode needs a positive sample count and a seed")
            self.size = int(samples)
            self._draws = [self._draw(f, rng) for f in self.families]
        else:
            raise ConfigurationError(f"unknown source mode {mode!r}")

    def _draw(self, family, rng):
        if isinstance(family, HashFamily):
            return rng.integers(0, 1 << family.m, size=(self.size, family.t), dtype=np.int64)
        return rng.integers(0, 1 << family.n2, size=(self.size, 1 << family.n1), dtype=np.int64)

    def tables(self, start, stop):
        """Per-round value tables for members ``start .. stop - 1``."""
        out = []
        if self.mode == "exact":
            idx = np.arange(start, stop, dtype=np.int64)
            for j, fam in enumerate(self.families):
                below = 1
                for s in self.sizes[j + 1 :]:
                    below *= s
                members = (idx // below) % self.sizes[j]
                cached = self._cache[j]
                out.append(fam.tables(members) if cached is None else cached[members])
            return out
        for fam, draws in zip(self.families, self._draws):
            if isinstance(fam, HashFamily):
                out.append(fam.tables_from_coefficients(draws[start:stop]))
            else:
                out.append(draws[start:stop])
        return out

    def describe(self):
        fams = []
        for f in self.families:
            if isinstance(f, AllFunctions):
                fams.append({"kind": "all_functions", "n1": f.n1, "n2": f.n2})
            else:
                fams.append({"kind": "hash", "n1": f.n1, "n2": f.n2, "t": f.t})
        return {"mode": self.mode, "members": self.size, "families": fams}
