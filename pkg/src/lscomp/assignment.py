"""Data-assignment matrices and the communication-cost rational.

An assignment is an N x K pattern of assigned/unassigned cells: row n is a
worker, column k a dataset, and every dataset must be held by at least one
worker (otherwise the task is not losslessly computable). Worker and dataset
indices are 1-based on all public surfaces.

File format (.dam): '#'-prefixed comment lines are ignored; every other
non-blank line is one worker row of '*' (assigned) and '0' cells, optionally
space-separated.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from math import gcd
from pathlib import Path


class AssignmentError(ValueError):
    """Malformed or invalid assignment input."""


@dataclass(frozen=True)
class Cost:
    """Per-worker communication cost p/q in message lengths, reduced, > 0.

    Each worker sends p linear combinations of q-way message pieces. All
    comparisons against costs are exact integer cross-multiplications; no
    floats anywhere.
    """

    p: int
    q: int = 1

    def __post_init__(self):
        if self.p <= 0 or self.q <= 0:
            raise ValueError(f"cost must be positive, got {self.p}/{self.q}")
        g = gcd(self.p, self.q)
        if g > 1:
            object.__setattr__(self, "p", self.p // g)
            object.__setattr__(self, "q", self.q // g)

    @classmethod
    def parse(cls, text: str) -> "Cost":
        s = text.strip()
        if "/" in s:
            ps, qs = s.split("/", 1)
            try:
                return cls(int(ps), int(qs))
            except ValueError as exc:
                raise ValueError(f"bad cost {text!r}: {exc}") from None
        try:
            return cls(int(s))
        except ValueError:
            raise ValueError(f"bad cost {text!r}: expected an integer or p/q") from None

    @classmethod
    def from_fraction(cls, fr: Fraction) -> "Cost":
        return cls(fr.numerator, fr.denominator)

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def validate_for(self, assignment: "Assignment"):
        """Costs above the largest per-worker support are out of model range."""
        cap = assignment.max_support_size()
        if self.p > self.q * cap:
            raise ValueError(
                f"cost {self} exceeds the largest worker support ({cap} datasets)"
            )

    def __str__(self):
        return f"{self.p}" if self.q == 1 else f"{self.p}/{self.q}"


class Assignment:
    """Immutable N x K assignment pattern with derived index-set views."""

    def __init__(self, pattern: list[list[bool]]):
        if not pattern or not pattern[0]:
            raise AssignmentError("assignment must have at least one worker and one dataset")
        width = len(pattern[0])
        for row in pattern:
            if len(row) != width:
                raise AssignmentError("ragged assignment rows")
        self._pattern = tuple(tuple(bool(v) for v in row) for row in pattern)
        self.n_workers = len(pattern)
        self.n_datasets = width
        self._supports = tuple(
            frozenset(k + 1 for k, v in enumerate(row) if v) for row in self._pattern
        )
        self._holders = tuple(
            frozenset(n + 1 for n in range(self.n_workers) if self._pattern[n][k])
            for k in range(self.n_datasets)
        )

    @classmethod
    def parse(cls, text: str, allow_empty_columns: bool = False) -> "Assignment":
        """Parse '*'/'0' rows; validates shape, characters, and column coverage.

        allow_empty_columns skips the at-least-one-holder check; that exists
        only for converse-oracle experiments that never build schemes.
        """
        rows: list[list[bool]] = []
        width = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = line.replace(" ", "")
            row = []
            for col, ch in enumerate(cells, start=1):
                if ch == "*":
                    row.append(True)
                elif ch == "0":
                    row.append(False)
                else:
                    raise AssignmentError(
                        f"line {lineno}, cell {col}: illegal character {ch!r} "
                        "(expected '*' or '0')"
                    )
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise AssignmentError(
                    f"line {lineno}: row has {len(row)} cells, expected {width}"
                )
            rows.append(row)
        if not rows:
            raise AssignmentError("empty assignment: no data rows found")
        a = cls(rows)
        if not allow_empty_columns:
            for k in range(1, a.n_datasets + 1):
                if not a.holders(k):
                    raise AssignmentError(
                        f"dataset {k} is assigned to no worker; every dataset "
                        "needs at least one holder"
                    )
        return a

    @classmethod
    def load(cls, path: str | Path, allow_empty_columns: bool = False) -> "Assignment":
        return cls.parse(Path(path).read_text(), allow_empty_columns=allow_empty_columns)

    def assigned(self, n: int, k: int) -> bool:
        self._check_worker(n)
        self._check_dataset(k)
        return self._pattern[n - 1][k - 1]

    def support(self, n: int) -> frozenset[int]:
        """Datasets assigned to worker n."""
        self._check_worker(n)
        return self._supports[n - 1]

    def complement(self, n: int) -> frozenset[int]:
        """Datasets NOT assigned to worker n."""
        self._check_worker(n)
        return frozenset(range(1, self.n_datasets + 1)) - self._supports[n - 1]

    def holders(self, k: int) -> frozenset[int]:
        """Workers holding dataset k."""
        self._check_dataset(k)
        return self._holders[k - 1]

    def non_holders(self, k: int) -> frozenset[int]:
        """Workers not holding dataset k."""
        self._check_dataset(k)
        return frozenset(range(1, self.n_workers + 1)) - self._holders[k - 1]

    def replication(self) -> int:
        """Minimum number of workers holding any one dataset."""
        return min(len(h) for h in self._holders)

    def max_support_size(self) -> int:
        return max(len(s) for s in self._supports)

    def unassigned_pieces(self, n: int, q: int) -> frozenset[int]:
        """Piece-level complement: the worker's missing datasets replicated
        across the q piece blocks, i.e. {k + i*K : k missing, 0 <= i < q}."""
        if q < 1:
            raise ValueError("subpacketization q must be >= 1")
        comp = self.complement(n)
        kk = self.n_datasets
        return frozenset(k + i * kk for i in range(q) for k in comp)

    def star_mask(self, n: int) -> int:
        """Bit k-1 set iff worker n holds dataset k (for subset enumeration)."""
        self._check_worker(n)
        mask = 0
        for k in self._supports[n - 1]:
            mask |= 1 << (k - 1)
        return mask

    def canonical_text(self) -> str:
        lines = [
            " ".join("*" if v else "0" for v in row) for row in self._pattern
        ]
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def _check_worker(self, n: int):
        if not 1 <= n <= self.n_workers:
            raise IndexError(f"worker index {n} out of range [1, {self.n_workers}]")

    def _check_dataset(self, k: int):
        if not 1 <= k <= self.n_datasets:
            raise IndexError(f"dataset index {k} out of range [1, {self.n_datasets}]")

    def __eq__(self, other):
        return isinstance(other, Assignment) and self._pattern == other._pattern

    def __hash__(self):
        return hash(self._pattern)

    def __repr__(self):
        return f"Assignment({self.n_workers} workers x {self.n_datasets} datasets)"


def bundled_path(name: str) -> Path:
    """Path to a .dam file shipped with the package (e.g. 'ex851')."""
    fname = name if name.endswith(".dam") else f"{name}.dam"
    ref = resources.files("lscomp").joinpath("data", fname)
    with resources.as_file(ref) as p:
        if not p.exists():
            raise FileNotFoundError(f"no bundled assignment named {name!r}")
        return Path(p)
