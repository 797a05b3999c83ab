"""Exact arithmetic in a configurable prime field.

All message symbols and coding coefficients live in GF(modulus). The default
modulus is the Mersenne prime 2^61 - 1: large enough that the randomized
constructions fail with negligible probability, small enough that Python ints
handle the 122-bit products without any special reduction tricks.

Randomness goes through numpy PCG64 streams keyed by (seed, *path) so that
every consumer has its own reproducible substream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MERSENNE_61 = (1 << 61) - 1  # 2305843009213693951
DEFAULT_MODULUS = MERSENNE_61

# Small moduli make the Schwartz-Zippel failure probability non-negligible;
# anything below this needs an explicit opt-in (used by oracle tests only).
MIN_SAFE_MODULUS = 1 << 31

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24 (covers u64)."""
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class FieldMismatchError(ValueError):
    """Raised when an operation mixes elements of different fields."""


@dataclass(frozen=True)
class FieldSpec:
    """A prime field GF(modulus); scalar ops take and return canonical ints."""

    modulus: int = DEFAULT_MODULUS
    allow_small: bool = False

    def __post_init__(self):
        if not is_prime(self.modulus):
            raise ValueError(f"modulus {self.modulus} is not prime")
        if self.modulus < MIN_SAFE_MODULUS and not self.allow_small:
            raise ValueError(
                f"modulus {self.modulus} < 2^31; pass allow_small=True if this "
                "is an oracle/test field"
            )

    def canon(self, value: int) -> int:
        return value % self.modulus

    def add(self, x: int, y: int) -> int:
        s = x + y
        m = self.modulus
        return s - m if s >= m else s

    def sub(self, x: int, y: int) -> int:
        d = x - y
        return d + self.modulus if d < 0 else d

    def neg(self, x: int) -> int:
        return self.modulus - x if x else 0

    def mul(self, x: int, y: int) -> int:
        return x * y % self.modulus

    def inv(self, x: int) -> int:
        """Multiplicative inverse via Fermat: x^(m-2) mod m."""
        if x == 0:
            raise ZeroDivisionError("inverse of zero field element")
        return pow(x, self.modulus - 2, self.modulus)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self.canon(value), self)

    def sample(self, rng: np.random.Generator) -> int:
        """One uniform draw from [0, modulus); unbiased, stream-stable."""
        return int(rng.integers(0, self.modulus, dtype=np.int64))

    def sample_many(self, rng: np.random.Generator, count: int) -> list[int]:
        return [int(v) for v in rng.integers(0, self.modulus, size=count, dtype=np.int64)]

    def sample_element(self, rng: np.random.Generator) -> "FieldElement":
        return FieldElement(self.sample(rng), self)

    def __repr__(self):
        return f"FieldSpec(modulus={self.modulus})"


@dataclass(frozen=True)
class FieldElement:
    """Canonical residue 0 <= value < modulus with operator sugar."""

    value: int
    field: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.field.modulus:
            raise ValueError(f"non-canonical value {self.value}")

    def _check(self, other: "FieldElement"):
        if not isinstance(other, FieldElement):
            raise TypeError(f"cannot combine FieldElement with {type(other).__name__}")
        if other.field != self.field:
            raise FieldMismatchError(
                f"mixed fields: modulus {self.field.modulus} vs {other.field.modulus}"
            )

    def __add__(self, other):
        self._check(other)
        return FieldElement(self.field.add(self.value, other.value), self.field)

    def __sub__(self, other):
        self._check(other)
        return FieldElement(self.field.sub(self.value, other.value), self.field)

    def __mul__(self, other):
        self._check(other)
        return FieldElement(self.field.mul(self.value, other.value), self.field)

    def __neg__(self):
        return FieldElement(self.field.neg(self.value), self.field)

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field.inv(self.value), self.field)

    def __repr__(self):
        return f"{self.value} (mod {self.field.modulus})"


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """PCG64 stream keyed by (seed, path).

    The same (seed, path) always yields the same stream; different paths from
    the same seed are statistically independent, which is how parallel callers
    (per-attempt, per-trial) split randomness without coordination.
    """
    if seed < 0:
        raise ValueError("seed must be non-negative")
    ss = np.random.SeedSequence(seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.PCG64(ss))
