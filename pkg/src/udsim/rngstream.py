"""Deterministic per-(trial, role) random streams.

Every game derives all of its randomness from a single 64-bit master seed.
Each trial owns a set of named streams ("x1", "b2", "pirate", ...), seeded
independently via splitmix-style 64-bit mixing, so consuming bits from one
stream never shifts another.  Two different games that use the same stream
names for the same roles therefore see identical randomness under a shared
master seed — the mechanism behind the paired-execution reduction tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One splitmix64 output step for state ``x`` (64-bit)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix(*parts: int) -> int:
    """Fold a sequence of 64-bit values into one well-mixed 64-bit value."""
    acc = 0x9E3779B97F4A7C15
    for p in parts:
        acc = splitmix64(acc ^ (p & _MASK))
    return acc


def _name_code(name: str) -> int:
    acc = 0
    for b in name.encode():
        acc = splitmix64(acc ^ b)
    return acc


@dataclass(frozen=True)
class TrialContext:
    """Handle for one trial's randomness: ``stream(name)`` -> seeded Random."""

    master_seed: int
    trial: int

    def stream_seed(self, name: str) -> int:
        return mix(self.master_seed, self.trial, _name_code(name))

    def stream(self, name: str) -> random.Random:
        return random.Random(self.stream_seed(name))


def random_bits(rng: random.Random, n: int) -> str:
    """Uniform bitstring of length ``n`` as a '0'/'1' string."""
    return format(rng.getrandbits(n), f"0{n}b") if n else ""
