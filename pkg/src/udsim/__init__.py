"""Seeded Monte-Carlo harness for copy-protection and uncloneable-decryptor
security games: balanced function families, protected-program backends with
linear resource handles, hash-based signatures, scheme factories, and the
named attacks and reduction wrappers that exercise them.
"""

from . import adversaries, bbf, games, qcp, quantum, schemes, signatures
from .games import GameReport
from .rngstream import TrialContext

__all__ = [
    "adversaries",
    "bbf",
    "games",
    "qcp",
    "quantum",
    "schemes",
    "signatures",
    "GameReport",
    "TrialContext",
]

__version__ = "0.1.0"
