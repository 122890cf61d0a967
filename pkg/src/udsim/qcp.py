"""Copy-protection backends with an enforced linear-resource discipline.

``protect`` compiles a function descriptor into a :class:`ProtectedProgram`
handle registered with a :class:`ResourceLedger`.  Handles can be moved and
(for the SplitPair backend) split, never duplicated; the ledger records at
most one live owner per resource id and every consuming transition.

Backends:

* ``IdealToken`` — seals the descriptor whole; evaluates perfectly; refuses
  splitting.  The minimal idealized model.
* ``SplitPair`` — seals a Paired descriptor as two half-tokens; ``split_pair``
  yields two children, each answering only its half-domain.
* ``SubspaceModel`` — additionally carries a random subspace state (exercises
  the quantum layer); evaluation consults the sealed descriptor.

Evaluation is non-consuming and never exposes the sealed descriptor bytes.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Optional

from . import bbf, quantum
from .errors import BackendMismatch, DeadHandle, DimensionTooLarge, LengthMismatch, OutOfDomain

IDEAL_TOKEN = "IdealToken"
SPLIT_PAIR = "SplitPair"
SUBSPACE_MODEL = "SubspaceModel"
DUD = "Dud"

BACKENDS = (IDEAL_TOKEN, SPLIT_PAIR, SUBSPACE_MODEL)

_ids = itertools.count(1)


class ResourceLedger:
    """Tracks live handles and their provenance; all transitions go through it."""

    def __init__(self) -> None:
        self.live_handles: set[int] = set()
        self.provenance: dict[int, int] = {}
        self.protect_count = 0

    def register(self, parent: Optional[int] = None) -> int:
        rid = next(_ids)
        self.live_handles.add(rid)
        if parent is not None:
            self.provenance[rid] = parent
        return rid

    def retire(self, rid: int) -> None:
        self.require_live(rid)
        self.live_handles.remove(rid)

    def require_live(self, rid: int) -> None:
        if rid not in self.live_handles:
            raise DeadHandle(f"handle {rid} is not live")

    def dump(self) -> str:
        return json.dumps(
            {"live": sorted(self.live_handles),
             "provenance": {str(c): p for c, p in sorted(self.provenance.items())}}
        )


@dataclass
class ProtectedProgram:
    backend_tag: str
    resource_id: int
    ledger: ResourceLedger
    # Sealed backend-private state; never exposed through the public API.
    _payload: dict = field(repr=False, default_factory=dict)


def protect(backend_tag: str, f: bbf.BbfDescriptor, ledger: ResourceLedger,
            rng: random.Random) -> ProtectedProgram:
    """Compile f into a fresh protected-program handle."""
    if backend_tag == IDEAL_TOKEN:
        payload = {"desc": f}
    elif backend_tag == SPLIT_PAIR:
        if f.family_id != bbf.PAIRED:
            raise BackendMismatch("SplitPair protects Paired functions only")
        payload = {"desc": f, "halves": f.sub_descriptors}
    elif backend_tag == SUBSPACE_MODEL:
        n = f.input_len
        if n > quantum.MAX_QUBITS:
            raise DimensionTooLarge(f"SubspaceModel caps input_len at {quantum.MAX_QUBITS}")
        A = quantum.random_subspace(n, n // 2, rng)
        payload = {"desc": f, "subspace": A, "state": quantum.subspace_state(A)}
    else:
        raise BackendMismatch(f"unknown backend {backend_tag!r}")
    rid = ledger.register()
    ledger.protect_count += 1
    return ProtectedProgram(backend_tag, rid, ledger, payload)


def eval_program(p: ProtectedProgram, x: str) -> int:
    """Evaluate the sealed function at x; non-consuming."""
    p.ledger.require_live(p.resource_id)
    if p.backend_tag == DUD:
        return p._payload["rng"].getrandbits(1)
    if "half_bit" in p._payload:
        desc = p._payload["desc"]
        if len(x) != 1 + desc.input_len:
            raise LengthMismatch(f"expected {1 + desc.input_len} bits, got {len(x)}")
        if int(x[0]) != p._payload["half_bit"]:
            raise OutOfDomain(f"half-program covers inputs starting with {p._payload['half_bit']}")
        return bbf.eval(desc, x[1:])
    return bbf.eval(p._payload["desc"], x)


def split_pair(p: ProtectedProgram, ledger: ResourceLedger) -> tuple[ProtectedProgram, ProtectedProgram]:
    """Consume a SplitPair token, producing its two half-programs."""
    if p.backend_tag != SPLIT_PAIR:
        raise BackendMismatch(f"{p.backend_tag} does not support splitting")
    ledger.require_live(p.resource_id)
    halves = p._payload["halves"]
    ledger.retire(p.resource_id)
    children = []
    for b in (0, 1):
        rid = ledger.register(parent=p.resource_id)
        children.append(ProtectedProgram(
            SPLIT_PAIR, rid, ledger, {"desc": halves[b], "half_bit": b}))
    return children[0], children[1]


def make_dud(ledger: ResourceLedger, rng: random.Random) -> ProtectedProgram:
    """A placeholder program whose evaluation is a fresh uniform coin."""
    rid = ledger.register()
    return ProtectedProgram(DUD, rid, ledger, {"rng": random.Random(rng.getrandbits(64))})


def distribute(programs: list[ProtectedProgram], count: int, ledger: ResourceLedger,
               rng: random.Random) -> list[ProtectedProgram]:
    """Pad a list of live programs with duds up to ``count`` states."""
    seen: set[int] = set()
    for p in programs:
        ledger.require_live(p.resource_id)
        if p.resource_id in seen:
            raise DeadHandle(f"handle {p.resource_id} listed twice")
        seen.add(p.resource_id)
    if len(programs) > count:
        raise ValueError("more programs than output slots")
    return list(programs) + [make_dud(ledger, rng) for _ in range(count - len(programs))]


def is_dud(p: ProtectedProgram) -> bool:
    return p.backend_tag == DUD


def input_len(p: ProtectedProgram) -> int:
    """Public input length of a program (duds have none)."""
    desc = p._payload.get("desc")
    if desc is None:
        raise BackendMismatch("dud programs have no input length")
    if "half_bit" in p._payload:
        return 1 + desc.input_len
    return desc.input_len


def _unseal(p: ProtectedProgram) -> bbf.BbfDescriptor:
    """Test-only hook: expose the sealed descriptor.  Not part of the API."""
    return p._payload["desc"]
