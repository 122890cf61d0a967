"""Balanced binary functions: keyed families f : {0,1}^l -> {0,1}.

Three families:

* ``KeyedMix`` — f_k(x) = LSB(SipHash-2-4_k(pad(x))), the workhorse family.
* ``ConstantZero`` — identically 0; a deliberately unbalanced, learnable
  negative control.
* ``Paired`` — routes on the first input bit to one of two sub-functions;
  built only via :func:`pair_compose` (the splittable family).

Bitstrings are '0'/'1' strings throughout the package.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .errors import LengthMismatch, UnsupportedFamily
from .siphash import siphash24

KEYED_MIX = "KeyedMix"
CONSTANT_ZERO = "ConstantZero"
PAIRED = "Paired"

_FAMILY_TAGS = {KEYED_MIX: 1, CONSTANT_ZERO: 2, PAIRED: 3}
_TAG_FAMILIES = {v: k for k, v in _FAMILY_TAGS.items()}

KEY_BYTES = 16


@dataclass(frozen=True)
class BbfDescriptor:
    family_id: str
    key: bytes
    input_len: int
    sub_descriptors: Optional[tuple["BbfDescriptor", "BbfDescriptor"]] = None


def pad_bits(x: str) -> bytes:
    """Pack a bitstring into bytes little-endian, with a length byte appended.

    Bit j lands in byte j // 8 at bit position j % 8; the final byte is
    len(x) mod 256.
    """
    out = bytearray((len(x) + 7) // 8)
    for j, c in enumerate(x):
        if c == "1":
            out[j // 8] |= 1 << (j % 8)
    out.append(len(x) & 0xFF)
    return bytes(out)


def sample(family_id: str, security_param: int, rng: random.Random) -> BbfDescriptor:
    """Sample a fresh descriptor; input_len = max(security_param, 8)."""
    if security_param < 1:
        raise ValueError("security_param must be >= 1")
    input_len = max(security_param, 8)
    if family_id == KEYED_MIX:
        key = rng.getrandbits(8 * KEY_BYTES).to_bytes(KEY_BYTES, "little")
        return BbfDescriptor(KEYED_MIX, key, input_len)
    if family_id == CONSTANT_ZERO:
        return BbfDescriptor(CONSTANT_ZERO, b"", input_len)
    if family_id == PAIRED:
        raise UnsupportedFamily("Paired descriptors are built via pair_compose")
    raise UnsupportedFamily(f"unknown family {family_id!r}")


def eval(desc: BbfDescriptor, x: str) -> int:  # noqa: A001 - domain name
    """Deterministic evaluation of the described function at x."""
    if len(x) != desc.input_len:
        raise LengthMismatch(f"expected {desc.input_len} bits, got {len(x)}")
    if desc.family_id == CONSTANT_ZERO:
        return 0
    if desc.family_id == KEYED_MIX:
        return siphash24(desc.key, pad_bits(x)) & 1
    if desc.family_id == PAIRED:
        assert desc.sub_descriptors is not None
        return eval(desc.sub_descriptors[int(x[0])], x[1:])
    raise UnsupportedFamily(desc.family_id)


def pair_compose(f0: BbfDescriptor, f1: BbfDescriptor) -> BbfDescriptor:
    """Paired function: eval(pair, b || x) = eval(f_b, x)."""
    if f0.input_len != f1.input_len:
        raise LengthMismatch("paired sub-functions must share input_len")
    return BbfDescriptor(PAIRED, b"", 1 + f0.input_len, (f0, f1))


def balancedness_estimate(desc: BbfDescriptor, trials: int, rng: random.Random) -> float:
    """Empirical |#0 - #1| / trials over uniform inputs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    ones = 0
    for _ in range(trials):
        x = format(rng.getrandbits(desc.input_len), f"0{desc.input_len}b")
        ones += eval(desc, x)
    return abs(trials - 2 * ones) / trials


def serialize(desc: BbfDescriptor) -> bytes:
    """family tag (1B) || input_len (LE16) || key || sub-descriptors."""
    out = bytes([_FAMILY_TAGS[desc.family_id]]) + desc.input_len.to_bytes(2, "little")
    out += desc.key
    if desc.family_id == PAIRED:
        assert desc.sub_descriptors is not None
        out += serialize(desc.sub_descriptors[0]) + serialize(desc.sub_descriptors[1])
    return out


def deserialize(data: bytes) -> BbfDescriptor:
    desc, rest = _parse(data)
    if rest:
        raise ValueError("trailing bytes after descriptor")
    return desc


def _parse(data: bytes) -> tuple[BbfDescriptor, bytes]:
    family = _TAG_FAMILIES[data[0]]
    input_len = int.from_bytes(data[1:3], "little")
    rest = data[3:]
    if family == KEYED_MIX:
        return BbfDescriptor(family, rest[:KEY_BYTES], input_len), rest[KEY_BYTES:]
    if family == CONSTANT_ZERO:
        return BbfDescriptor(family, b"", input_len), rest
    sub0, rest = _parse(rest)
    sub1, rest = _parse(rest)
    return BbfDescriptor(family, b"", input_len, (sub0, sub1)), rest
