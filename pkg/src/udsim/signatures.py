"""Deterministic digital signatures with an sEUF-CMA interface.

Two schemes:

* ``LamportMerkle`` — ladder-style one-time keys (per digest bit, reveal the
  deep value v1 for bit 1 or v0 = H(v1) for bit 0; the per-position public
  key is H(v0)) under a depth-10 Merkle tree (1024 leaves).  The leaf index
  for a message is a secret-keyed hash of the message, making signing
  stateless-deterministic.  Message digests and index derivation use
  SipHash-2-4; value/tree compression uses fixed-key AES-128 in a
  Matyas-Meyer-Oseas construction, batched with numpy so keygen stays in the
  tens of milliseconds.  A simulation stand-in, not a production scheme.
* ``Malleable`` — verification accepts anything; the negative control that
  loses the sEUF-CMA game to the trivial forger.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import CapacityExhausted
from .siphash import siphash24

LAMPORT_MERKLE = "LamportMerkle"
MALLEABLE = "Malleable"

DEPTH = 10
LEAVES = 1 << DEPTH
DIGEST_BITS = 256
VALUE_BYTES = 16

SIG_LEN = 2 + DIGEST_BITS * VALUE_BYTES + DEPTH * VALUE_BYTES

MALLEABLE_MARKER = b"malleable-accept-all"

# Fixed public AES keys for the two compression roles.
_KA = bytes(range(16))
_KB = bytes(range(16, 32))
# Domain-separated SipHash keys for the 256-bit message digest.
_DIGEST_KEYS = [bytes([i]) * 16 for i in range(4)]


def _ecb(key: bytes, data: bytes) -> bytes:
    enc = Cipher(algorithms.AES(key), modes.ECB()).encryptor()
    return enc.update(data) + enc.finalize()


def _h16(blocks: np.ndarray) -> np.ndarray:
    """MMO compression per 16-byte row: AES_KA(x) ^ x."""
    ct = np.frombuffer(_ecb(_KA, blocks.tobytes()), dtype=np.uint8).reshape(blocks.shape)
    return ct ^ blocks


def _combine(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Compress two 16-byte rows into one: MMO_KB(a ^ MMO_KA(b))."""
    u = a ^ _h16(b)
    ct = np.frombuffer(_ecb(_KB, u.tobytes()), dtype=np.uint8).reshape(u.shape)
    return ct ^ u


def _fold_pairs(rows: np.ndarray) -> np.ndarray:
    """One tree level: combine adjacent row pairs (N,16) -> (N/2,16)."""
    pairs = rows.reshape(-1, 2, VALUE_BYTES)
    return _combine(pairs[:, 0, :], pairs[:, 1, :])


def digest256(m: bytes) -> list[int]:
    """256-bit message digest as a list of bits."""
    bits = []
    for k in _DIGEST_KEYS:
        word = siphash24(k, m)
        bits.extend((word >> i) & 1 for i in range(64))
    return bits


@dataclass
class SigKeyPair:
    scheme_tag: str
    secret: bytes
    public: bytes
    capacity: int
    next_index: int = 0
    _v1: Optional[np.ndarray] = field(default=None, repr=False)
    _v0: Optional[np.ndarray] = field(default=None, repr=False)
    _levels: Optional[list[np.ndarray]] = field(default=None, repr=False)
    _signed: set = field(default_factory=set, repr=False)


@lru_cache(maxsize=8)
def _derive_arrays(seed: bytes) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """All one-time values and Merkle levels, deterministically from the seed."""
    total = LEAVES * DIGEST_BITS * VALUE_BYTES
    ctr = Cipher(algorithms.AES(seed), modes.CTR(b"\x00" * 16)).encryptor()
    stream = ctr.update(b"\x00" * total) + ctr.finalize()
    v1 = np.frombuffer(stream, dtype=np.uint8).reshape(LEAVES * DIGEST_BITS, VALUE_BYTES)
    v0 = _h16(v1)
    pos_pk = _h16(v0)
    # Fold each leaf's 256 position keys down to one 16-byte leaf key.
    cur = pos_pk
    for _ in range(8):
        cur = _fold_pairs(cur)
    levels = [cur]  # levels[0] = leaf hashes, levels[DEPTH] = root
    for _ in range(DEPTH):
        levels.append(_fold_pairs(levels[-1]))
    return (v1.reshape(LEAVES, DIGEST_BITS, VALUE_BYTES),
            v0.reshape(LEAVES, DIGEST_BITS, VALUE_BYTES),
            levels)


def _index_key(seed: bytes) -> bytes:
    return _ecb(seed, b"leaf-index-deriv")[:16]


def keygen(scheme_tag: str, security_param: int, rng: random.Random) -> SigKeyPair:
    if security_param < 1:
        raise ValueError("security_param must be >= 1")
    seed = rng.getrandbits(128).to_bytes(16, "little")
    if scheme_tag == MALLEABLE:
        return SigKeyPair(MALLEABLE, seed, MALLEABLE_MARKER, capacity=LEAVES)
    if scheme_tag != LAMPORT_MERKLE:
        raise ValueError(f"unknown signature scheme {scheme_tag!r}")
    v1, v0, levels = _derive_arrays(seed)
    root = levels[DEPTH][0].tobytes()
    return SigKeyPair(LAMPORT_MERKLE, seed, root, capacity=LEAVES,
                      _v1=v1, _v0=v0, _levels=levels)


def leaf_index(kp: SigKeyPair, m: bytes) -> int:
    return siphash24(_index_key(kp.secret), m) % LEAVES


def sign(kp: SigKeyPair, m: bytes) -> bytes:
    """Deterministic signature; wire format LE16 index || 256 values || path."""
    if kp.scheme_tag == MALLEABLE:
        return b"\x00"
    if m not in kp._signed:
        if len(kp._signed) >= kp.capacity:
            raise CapacityExhausted(f"{kp.capacity} distinct messages already signed")
        kp._signed.add(m)
        kp.next_index = len(kp._signed)
    bits = digest256(m)
    idx = leaf_index(kp, m)
    assert kp._v1 is not None and kp._v0 is not None and kp._levels is not None
    sel = np.asarray(bits, dtype=np.uint8)[:, None]
    values = np.where(sel == 1, kp._v1[idx], kp._v0[idx])
    path = b"".join(
        kp._levels[lvl][(idx >> lvl) ^ 1].tobytes() for lvl in range(DEPTH)
    )
    return idx.to_bytes(2, "little") + values.tobytes() + path


def verify(pk: bytes, m: bytes, s: bytes) -> int:
    """1 iff the signature verifies; Malleable public keys accept anything."""
    if pk == MALLEABLE_MARKER:
        return 1
    if len(s) != SIG_LEN:
        return 0
    idx = int.from_bytes(s[:2], "little")
    if idx >= LEAVES:
        return 0
    values = np.frombuffer(
        s[2 : 2 + DIGEST_BITS * VALUE_BYTES], dtype=np.uint8
    ).reshape(DIGEST_BITS, VALUE_BYTES)
    bits = np.asarray(digest256(m), dtype=np.uint8)[:, None]
    h1 = _h16(values)
    h2 = _h16(h1)
    pos_pk = np.where(bits == 1, h2, h1)
    node = pos_pk
    for _ in range(8):
        node = _fold_pairs(node)
    node = node[0]
    off = 2 + DIGEST_BITS * VALUE_BYTES
    for lvl in range(DEPTH):
        sib = np.frombuffer(
            s[off + lvl * VALUE_BYTES : off + (lvl + 1) * VALUE_BYTES], dtype=np.uint8
        )
        if (idx >> lvl) & 1:
            node = _combine(sib[None, :], node[None, :])[0]
        else:
            node = _combine(node[None, :], sib[None, :])[0]
    return int(node.tobytes() == pk)
