"""Uncloneable-decryptor constructions as scheme factories.

Every factory returns a :class:`SchemeInstance` bundling the five
procedures (key_gen, dec_gen, encrypt, decrypt_key, decrypt_q).  Messages
are '0'/'1' strings; a decryption failure is ``None``.

Factories:

* :func:`build_ud1_cpa` — the bit scheme (r, b xor f(r)) with a protected
  evaluator as the decryptor.
* :func:`extend` — bit-by-bit extension to arbitrary-length messages.
* :func:`decouple_bit` / :func:`decouple_general` — randomness decoupling.
* :func:`wrap_cca2_bit` / :func:`wrap_cca2_full` — encrypt-then-sign
  wrappers (verify-then-decrypt, returning None on any failure).
* :func:`underlying` — the key-only symmetric scheme inside a UD scheme.
* :func:`build_se_bbf` — the same symmetric scheme built directly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Union

from . import bbf, qcp, signatures
from .errors import DecryptorUnavailable, EmptyMessage
from .rngstream import random_bits
from .siphash import siphash24

BIT_ONLY = "bit-only"
UNRESTRICTED = "unrestricted"


# ---------------------------------------------------------------------------
# Keys, decryptors, ciphertexts


@dataclass
class UdKey:
    bbf_key: bbf.BbfDescriptor
    sig_keys: Optional[signatures.SigKeyPair] = None
    prf_key: Optional[bytes] = None


@dataclass
class Decryptor:
    program: qcp.ProtectedProgram
    pk: Optional[bytes] = None


@dataclass(frozen=True)
class BitCt:
    r: str
    beta: int


@dataclass(frozen=True)
class SeqCt:
    items: tuple


@dataclass(frozen=True)
class SignedBitCt:
    inner: BitCt
    sig: bytes


@dataclass(frozen=True)
class SignedSeqCt:
    serial: str
    items: tuple  # of (BitCt, sig bytes)


Ciphertext = Union[BitCt, SeqCt, SignedBitCt, SignedSeqCt]

_TAG_BIT, _TAG_SEQ, _TAG_SIGNED_BIT, _TAG_SIGNED_SEQ = 1, 2, 3, 4


def pack_bits(x: str) -> bytes:
    out = bytearray((len(x) + 7) // 8)
    for j, c in enumerate(x):
        if c == "1":
            out[j // 8] |= 1 << (j % 8)
    return bytes(out)


def unpack_bits(data: bytes, n: int) -> str:
    return "".join(str((data[j // 8] >> (j % 8)) & 1) for j in range(n))


def _ser_bit_body(ct: BitCt) -> bytes:
    return len(ct.r).to_bytes(2, "little") + pack_bits(ct.r) + bytes([ct.beta])


def serialize_ct(ct: Ciphertext) -> bytes:
    """Canonical wire format; challenge exclusion is byte equality on this."""
    if isinstance(ct, BitCt):
        return bytes([_TAG_BIT]) + _ser_bit_body(ct)
    if isinstance(ct, SeqCt):
        out = bytes([_TAG_SEQ]) + len(ct.items).to_bytes(4, "little")
        return out + b"".join(_ser_bit_body(i) for i in ct.items)
    if isinstance(ct, SignedBitCt):
        return (bytes([_TAG_SIGNED_BIT]) + _ser_bit_body(ct.inner)
                + len(ct.sig).to_bytes(4, "little") + ct.sig)
    if isinstance(ct, SignedSeqCt):
        out = bytes([_TAG_SIGNED_SEQ]) + pack_bits(ct.serial)
        out += len(ct.items).to_bytes(4, "little")
        return out + b"".join(_ser_bit_body(c) + s for c, s in ct.items)
    raise TypeError(f"not a ciphertext: {ct!r}")


def _parse_bit_body(data: bytes, off: int) -> tuple[BitCt, int]:
    n = int.from_bytes(data[off : off + 2], "little")
    off += 2
    nb = (n + 7) // 8
    r = unpack_bits(data[off : off + nb], n)
    off += nb
    return BitCt(r, data[off]), off + 1


def deserialize_ct(data: bytes, lam: int = 0, sig_len: int = 0) -> Ciphertext:
    """Parse the wire format; signed variants need the scheme's lam/sig_len."""
    tag = data[0]
    if tag == _TAG_BIT:
        ct, off = _parse_bit_body(data, 1)
        return ct
    if tag == _TAG_SEQ:
        count = int.from_bytes(data[1:5], "little")
        items, off = [], 5
        for _ in range(count):
            item, off = _parse_bit_body(data, off)
            items.append(item)
        return SeqCt(tuple(items))
    if tag == _TAG_SIGNED_BIT:
        inner, off = _parse_bit_body(data, 1)
        slen = int.from_bytes(data[off : off + 4], "little")
        return SignedBitCt(inner, data[off + 4 : off + 4 + slen])
    if tag == _TAG_SIGNED_SEQ:
        nb = (lam + 7) // 8
        serial = unpack_bits(data[1 : 1 + nb], lam)
        off = 1 + nb
        count = int.from_bytes(data[off : off + 4], "little")
        off += 4
        items = []
        for _ in range(count):
            inner, off = _parse_bit_body(data, off)
            items.append((inner, data[off : off + sig_len]))
            off += sig_len
        return SignedSeqCt(serial, tuple(items))
    raise ValueError(f"unknown ciphertext tag {tag}")


# ---------------------------------------------------------------------------
# Scheme interface


@dataclass
class SchemeInstance:
    name: str
    key_gen: Callable[[int, random.Random], UdKey]
    dec_gen: Callable[[UdKey, qcp.ResourceLedger, random.Random], Decryptor]
    encrypt: Callable[[UdKey, str, random.Random], Ciphertext]
    decrypt_key: Callable[[UdKey, Ciphertext], Optional[str]]
    decrypt_q: Callable[[Decryptor, Ciphertext], Optional[str]]
    message_len_support: str = BIT_ONLY
    backend_tag: Optional[str] = None
    sig_scheme: Optional[str] = None
    decoupled: bool = False
    has_decryptors: bool = True


def _check_bit(m: str) -> None:
    if len(m) != 1 or m not in ("0", "1"):
        raise ValueError(f"bit-only scheme got message {m!r}")


# ---------------------------------------------------------------------------
# Base bit construction


def _bbf_keygen(backend_tag: Optional[str]) -> Callable[[int, random.Random], UdKey]:
    def key_gen(lam: int, rng: random.Random) -> UdKey:
        if backend_tag == qcp.SPLIT_PAIR:
            f0 = bbf.sample(bbf.KEYED_MIX, lam, rng)
            f1 = bbf.sample(bbf.KEYED_MIX, lam, rng)
            return UdKey(bbf.pair_compose(f0, f1))
        return UdKey(bbf.sample(bbf.KEYED_MIX, lam, rng))

    return key_gen


def _bit_encrypt(key: UdKey, m: str, rng: random.Random) -> BitCt:
    _check_bit(m)
    f = key.bbf_key
    r = random_bits(rng, f.input_len)
    return BitCt(r, int(m) ^ bbf.eval(f, r))


def _bit_decrypt_key(key: UdKey, ct: Ciphertext) -> Optional[str]:
    if not isinstance(ct, BitCt):
        return None
    return str(ct.beta ^ bbf.eval(key.bbf_key, ct.r))


def _bit_decrypt_q(dec: Decryptor, ct: Ciphertext) -> Optional[str]:
    if not isinstance(ct, BitCt):
        return None
    return str(ct.beta ^ qcp.eval_program(dec.program, ct.r))


def build_ud1_cpa(backend_tag: str) -> SchemeInstance:
    """The bit scheme: enc(b) = (r, b xor f(r)); decryptor = protected f."""

    def dec_gen(key: UdKey, ledger: qcp.ResourceLedger, rng: random.Random) -> Decryptor:
        return Decryptor(qcp.protect(backend_tag, key.bbf_key, ledger, rng))

    return SchemeInstance(
        name=f"ud1_cpa[{backend_tag}]",
        key_gen=_bbf_keygen(backend_tag),
        dec_gen=dec_gen,
        encrypt=_bit_encrypt,
        decrypt_key=_bit_decrypt_key,
        decrypt_q=_bit_decrypt_q,
        backend_tag=backend_tag,
    )


def build_se_bbf() -> SchemeInstance:
    """The symmetric bit scheme alone, with no copy-protection dependency."""

    def no_dec_gen(key, ledger, rng):
        raise DecryptorUnavailable("key-only scheme")

    def no_dec_q(dec, ct):
        raise DecryptorUnavailable("key-only scheme")

    return SchemeInstance(
        name="se_bbf",
        key_gen=_bbf_keygen(None),
        dec_gen=no_dec_gen,
        encrypt=_bit_encrypt,
        decrypt_key=_bit_decrypt_key,
        decrypt_q=no_dec_q,
        has_decryptors=False,
    )


# ---------------------------------------------------------------------------
# Transforms


def extend(s: SchemeInstance) -> SchemeInstance:
    """Bit-by-bit extension to arbitrary-length messages."""
    if s.message_len_support != BIT_ONLY:
        raise ValueError("extend requires a bit-only scheme")

    def encrypt(key: UdKey, m: str, rng: random.Random) -> SeqCt:
        if not m:
            raise EmptyMessage("cannot encrypt the empty message")
        return SeqCt(tuple(s.encrypt(key, c, rng) for c in m))

    def decrypt_key(key: UdKey, ct: Ciphertext) -> Optional[str]:
        if not isinstance(ct, SeqCt) or not ct.items:
            return None
        bits = [s.decrypt_key(key, item) for item in ct.items]
        return None if any(b is None for b in bits) else "".join(bits)

    def decrypt_q(dec: Decryptor, ct: Ciphertext) -> Optional[str]:
        if not isinstance(ct, SeqCt) or not ct.items:
            return None
        bits = [s.decrypt_q(dec, item) for item in ct.items]
        return None if any(b is None for b in bits) else "".join(bits)

    return replace(s, name=f"extend({s.name})", encrypt=encrypt,
                   decrypt_key=decrypt_key, decrypt_q=decrypt_q,
                   message_len_support=UNRESTRICTED)


def decouple_bit(s: SchemeInstance) -> SchemeInstance:
    """Draw independent randomness tapes for the two plaintexts; use tape b."""
    if s.message_len_support != BIT_ONLY:
        raise ValueError("decouple_bit requires a bit-only scheme")

    def encrypt(key: UdKey, m: str, rng: random.Random) -> Ciphertext:
        _check_bit(m)
        tapes = [random.Random(rng.getrandbits(64)) for _ in range(2)]
        return s.encrypt(key, m, tapes[int(m)])

    return replace(s, name=f"decouple_bit({s.name})", encrypt=encrypt, decoupled=True)


def decouple_general(s: SchemeInstance, prf_key: bytes) -> SchemeInstance:
    """Derive encryption randomness from keyed-mix(prf_key, m || r)."""

    def key_gen(lam: int, rng: random.Random) -> UdKey:
        key = s.key_gen(lam, rng)
        key.prf_key = prf_key
        return key

    def encrypt(key: UdKey, m: str, rng: random.Random) -> Ciphertext:
        r = random_bits(rng, 64)
        seed = siphash24(prf_key, bbf.pad_bits(m) + bbf.pad_bits(r))
        return s.encrypt(key, m, random.Random(seed))

    return replace(s, name=f"decouple_general({s.name})", key_gen=key_gen,
                   encrypt=encrypt, decoupled=True)


def wrap_cca2_bit(s: SchemeInstance, sig_scheme: str = signatures.LAMPORT_MERKLE) -> SchemeInstance:
    """Encrypt-then-sign on the bit scheme; verify-then-decrypt, None on fail."""
    if not s.decoupled:
        raise ValueError("wrap_cca2_bit requires a decoupled scheme")

    def key_gen(lam: int, rng: random.Random) -> UdKey:
        key = s.key_gen(lam, rng)
        key.sig_keys = signatures.keygen(sig_scheme, lam, rng)
        return key

    def dec_gen(key: UdKey, ledger: qcp.ResourceLedger, rng: random.Random) -> Decryptor:
        dec = s.dec_gen(key, ledger, rng)
        assert key.sig_keys is not None
        return Decryptor(dec.program, key.sig_keys.public)

    def encrypt(key: UdKey, m: str, rng: random.Random) -> SignedBitCt:
        inner = s.encrypt(key, m, rng)
        assert key.sig_keys is not None
        return SignedBitCt(inner, signatures.sign(key.sig_keys, serialize_ct(inner)))

    def decrypt_key(key: UdKey, ct: Ciphertext) -> Optional[str]:
        assert key.sig_keys is not None
        if not isinstance(ct, SignedBitCt):
            return None
        if not signatures.verify(key.sig_keys.public, serialize_ct(ct.inner), ct.sig):
            return None
        return s.decrypt_key(key, ct.inner)

    def decrypt_q(dec: Decryptor, ct: Ciphertext) -> Optional[str]:
        if not isinstance(ct, SignedBitCt) or dec.pk is None:
            return None
        if not signatures.verify(dec.pk, serialize_ct(ct.inner), ct.sig):
            return None
        return s.decrypt_q(dec, ct.inner)

    return replace(s, name=f"wrap_cca2_bit({s.name},{sig_scheme})", key_gen=key_gen,
                   dec_gen=dec_gen, encrypt=encrypt, decrypt_key=decrypt_key,
                   decrypt_q=decrypt_q, sig_scheme=sig_scheme)


def _signed_item_msg(item_ct: BitCt, length: int, index: int, serial: str) -> bytes:
    """The signed message for item ``index`` (1-based): c_i || |m| || i || serial."""
    return (serialize_ct(item_ct) + length.to_bytes(4, "little")
            + index.to_bytes(4, "little") + pack_bits(serial))


def wrap_cca2_full(s: SchemeInstance, sig_scheme: str = signatures.LAMPORT_MERKLE,
                   lam: int = 64) -> SchemeInstance:
    """Per-bit encrypt-then-sign with serial/length/index binding."""
    if s.message_len_support != BIT_ONLY:
        raise ValueError("wrap_cca2_full extends a bit-only scheme")

    def key_gen(lam_: int, rng: random.Random) -> UdKey:
        key = s.key_gen(lam_, rng)
        key.sig_keys = signatures.keygen(sig_scheme, lam_, rng)
        return key

    def dec_gen(key: UdKey, ledger: qcp.ResourceLedger, rng: random.Random) -> Decryptor:
        dec = s.dec_gen(key, ledger, rng)
        assert key.sig_keys is not None
        return Decryptor(dec.program, key.sig_keys.public)

    def encrypt(key: UdKey, m: str, rng: random.Random) -> SignedSeqCt:
        if not m:
            raise EmptyMessage("cannot encrypt the empty message")
        assert key.sig_keys is not None
        serial = random_bits(rng, lam)
        items = []
        for i, c in enumerate(m, start=1):
            inner = s.encrypt(key, c, rng)
            sig = signatures.sign(key.sig_keys, _signed_item_msg(inner, len(m), i, serial))
            items.append((inner, sig))
        return SignedSeqCt(serial, tuple(items))

    def _verified_items(pk: bytes, ct: Ciphertext) -> Optional[list[BitCt]]:
        if not isinstance(ct, SignedSeqCt) or not ct.items:
            return None
        count = len(ct.items)
        for i, (inner, sig) in enumerate(ct.items, start=1):
            if not signatures.verify(pk, _signed_item_msg(inner, count, i, ct.serial), sig):
                return None
        return [inner for inner, _ in ct.items]

    def decrypt_key(key: UdKey, ct: Ciphertext) -> Optional[str]:
        assert key.sig_keys is not None
        inners = _verified_items(key.sig_keys.public, ct)
        if inners is None:
            return None
        bits = [s.decrypt_key(key, inner) for inner in inners]
        return None if any(b is None for b in bits) else "".join(bits)

    def decrypt_q(dec: Decryptor, ct: Ciphertext) -> Optional[str]:
        if dec.pk is None:
            return None
        inners = _verified_items(dec.pk, ct)
        if inners is None:
            return None
        bits = [s.decrypt_q(dec, inner) for inner in inners]
        return None if any(b is None for b in bits) else "".join(bits)

    return replace(s, name=f"wrap_cca2_full({s.name},{sig_scheme})", key_gen=key_gen,
                   dec_gen=dec_gen, encrypt=encrypt, decrypt_key=decrypt_key,
                   decrypt_q=decrypt_q, message_len_support=UNRESTRICTED,
                   sig_scheme=sig_scheme)


def underlying(s: SchemeInstance) -> SchemeInstance:
    """The key-only symmetric scheme: quantum procedures removed."""

    def no_dec_gen(key, ledger, rng):
        raise DecryptorUnavailable(f"{s.name} stripped of decryptors")

    def no_dec_q(dec, ct):
        raise DecryptorUnavailable(f"{s.name} stripped of decryptors")

    return replace(s, name=f"underlying({s.name})", dec_gen=no_dec_gen,
                   decrypt_q=no_dec_q, has_decryptors=False)
