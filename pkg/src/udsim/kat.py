"""Known-answer vectors for the function family, signatures, and schemes.

Three JSON files, regenerated deterministically from embedded seeds:

* ``bbf_kat.json``  — {family, key_hex, input_bits, output_bit}; key_hex is
  the full serialized descriptor so vectors reconstruct exactly.
* ``sig_kat.json``  — {scheme, seed_hex, public_hex, message_hex, signature_hex}.
* ``scheme_kat.json`` — {scheme, backend, seed, lam, message, ct_hex} with
  key and encryption randomness drawn from fixed named streams.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from . import bbf, schemes, signatures
from .errors import KatMismatch
from .rngstream import TrialContext, random_bits

SUITES = ("bbf", "sig", "scheme")

_BBF_SEED = 0x6B61745F626266  # "kat_bbf"
_SIG_SEED = 0x6B61745F736967
_SCHEME_SEED = 0x6B61745F736368


def _kat_path(directory: Path, suite: str) -> Path:
    return Path(directory) / f"{suite}_kat.json"


# ---------------------------------------------------------------------------
# Vector generation


def _bbf_vectors() -> list[dict]:
    rng = random.Random(_BBF_SEED)
    descs = [bbf.sample(bbf.CONSTANT_ZERO, 8, rng)]
    for lam in (8, 16, 64):
        descs.append(bbf.sample(bbf.KEYED_MIX, lam, rng))
    descs.append(bbf.pair_compose(bbf.sample(bbf.KEYED_MIX, 8, rng),
                                  bbf.sample(bbf.KEYED_MIX, 8, rng)))
    vectors = []
    for desc in descs:
        for _ in range(4):
            x = random_bits(rng, desc.input_len)
            vectors.append({
                "family": desc.family_id,
                "key_hex": bbf.serialize(desc).hex(),
                "input_bits": x,
                "output_bit": bbf.eval(desc, x),
            })
    return vectors


def _sig_vectors() -> list[dict]:
    rng = random.Random(_SIG_SEED)
    vectors = []
    for scheme_tag in (signatures.LAMPORT_MERKLE, signatures.LAMPORT_MERKLE,
                       signatures.MALLEABLE):
        kp = signatures.keygen(scheme_tag, 64, rng)
        for _ in range(2):
            m = rng.getrandbits(64).to_bytes(8, "little")
            vectors.append({
                "scheme": scheme_tag,
                "seed_hex": kp.secret.hex(),
                "public_hex": kp.public.hex(),
                "message_hex": m.hex(),
                "signature_hex": signatures.sign(kp, m).hex(),
            })
    return vectors


def _scheme_factories() -> list[tuple[str, str, schemes.SchemeInstance, int]]:
    """(name, backend, instance, lam) rows; lam small enough for all backends."""
    rows = []
    for backend in (None, "IdealToken", "SplitPair", "SubspaceModel"):
        lam = 12
        tag = backend or "IdealToken"
        base = schemes.build_ud1_cpa(tag)
        if backend is None:
            rows.append(("se_bbf", "-", schemes.build_se_bbf(), lam))
            continue
        rows.append(("ud1_cpa", backend, base, lam))
        rows.append(("extend", backend, schemes.extend(base), lam))
        rows.append(("decouple_bit", backend, schemes.decouple_bit(base), lam))
        rows.append(("decouple_general", backend,
                     schemes.decouple_general(schemes.extend(base), bytes(range(16))), lam))
        rows.append(("wrap_cca2_bit", backend,
                     schemes.wrap_cca2_bit(schemes.decouple_bit(base)), lam))
        rows.append(("wrap_cca2_full", backend,
                     schemes.wrap_cca2_full(base, lam=16), lam))
    return rows


def _scheme_vectors() -> list[dict]:
    vectors = []
    for name, backend, inst, lam in _scheme_factories():
        ctx = TrialContext(_SCHEME_SEED, 0)
        key = inst.key_gen(lam, ctx.stream("f"))
        enc_rng = ctx.stream("enc")
        msgs = ["0", "1"] if inst.message_len_support == schemes.BIT_ONLY else ["0", "10110"]
        for m in msgs:
            ct = inst.encrypt(key, m, enc_rng)
            vectors.append({
                "scheme": name,
                "backend": backend,
                "seed": _SCHEME_SEED,
                "lam": lam,
                "message": m,
                "ct_hex": schemes.serialize_ct(ct).hex(),
            })
    return vectors


_GENERATORS = {"bbf": _bbf_vectors, "sig": _sig_vectors, "scheme": _scheme_vectors}


# ---------------------------------------------------------------------------
# Public interface


def regenerate(directory: Path, suite: str) -> Path:
    """Recompute a suite's vectors and write them; deterministic byte output."""
    path = _kat_path(directory, suite)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_GENERATORS[suite](), indent=1) + "\n")
    return path


def verify(directory: Path, suite: str) -> None:
    """Recompute every vector and compare; KatMismatch names the first miss."""
    path = _kat_path(directory, suite)
    if not path.exists():
        raise KatMismatch(f"missing KAT file {path}")
    stored = json.loads(path.read_text())
    fresh = _GENERATORS[suite]()
    if len(stored) != len(fresh):
        raise KatMismatch(f"{suite}: expected {len(fresh)} vectors, file has {len(stored)}")
    for i, (a, b) in enumerate(zip(stored, fresh)):
        if a != b:
            raise KatMismatch(f"{suite}: vector {i} mismatch")


def default_dir() -> Path:
    """The kats/ directory shipped at the repository root."""
    return Path(__file__).resolve().parents[2] / "kats"
