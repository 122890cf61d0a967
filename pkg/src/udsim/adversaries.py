"""Named adversaries, attacks, and reduction wrappers for the games module.

Strategy objects are immutable blueprints; anything a strategy needs to
remember within a trial goes into ``env.scratch`` (per-trial storage).  All
strategy randomness is drawn from named context streams, which keeps every
strategy deterministic given (master seed, trial) — the property the
shared-seed paired-execution reduction tests rely on.

Strategy protocol (duck-typed; games call only what they need):

* copy-protection games: ``qcp_pirate(programs, env) -> states``;
  ``answer_weak(i, state, x, ria_oracle, env)``,
  ``answer_flip(i, state, flip_oracle, ria_oracle, env)``,
  ``answer_lor(i, state, lor_oracle, env)`` -> bit.
* decryptor games: ``ud_pirate(decs, oracles, env) -> (states, pairs)``;
  ``ud_answer(i, state, ciphertext, oracles, env)`` -> bit.
* IND games: ``phase1(oracles, ctx) -> (m0, m1, state)``;
  ``phase2(state, c, oracles, ctx)`` -> bit.
* UL games: ``phase1(eval_oracle, ctx) -> state``; ``phase2(state, x, ctx)``
  or ``phase2_flip(state, flip_oracle, ctx)`` -> bit.
"""

from __future__ import annotations

import random
from dataclasses import replace
from typing import Optional

from . import bbf, qcp, schemes
from .errors import (
    BackendMismatch,
    InvalidParams,
    ListExhausted,
    QueryBudgetExceeded,
    UnknownName,
)
from .rngstream import random_bits


def _scratch(env) -> dict:
    if not hasattr(env, "scratch"):
        env.scratch = {}
    return env.scratch


def _adv_rng(env, i: int) -> random.Random:
    return env.ctx.stream(f"adv{i}")


# ---------------------------------------------------------------------------
# Honest baseline


class HonestBaseline:
    """Forward the n programs, pad with duds; evaluate/decrypt honestly."""

    name = "honest"

    def qcp_pirate(self, programs, env):
        return qcp.distribute(programs, env.n + env.k, env.ledger,
                              env.ctx.stream("pirate"))

    def answer_weak(self, i, state, x, ria_oracle, env):
        return qcp.eval_program(state, x)

    def answer_flip(self, i, state, oracle, ria_oracle, env):
        r, y = oracle.query()
        return y ^ qcp.eval_program(state, r)

    def answer_lor(self, i, state, oracle, env):
        x0, x1, y = oracle.query()
        return 0 if qcp.eval_program(state, x0) == y else 1

    def ud_pirate(self, decs, oracles, env):
        padded = qcp.distribute([d.program for d in decs], env.n + env.k,
                                env.ledger, env.ctx.stream("pirate"))
        states = list(decs) + [schemes.Decryptor(p) for p in padded[env.n:]]
        pairs = None if env.bit_variant else [("0", "1")] * (env.n + env.k)
        return states, pairs

    def ud_answer(self, i, state, c, oracles, env):
        if qcp.is_dud(state.program):
            return _adv_rng(env, i).getrandbits(1)
        m = env.scheme.decrypt_q(state, c)
        return int(m)


# ---------------------------------------------------------------------------
# Splitting attacks


class SplitFlipAttack:
    """Split the paired program; freeloader b answers any query landing in
    its half-domain, guessing only when all q queries miss."""

    def __init__(self, q: int):
        if q < 0:
            raise InvalidParams("query budget must be >= 0")
        self.q = q
        self.name = f"split_flip:q={q}"

    def qcp_pirate(self, programs, env):
        if env.backend_tag != qcp.SPLIT_PAIR or (env.n, env.k) != (1, 1):
            raise BackendMismatch("splitting needs the SplitPair backend with n=k=1")
        h0, h1 = qcp.split_pair(programs[0], env.ledger)
        return [h0, h1]

    def answer_flip(self, i, state, oracle, ria_oracle, env):
        half = i - 1  # freeloader i holds the half covering first bit i-1
        for _ in range(self.q):
            r, y = oracle.query()
            if int(r[0]) == half:
                return y ^ qcp.eval_program(state, r)
        return _adv_rng(env, i).getrandbits(1)


class SplitUd2Attack:
    """Non-extendability attack: challenge pairs ("00", "11"); each
    distinguisher decrypts whichever item its half-program covers."""

    name = "split_ud2"

    def ud_pirate(self, decs, oracles, env):
        if env.bit_variant:
            raise InvalidParams("split_ud2 needs plaintext pairs (bit_variant off)")
        pairs = [("00", "11")] * (env.n + env.k)
        if env.backend_tag == qcp.SPLIT_PAIR and (env.n, env.k) == (1, 1):
            h0, h1 = qcp.split_pair(decs[0].program, env.ledger)
            _scratch(env)["split"] = True
            states = [schemes.Decryptor(h0, decs[0].pk),
                      schemes.Decryptor(h1, decs[0].pk)]
            return states, pairs
        _scratch(env)["split"] = False
        padded = qcp.distribute([d.program for d in decs], env.n + env.k,
                                env.ledger, env.ctx.stream("pirate"))
        states = list(decs) + [schemes.Decryptor(p) for p in padded[env.n:]]
        return states, pairs

    def ud_answer(self, i, state, c, oracles, env):
        if not _scratch(env).get("split"):
            if qcp.is_dud(state.program):
                return _adv_rng(env, i).getrandbits(1)
            return int(env.scheme.decrypt_q(state, c)[0])
        half = i - 1
        for item in c.items:
            if int(item.r[0]) == half:
                return item.beta ^ qcp.eval_program(state.program, item.r)
        return _adv_rng(env, i).getrandbits(1)


# ---------------------------------------------------------------------------
# CCA2 manipulation attacks


def _flip_first_beta(c: schemes.Ciphertext) -> schemes.Ciphertext:
    if isinstance(c, schemes.BitCt):
        return schemes.BitCt(c.r, c.beta ^ 1)
    if isinstance(c, schemes.SeqCt):
        first = c.items[0]
        return schemes.SeqCt((schemes.BitCt(first.r, first.beta ^ 1),) + c.items[1:])
    if isinstance(c, schemes.SignedBitCt):
        return schemes.SignedBitCt(schemes.BitCt(c.inner.r, c.inner.beta ^ 1), c.sig)
    if isinstance(c, schemes.SignedSeqCt):
        (inner, sig), rest = c.items[0], c.items[1:]
        flipped = (schemes.BitCt(inner.r, inner.beta ^ 1), sig)
        return schemes.SignedSeqCt(c.serial, (flipped,) + rest)
    raise TypeError(f"not a ciphertext: {c!r}")


class MalleabilityCca2Attack(HonestBaseline):
    """Flip one bit of the challenge, decrypt via the phase-2 oracle, flip
    back; falls back to honest behavior when the oracle refuses."""

    name = "malleability"

    def ud_answer(self, i, state, c, oracles, env):
        env.count("flip_queries")
        m = oracles.dec.query(_flip_first_beta(c))
        if m is not None:
            env.count("malleability_wins")
            return int(m[0]) ^ 1
        # Signed scheme rejected the mangled cipher: honest fallback.
        return super().ud_answer(i, state, c, oracles, env)


class SeqManipulationAttack(HonestBaseline):
    """Truncate / rearrange / splice the challenge sequence and decrypt it
    through the phase-2 oracle; honest fallback on rejection."""

    def __init__(self, mode: str):
        if mode not in ("truncate", "rearrange", "splice"):
            raise InvalidParams(f"unknown manipulation mode {mode!r}")
        self.mode = mode
        self.name = mode

    def ud_pirate(self, decs, oracles, env):
        states, _ = super().ud_pirate(decs, oracles, env)
        m_pair = ("01", "10") if self.mode == "rearrange" else ("00", "11")
        return states, [m_pair] * (env.n + env.k)

    def _mangle(self, c, oracles, env):
        if isinstance(c, schemes.SeqCt):
            if self.mode == "truncate":
                return schemes.SeqCt(c.items[:1])
            if self.mode == "rearrange":
                return schemes.SeqCt(c.items[::-1])
            extra = oracles.enc.query("0")
            return schemes.SeqCt((c.items[0], extra.items[0]))
        if isinstance(c, schemes.SignedSeqCt):
            if self.mode == "truncate":
                return schemes.SignedSeqCt(c.serial, c.items[:1])
            if self.mode == "rearrange":
                return schemes.SignedSeqCt(c.serial, c.items[::-1])
            extra = oracles.enc.query("0")
            return schemes.SignedSeqCt(c.serial, (c.items[0], extra.items[0]))
        raise TypeError("sequence manipulation needs a sequence ciphertext")

    def ud_answer(self, i, state, c, oracles, env):
        env.count("mangle_queries")
        m = oracles.dec.query(self._mangle(c, oracles, env))
        if m is not None:
            env.count("mangle_wins")
            if self.mode == "rearrange":
                m = m[::-1]
            return int(m[0])
        if qcp.is_dud(state.program):
            return _adv_rng(env, i).getrandbits(1)
        return int(env.scheme.decrypt_q(state, c)[0])


# ---------------------------------------------------------------------------
# Simple evaluator strategies (inner pieces for the wrappers)


class ProgramEvaluator(HonestBaseline):
    """Answers WEAK challenges by evaluating its state; guesses on duds or
    out-of-domain inputs (covers split halves)."""

    name = "program_eval"

    def answer_weak(self, i, state, x, ria_oracle, env):
        try:
            return qcp.eval_program(state, x)
        except Exception:
            return _adv_rng(env, i).getrandbits(1)


class SplitProgramEvaluator(ProgramEvaluator):
    """Splits the paired program; each freeloader evaluates its half-domain
    and guesses out of domain."""

    name = "split_program_eval"

    def qcp_pirate(self, programs, env):
        if env.backend_tag != qcp.SPLIT_PAIR or (env.n, env.k) != (1, 1):
            raise BackendMismatch("splitting needs the SplitPair backend with n=k=1")
        h0, h1 = qcp.split_pair(programs[0], env.ledger)
        return [h0, h1]


class AlwaysWrongEvaluator(HonestBaseline):
    """Negative control: returns the complement of the true evaluation."""

    name = "always_wrong"

    def answer_weak(self, i, state, x, ria_oracle, env):
        if qcp.is_dud(state):
            return qcp.eval_program(state, x)
        return 1 ^ qcp.eval_program(state, x)


class ConstantGuesser(HonestBaseline):
    """Outputs a constant bit everywhere (zero-query baseline)."""

    name = "constant"

    def __init__(self, bit: int = 0):
        self.bit = bit

    def answer_weak(self, i, state, x, ria_oracle, env):
        return self.bit

    def answer_flip(self, i, state, oracle, ria_oracle, env):
        return self.bit

    def answer_lor(self, i, state, oracle, env):
        return self.bit

    def ud_answer(self, i, state, c, oracles, env):
        return self.bit


# ---------------------------------------------------------------------------
# Reduction wrappers


class FlipToWeakWrapper:
    """Lift a WEAK-QCP strategy to FLIP-QCP with a single flip query."""

    def __init__(self, inner):
        self.inner = inner
        self.name = f"flip_to_weak({getattr(inner, 'name', 'custom')})"

    def qcp_pirate(self, programs, env):
        return self.inner.qcp_pirate(programs, env)

    def answer_flip(self, i, state, oracle, ria_oracle, env):
        r, y = oracle.query()
        return y ^ self.inner.answer_weak(i, state, r, ria_oracle, env)


class LorToWeakWrapper:
    """Lift a WEAK-QCP evaluator to LoR-QCP: output 0 iff it reproduces y."""

    def __init__(self, inner):
        self.inner = inner
        self.name = f"lor_to_weak({getattr(inner, 'name', 'custom')})"

    def qcp_pirate(self, programs, env):
        return self.inner.qcp_pirate(programs, env)

    def answer_lor(self, i, state, oracle, env):
        x0, x1, y = oracle.query()
        return 0 if self.inner.answer_weak(i, state, x0, None, env) == y else 1


class _ListOracle:
    """Replays a pre-sampled (r, f(r)) list in place of a live oracle."""

    def __init__(self, entries: list):
        self.entries = list(entries)

    def query(self):
        if not self.entries:
            raise ListExhausted("pre-sampled evaluation list consumed")
        return self.entries.pop(0)


class RiaPirateWrapper:
    """Strip the random-input oracle: the pirate pre-evaluates q points with
    one program and every freeloader consumes that list instead."""

    def __init__(self, inner, q: int):
        self.inner, self.q = inner, q
        self.name = f"ria_pirate({getattr(inner, 'name', 'custom')},q={q})"

    def qcp_pirate(self, programs, env):
        if not programs:
            raise InvalidParams("pre-sampling needs at least one program")
        rng = env.ctx.stream("pirate_ria")
        entries = []
        for _ in range(self.q):
            r = random_bits(rng, qcp.input_len(programs[0]))
            entries.append((r, qcp.eval_program(programs[0], r)))
        _scratch(env)["ria_list"] = entries
        return self.inner.qcp_pirate(programs, env)

    def _list_oracle(self, env, i):
        key = ("ria_iter", i)
        sc = _scratch(env)
        if key not in sc:
            sc[key] = _ListOracle(sc["ria_list"])
        return sc[key]

    def answer_weak(self, i, state, x, ria_oracle, env):
        return self.inner.answer_weak(i, state, x, self._list_oracle(env, i), env)

    def answer_flip(self, i, state, oracle, ria_oracle, env):
        return self.inner.answer_flip(i, state, oracle, self._list_oracle(env, i), env)


class UdToIndWrapper:
    """Play UD^{1,1} from an IND adversary: slot 1 runs the inner adversary
    on the pair (m0, m1), slot 2 decrypts the pair ("0", "1") with the
    forwarded decryptor, winning with certainty."""

    def __init__(self, inner):
        self.inner = inner
        self.name = f"ud_to_ind({getattr(inner, 'name', 'custom')})"

    def ud_pirate(self, decs, oracles, env):
        if (env.n, env.k) != (1, 1) or env.bit_variant:
            raise InvalidParams("wrapper plays the UD^{1,1} full variant")
        m0, m1, st = self.inner.phase1(oracles, env.ctx)
        # Pad the ledger to n+k live handles alongside the kept decryptor.
        qcp.distribute([decs[0].program], 2, env.ledger, env.ctx.stream("pirate"))
        return [st, decs[0]], [(m0, m1), ("0", "1")]

    def ud_answer(self, i, state, c, oracles, env):
        if i == 1:
            return self.inner.phase2(state, c, oracles, env.ctx)
        return int(env.scheme.decrypt_q(state, c))


class UlFlipForward:
    """Lift a UL learner to FLIP-UL with a single flip query."""

    def __init__(self, inner):
        self.inner = inner
        self.name = f"ul_flip_forward({getattr(inner, 'name', 'custom')})"

    def phase1(self, oracle, ctx):
        return self.inner.phase1(oracle, ctx)

    def phase2_flip(self, state, oracle, ctx):
        r, z = oracle.query()
        return z ^ self.inner.phase2(state, r, ctx)


class UlFlipHybrid:
    """Play UL from a FLIP-UL learner via the random-position hybrid: the
    challenge is planted as (x, 0) at a uniform query position, correct
    pairs before it and flipped pairs after it."""

    def __init__(self, inner, q: int):
        if q < 1:
            raise InvalidParams("hybrid needs a positive query budget")
        self.inner, self.q = inner, q
        self.name = f"ul_flip_hybrid({getattr(inner, 'name', 'custom')},q={q})"

    def phase1(self, oracle, ctx):
        st = self.inner.phase1(oracle, ctx)
        rng = ctx.stream("hybrid_pairs")
        pairs = []
        for _ in range(self.q):
            r = random_bits(rng, oracle.f.input_len)
            pairs.append((r, oracle.query(r)))
        return st, pairs

    def phase2(self, state, x, ctx):
        st, pairs = state
        iota = ctx.stream("hybrid_pos").randint(1, self.q)
        budget = self.q

        class _Fake:
            def __init__(self):
                self.j = 0

            def query(fake):
                fake.j += 1
                if fake.j > budget:
                    raise QueryBudgetExceeded(f"more than {budget} flip queries")
                if fake.j < iota:
                    return pairs[fake.j - 1]
                if fake.j == iota:
                    return x, 0
                r, y = pairs[fake.j - 1]
                return r, y ^ 1

        return self.inner.phase2_flip(st, _Fake(), ctx)


class WprfFromLorCpa:
    """Play LoR-CPA from a weak-PRF distinguisher by submitting (0, z) pairs
    and forwarding the ciphertext components as oracle replies."""

    def __init__(self, inner):
        self.inner = inner
        self.name = f"wprf_from_lorcpa({getattr(inner, 'name', getattr(inner, '__name__', 'custom'))})"

    def __call__(self, submit, ctx):
        zrng = ctx.stream("adv1")
        transcript = []

        class _Oracle:
            def query(self):
                z = zrng.getrandbits(1)
                ct = submit("0", str(z))
                transcript.append((ct.r, ct.beta))
                return ct.r, ct.beta

        guess = self.inner(_Oracle(), ctx)
        self.last_transcript = transcript
        return guess


def sim_dec_oracle(log: list):
    """Simulated decryption oracle: answer by lookup in a list of
    (ciphertext, signature, plaintext) records, None on miss."""
    table = {}
    for ct, sig, m in log:
        data = schemes.serialize_ct(ct) if not isinstance(ct, bytes) else ct
        table[(data, sig)] = m

    def query(ct, sig=None):
        data = schemes.serialize_ct(ct) if not isinstance(ct, bytes) else ct
        if sig is None and isinstance(ct, schemes.SignedBitCt):
            data, sig = schemes.serialize_ct(ct.inner), ct.sig
        return table.get((data, sig))

    return query


# ---------------------------------------------------------------------------
# Simple learners / distinguishers


class MemorizingLearner:
    """Queries the whole (small) domain in phase 1, answers by table lookup."""

    name = "memorize"

    def phase1(self, oracle, ctx):
        n = oracle.f.input_len
        return {format(i, f"0{n}b"): oracle.query(format(i, f"0{n}b"))
                for i in range(1 << n)}

    def phase2(self, state, x, ctx):
        return state[x]

    def phase2_flip(self, state, oracle, ctx):
        r, z = oracle.query()
        return z ^ state[r]


class NoQueryLearner:
    """Makes no learning queries; guesses the challenge."""

    name = "no_query"

    def phase1(self, oracle, ctx):
        return None

    def phase2(self, state, x, ctx):
        return ctx.stream("adv1").getrandbits(1)

    def phase2_flip(self, state, oracle, ctx):
        return ctx.stream("adv1").getrandbits(1)


class MajorityDistinguisher:
    """Weak-PRF distinguisher: call the oracle q times and guess "real
    function" iff at most q/4 of the value bits are ones (separates the
    constant-zero family from a random function)."""

    def __init__(self, q: int = 32):
        self.q = q
        self.name = f"majority:q={q}"

    def __call__(self, oracle, ctx):
        ones = sum(oracle.query()[1] for _ in range(self.q))
        return 0 if ones <= self.q // 4 else 1


class ZeroQueryDistinguisher:
    name = "zero_query"

    def __call__(self, oracle, ctx):
        return ctx.stream("adv1").getrandbits(1)


class RandomIndGuesser:
    """IND adversary that submits ("0", "1") and guesses uniformly."""

    name = "random_guess"

    def phase1(self, oracles, ctx):
        return "0", "1", None

    def phase2(self, state, c, oracles, ctx):
        return ctx.stream("adv1").getrandbits(1)


class MalleabilityIndDistinguisher:
    """IND-CCA2 distinguisher: decrypt the flipped challenge via the oracle."""

    name = "malleability_ind"

    def __init__(self, m0: str = "0", m1: str = "1"):
        self.m0, self.m1 = m0, m1

    def phase1(self, oracles, ctx):
        return self.m0, self.m1, None

    def phase2(self, state, c, oracles, ctx):
        m = oracles.dec.query(_flip_first_beta(c))
        if m is None:
            return ctx.stream("adv1").getrandbits(1)
        m = ("1" if m[0] == "0" else "0") + m[1:]
        if m == self.m0:
            return 0
        if m == self.m1:
            return 1
        return ctx.stream("adv1").getrandbits(1)


# ---------------------------------------------------------------------------
# Forgers


def trivial_forger(sign_oracle, pk, ctx):
    """No queries; emits a fixed junk pair (wins only against Malleable)."""
    return b"forged-message", b"\x00"


def replay_forger(sign_oracle, pk, ctx):
    """Replays a signed pair verbatim; always in the oracle log, never wins."""
    m = b"replayed-message"
    return m, sign_oracle(m)


def bitflip_forger(sign_oracle, pk, ctx):
    """Flips one signature bit of a signed pair; must fail verification."""
    m = b"mangled-message"
    s = bytearray(sign_oracle(m))
    rng = ctx.stream("adv1")
    s[rng.randrange(len(s))] ^= 1 << rng.randrange(8)
    return m, bytes(s)


# ---------------------------------------------------------------------------
# Registry


def make(spec: str):
    """Build a strategy from a registry string like ``split_flip:q=2``."""
    name, _, raw = spec.partition(":")
    params: dict = {}
    for part in filter(None, raw.split(",")):
        k, _, v = part.partition("=")
        params[k] = int(v) if v.lstrip("-").isdigit() else v
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownName(f"unknown adversary {name!r}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise InvalidParams(str(exc)) from None


_REGISTRY = {
    "honest": HonestBaseline,
    "split_flip": SplitFlipAttack,
    "split_ud2": SplitUd2Attack,
    "malleability": MalleabilityCca2Attack,
    "truncate": lambda: SeqManipulationAttack("truncate"),
    "rearrange": lambda: SeqManipulationAttack("rearrange"),
    "splice": lambda: SeqManipulationAttack("splice"),
    "constant": ConstantGuesser,
    "program_eval": ProgramEvaluator,
    "split_program_eval": SplitProgramEvaluator,
    "always_wrong": AlwaysWrongEvaluator,
    "flip_to_weak_honest": lambda: FlipToWeakWrapper(HonestBaseline()),
    "trivial_forger": lambda: trivial_forger,
    "replay_forger": lambda: replay_forger,
    "bitflip_forger": lambda: bitflip_forger,
    "memorize": MemorizingLearner,
    "no_query": NoQueryLearner,
    "majority": MajorityDistinguisher,
    "zero_query": ZeroQueryDistinguisher,
    "random_guess": RandomIndGuesser,
    "malleability_ind": MalleabilityIndDistinguisher,
}


def registry_names() -> list[str]:
    return sorted(_REGISTRY)
