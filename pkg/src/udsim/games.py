"""Security games as seeded Monte-Carlo harnesses.

Each ``run_*`` function plays one game for ``trials`` independent trials and
returns a :class:`GameReport` with a histogram of per-trial outputs, a
Hoeffding confidence interval, and a three-way verdict against the game's
honest threshold.

All randomness is drawn from named per-(trial, role) streams derived from
the master seed (see :mod:`udsim.rngstream`).  The same role names are used
for the same purposes across games — e.g. the challenge input of freeloader
i is stream ``x{i}`` whether it is handed over directly (WEAK) or embedded
in oracle replies (FLIP) — which is what makes shared-seed paired-execution
comparisons of reductions exact rather than statistical.

All oracles take classical queries only; superposition access is a declared
restriction of the model, not an approximation.
"""

from __future__ import annotations

import json
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

from . import bbf, qcp, schemes, signatures
from .errors import (
    AdversaryProtocolViolation,
    ChallengeLengthMismatch,
    InvalidParams,
    ResampleExhausted,
)
from .rngstream import TrialContext, random_bits

# Oracle profiles (which decryption oracles the adversary gets, per phase).
PROFILE_NONE = "none"
PROFILE_CPA = "cpa"
PROFILE_CCA1 = "cca1"
PROFILE_CCA2 = "cca2"
PROFILES = (PROFILE_NONE, PROFILE_CPA, PROFILE_CCA1, PROFILE_CCA2)

WITHIN_BOUND = "WithinBound"
EXCEEDS_BOUND = "ExceedsBound"
INCONCLUSIVE = "Inconclusive"

DELTA = 0.01
LOR_RESAMPLE_BOUND = 128


# ---------------------------------------------------------------------------
# Reports


@dataclass
class GameReport:
    game_name: str
    params: dict
    histogram: list[int]
    mean: float
    ci_half_width: float
    threshold: float
    verdict: str
    seed: int
    wallclock_ms: float
    counters: dict
    # Raw per-trial outputs, kept for paired-execution comparisons; not
    # part of the serialized report.
    outcomes: list = field(default_factory=list, repr=False)

    def to_dict(self, include_wallclock: bool = True) -> dict:
        d = {
            "game": self.game_name,
            "params": self.params,
            "histogram": self.histogram,
            "mean": self.mean,
            "ci": self.ci_half_width,
            "threshold": self.threshold,
            "verdict": self.verdict,
            "seed": self.seed,
            "counters": self.counters,
        }
        if include_wallclock:
            d["wallclock_ms"] = self.wallclock_ms
        return d

    def canonical_json(self) -> str:
        """Byte-stable serialization: identical runs produce identical text."""
        return json.dumps(self.to_dict(include_wallclock=False), sort_keys=True)


def _make_report(game_name: str, params: dict, outcomes: list[int], out_range: int,
                 threshold: float, seed: int, slack: Optional[float],
                 counters: dict, wallclock_ms: float) -> GameReport:
    trials = len(outcomes)
    hist = [0] * (out_range + 1)
    for o in outcomes:
        hist[o] += 1
    mean = sum(outcomes) / trials
    ci = out_range * math.sqrt(math.log(2 / DELTA) / (2 * trials))
    if slack is None:
        slack = 0.02 * out_range
    if mean - ci > threshold:
        verdict = EXCEEDS_BOUND
    elif mean + ci <= threshold + slack:
        verdict = WITHIN_BOUND
    else:
        verdict = INCONCLUSIVE
    return GameReport(game_name, params, hist, mean, ci, threshold, verdict,
                      seed, wallclock_ms, counters, outcomes)


def _run_trials(trial_fn: Callable[[int], tuple[int, dict]], trials: int,
                threads: int = 1) -> tuple[list[int], dict]:
    """Run trials (optionally thread-pooled); aggregation is order-stable."""
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(trial_fn, range(trials)))
    else:
        results = [trial_fn(t) for t in range(trials)]
    counters: dict = {}
    for _, c in results:
        for k, v in c.items():
            counters[k] = counters.get(k, 0) + v
    return [r for r, _ in results], counters


# ---------------------------------------------------------------------------
# Oracles


class FlipOracle:
    """Each query returns (r, f(r) xor b) with fresh uniform r."""

    def __init__(self, f: bbf.BbfDescriptor, b: int, rng: random.Random):
        self.f, self.b, self.rng = f, b, rng
        self.log: list[tuple[str, int]] = []

    def query(self) -> tuple[str, int]:
        r = random_bits(self.rng, self.f.input_len)
        y = bbf.eval(self.f, r) ^ self.b
        self.log.append((r, y))
        return r, y


class RandomInputOracle:
    """Each query returns (r, f(r)) with fresh uniform r."""

    def __init__(self, f: bbf.BbfDescriptor, rng: random.Random):
        self.f, self.rng = f, rng
        self.log: list[tuple[str, int]] = []

    def query(self) -> tuple[str, int]:
        r = random_bits(self.rng, self.f.input_len)
        y = bbf.eval(self.f, r)
        self.log.append((r, y))
        return r, y


class LorOracle:
    """Returns (x0, x1, f(x_b)) with f(x0) != f(x1), resampling bounded."""

    def __init__(self, f: bbf.BbfDescriptor, b: int, rng: random.Random):
        self.f, self.b, self.rng = f, b, rng

    def query(self) -> tuple[str, str, int]:
        x0 = random_bits(self.rng, self.f.input_len)
        y0 = bbf.eval(self.f, x0)
        for _ in range(LOR_RESAMPLE_BOUND):
            x1 = random_bits(self.rng, self.f.input_len)
            if bbf.eval(self.f, x1) != y0:
                xb = (x0, x1)[self.b]
                return x0, x1, bbf.eval(self.f, xb)
        raise ResampleExhausted(
            f"no differing-value input found in {LOR_RESAMPLE_BOUND} resamples")


class EvalOracle:
    """Classical chosen-input evaluation oracle for f."""

    def __init__(self, f: bbf.BbfDescriptor):
        self.f = f
        self.queries = 0

    def query(self, x: str) -> int:
        self.queries += 1
        return bbf.eval(self.f, x)


class EncOracle:
    """Encryption oracle with its own randomness stream; logs ciphertexts."""

    def __init__(self, scheme: schemes.SchemeInstance, key: schemes.UdKey,
                 rng: random.Random):
        self.scheme, self.key, self.rng = scheme, key, rng
        self.log: list[tuple[schemes.Ciphertext, str]] = []

    def query(self, m: str) -> schemes.Ciphertext:
        ct = self.scheme.encrypt(self.key, m, self.rng)
        self.log.append((ct, m))
        return ct


class DecOracle:
    """Decryption oracle; optionally excludes one challenge byte-exactly."""

    def __init__(self, scheme: schemes.SchemeInstance, key: schemes.UdKey,
                 excluded: Optional[bytes], counters: dict):
        self.scheme, self.key = scheme, key
        self.excluded = excluded
        self.counters = counters
        self.log: list[tuple[schemes.Ciphertext, Optional[str]]] = []

    def query(self, ct: schemes.Ciphertext) -> Optional[str]:
        self.counters["dec_queries"] = self.counters.get("dec_queries", 0) + 1
        if self.excluded is not None and schemes.serialize_ct(ct) == self.excluded:
            self.counters["dec_challenge_blocked"] = \
                self.counters.get("dec_challenge_blocked", 0) + 1
            self.log.append((ct, None))
            return None
        m = self.scheme.decrypt_key(self.key, ct)
        if m is None:
            self.counters["dec_bottom"] = self.counters.get("dec_bottom", 0) + 1
        self.log.append((ct, m))
        return m


@dataclass
class Oracles:
    enc: Optional[EncOracle] = None
    dec: Optional[DecOracle] = None


# ---------------------------------------------------------------------------
# Game environment handed to adversaries


@dataclass
class GameEnv:
    ctx: TrialContext
    ledger: qcp.ResourceLedger
    n: int
    k: int
    backend_tag: Optional[str] = None
    scheme: Optional[schemes.SchemeInstance] = None
    bit_variant: bool = False
    profile: str = PROFILE_NONE
    lam: int = 64
    counters: dict = field(default_factory=dict)

    def count(self, name: str, inc: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + inc


def _check_nk(n: int, k: int) -> None:
    # n=0 is degenerate (nothing to pirate) and disallowed.
    if n < 1 or k < 0:
        raise InvalidParams("need n >= 1 and k >= 0")


def _sample_game_bbf(backend_tag: str, lam: int, rng: random.Random) -> bbf.BbfDescriptor:
    if backend_tag == qcp.SPLIT_PAIR:
        return bbf.pair_compose(bbf.sample(bbf.KEYED_MIX, lam, rng),
                                bbf.sample(bbf.KEYED_MIX, lam, rng))
    return bbf.sample(bbf.KEYED_MIX, lam, rng)


def _check_states(states, n: int, k: int) -> None:
    if len(states) != n + k:
        raise AdversaryProtocolViolation(
            f"pirate emitted {len(states)} states, expected {n + k}")


def _check_ledger(ledger: qcp.ResourceLedger, n: int, k: int) -> None:
    if len(ledger.live_handles) != n + k:
        raise AdversaryProtocolViolation(
            f"{len(ledger.live_handles)} live handles at trial end, expected {n + k}")


# ---------------------------------------------------------------------------
# Copy-protection games


def run_weak_qcp(backend_tag: str, n: int, k: int, adversary, trials: int,
                 seed: int, ria: bool = False, lam: int = 64,
                 slack: Optional[float] = None, threads: int = 1) -> GameReport:
    """Each freeloader must evaluate f at a fresh uniform point."""
    _check_nk(n, k)

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        ledger = qcp.ResourceLedger()
        f = _sample_game_bbf(backend_tag, lam, ctx.stream("f"))
        programs = [qcp.protect(backend_tag, f, ledger, ctx.stream(f"protect{j}"))
                    for j in range(1, n + 1)]
        env = GameEnv(ctx, ledger, n, k, backend_tag=backend_tag, lam=lam)
        states = adversary.qcp_pirate(programs, env)
        _check_states(states, n, k)
        correct = 0
        for i in range(1, n + k + 1):
            x = random_bits(ctx.stream(f"x{i}"), f.input_len)
            oracle = RandomInputOracle(f, ctx.stream(f"ria{i}")) if ria else None
            y = adversary.answer_weak(i, states[i - 1], x, oracle, env)
            correct += int(y == bbf.eval(f, x))
        _check_ledger(ledger, n, k)
        return correct, env.counters

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"backend": backend_tag, "n": n, "k": k, "trials": trials,
              "oracle_profile": "ria" if ria else "none", "lam": lam,
              "adversary": getattr(adversary, "name", "custom")}
    return _make_report("weak_qcp", params, outcomes, n + k, n + k / 2, seed,
                        slack, counters, 1000 * (time.perf_counter() - t0))


def run_flip_qcp(backend_tag: str, n: int, k: int, adversary, trials: int,
                 seed: int, ria: bool = False, lam: int = 64,
                 slack: Optional[float] = None, threads: int = 1) -> GameReport:
    """Each freeloader gets an oracle emitting (r, f(r) xor b_i), guesses b_i."""
    _check_nk(n, k)

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        ledger = qcp.ResourceLedger()
        f = _sample_game_bbf(backend_tag, lam, ctx.stream("f"))
        programs = [qcp.protect(backend_tag, f, ledger, ctx.stream(f"protect{j}"))
                    for j in range(1, n + 1)]
        env = GameEnv(ctx, ledger, n, k, backend_tag=backend_tag, lam=lam)
        states = adversary.qcp_pirate(programs, env)
        _check_states(states, n, k)
        correct = 0
        for i in range(1, n + k + 1):
            b = ctx.stream(f"b{i}").getrandbits(1)
            oracle = FlipOracle(f, b, ctx.stream(f"x{i}"))
            ria_oracle = RandomInputOracle(f, ctx.stream(f"ria{i}")) if ria else None
            guess = adversary.answer_flip(i, states[i - 1], oracle, ria_oracle, env)
            correct += int(guess == b)
        _check_ledger(ledger, n, k)
        return correct, env.counters

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"backend": backend_tag, "n": n, "k": k, "trials": trials,
              "oracle_profile": "ria" if ria else "none", "lam": lam,
              "adversary": getattr(adversary, "name", "custom")}
    return _make_report("flip_qcp", params, outcomes, n + k, n + k / 2, seed,
                        slack, counters, 1000 * (time.perf_counter() - t0))


def run_lor_qcp(backend_tag: str, n: int, k: int, adversary, trials: int,
                seed: int, lam: int = 64, slack: Optional[float] = None,
                threads: int = 1) -> GameReport:
    """Freeloaders see (x0, x1, f(x_b)) with differing values, guess b."""
    _check_nk(n, k)

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        ledger = qcp.ResourceLedger()
        f = _sample_game_bbf(backend_tag, lam, ctx.stream("f"))
        programs = [qcp.protect(backend_tag, f, ledger, ctx.stream(f"protect{j}"))
                    for j in range(1, n + 1)]
        env = GameEnv(ctx, ledger, n, k, backend_tag=backend_tag, lam=lam)
        states = adversary.qcp_pirate(programs, env)
        _check_states(states, n, k)
        correct = 0
        for i in range(1, n + k + 1):
            b = ctx.stream(f"b{i}").getrandbits(1)
            oracle = LorOracle(f, b, ctx.stream(f"x{i}"))
            guess = adversary.answer_lor(i, states[i - 1], oracle, env)
            correct += int(guess == b)
        _check_ledger(ledger, n, k)
        return correct, env.counters

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"backend": backend_tag, "n": n, "k": k, "trials": trials,
              "oracle_profile": "none", "lam": lam,
              "adversary": getattr(adversary, "name", "custom")}
    return _make_report("lor_qcp", params, outcomes, n + k, n + k / 2, seed,
                        slack, counters, 1000 * (time.perf_counter() - t0))


# ---------------------------------------------------------------------------
# Uncloneable-decryptor games


def run_ud(scheme: schemes.SchemeInstance, n: int, k: int, adversary,
           profile: str, trials: int, seed: int, bit_variant: bool = False,
           lam: int = 64, slack: Optional[float] = None,
           threads: int = 1) -> GameReport:
    """UD indistinguishability game over n decryptors and n+k distinguishers."""
    _check_nk(n, k)
    if profile not in PROFILES:
        raise InvalidParams(f"unknown oracle profile {profile!r}")

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        ledger = qcp.ResourceLedger()
        key = scheme.key_gen(lam, ctx.stream("f"))
        decs = [scheme.dec_gen(key, ledger, ctx.stream(f"protect{j}"))
                for j in range(1, n + 1)]
        env = GameEnv(ctx, ledger, n, k, backend_tag=scheme.backend_tag,
                      scheme=scheme, bit_variant=bit_variant, profile=profile,
                      lam=lam)
        enc1 = EncOracle(scheme, key, ctx.stream("oenc")) if profile != PROFILE_NONE else None
        dec1 = (DecOracle(scheme, key, None, env.counters)
                if profile in (PROFILE_CCA1, PROFILE_CCA2) else None)
        states, pairs = adversary.ud_pirate(decs, Oracles(enc1, dec1), env)
        _check_states(states, n, k)
        if not bit_variant:
            if pairs is None or len(pairs) != n + k:
                raise AdversaryProtocolViolation("need one plaintext pair per slot")
            for m0, m1 in pairs:
                if len(m0) != len(m1):
                    raise ChallengeLengthMismatch(f"|{m0}| != |{m1}|")
        correct = 0
        for i in range(1, n + k + 1):
            b = ctx.stream(f"b{i}").getrandbits(1)
            m = str(b) if bit_variant else pairs[i - 1][b]
            c = scheme.encrypt(key, m, ctx.stream(f"enc{i}"))
            enc2 = EncOracle(scheme, key, ctx.stream(f"oenc2_{i}")) \
                if profile != PROFILE_NONE else None
            dec2 = (DecOracle(scheme, key, schemes.serialize_ct(c), env.counters)
                    if profile == PROFILE_CCA2 else None)
            guess = adversary.ud_answer(i, states[i - 1], c, Oracles(enc2, dec2), env)
            correct += int(guess == b)
        _check_ledger(ledger, n, k)
        return correct, env.counters

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"scheme": scheme.name, "n": n, "k": k, "trials": trials,
              "oracle_profile": profile, "bit_variant": bit_variant, "lam": lam,
              "adversary": getattr(adversary, "name", "custom")}
    return _make_report("ud1" if bit_variant else "ud", params, outcomes, n + k,
                        n + k / 2, seed, slack, counters,
                        1000 * (time.perf_counter() - t0))


# ---------------------------------------------------------------------------
# Symmetric-scheme games


def run_seuf_cma(scheme_tag: str, forger, max_queries: int, trials: int,
                 seed: int, lam: int = 64, slack: Optional[float] = None,
                 threads: int = 1) -> GameReport:
    """Strong existential unforgeability under a logging signing oracle."""
    if max_queries > signatures.LEAVES:
        raise InvalidParams("max_queries exceeds signature capacity")

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        kp = signatures.keygen(scheme_tag, lam, ctx.stream("f"))
        log: list[tuple[bytes, bytes]] = []

        def sign_oracle(m: bytes) -> bytes:
            if len(log) >= max_queries:
                raise InvalidParams("forger exceeded max_queries")
            s = signatures.sign(kp, m)
            log.append((m, s))
            return s

        m, s = forger(sign_oracle, kp.public, ctx)
        win = signatures.verify(kp.public, m, s) == 1 and (m, s) not in log
        return int(win), {}

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"scheme": scheme_tag, "n": 0, "k": 1, "trials": trials,
              "max_queries": max_queries,
              "adversary": getattr(forger, "name", getattr(forger, "__name__", "custom"))}
    return _make_report("seuf_cma", params, outcomes, 1, 0.0, seed, slack,
                        counters, 1000 * (time.perf_counter() - t0))


def run_lor_cpa(se: schemes.SchemeInstance, adversary, trials: int, seed: int,
                lam: int = 64, slack: Optional[float] = None,
                threads: int = 1) -> GameReport:
    """Left-or-right CPA: every submitted pair is answered with enc(m_b)."""

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        key = se.key_gen(lam, ctx.stream("f"))
        b = ctx.stream("b1").getrandbits(1)
        enc_rng = ctx.stream("osamp")

        def submit(m0: str, m1: str) -> schemes.Ciphertext:
            if len(m0) != len(m1):
                raise ChallengeLengthMismatch(f"|{m0}| != |{m1}|")
            return se.encrypt(key, (m0, m1)[b], enc_rng)

        guess = adversary(submit, ctx)
        return int(guess == b), {}

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"scheme": se.name, "n": 0, "k": 1, "trials": trials, "lam": lam,
              "adversary": getattr(adversary, "name", getattr(adversary, "__name__", "custom"))}
    return _make_report("lor_cpa", params, outcomes, 1, 0.5, seed, slack,
                        counters, 1000 * (time.perf_counter() - t0))


def run_ind(se: schemes.SchemeInstance, adversary, profile: str, trials: int,
            seed: int, lam: int = 64, slack: Optional[float] = None,
            threads: int = 1) -> GameReport:
    """Single-challenge indistinguishability with classical-query oracles."""
    if profile not in PROFILES:
        raise InvalidParams(f"unknown oracle profile {profile!r}")

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        counters: dict = {}
        key = se.key_gen(lam, ctx.stream("f"))
        enc1 = EncOracle(se, key, ctx.stream("oenc")) if profile != PROFILE_NONE else None
        dec1 = (DecOracle(se, key, None, counters)
                if profile in (PROFILE_CCA1, PROFILE_CCA2) else None)
        m0, m1, state = adversary.phase1(Oracles(enc1, dec1), ctx)
        if len(m0) != len(m1):
            raise ChallengeLengthMismatch(f"|{m0}| != |{m1}|")
        b = ctx.stream("b1").getrandbits(1)
        c = se.encrypt(key, (m0, m1)[b], ctx.stream("enc1"))
        enc2 = EncOracle(se, key, ctx.stream("oenc2_1")) if profile != PROFILE_NONE else None
        dec2 = (DecOracle(se, key, schemes.serialize_ct(c), counters)
                if profile == PROFILE_CCA2 else None)
        guess = adversary.phase2(state, c, Oracles(enc2, dec2), ctx)
        return int(guess == b), counters

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"scheme": se.name, "n": 0, "k": 1, "trials": trials,
              "oracle_profile": profile, "lam": lam,
              "adversary": getattr(adversary, "name", "custom")}
    return _make_report("ind", params, outcomes, 1, 0.5, seed, slack, counters,
                        1000 * (time.perf_counter() - t0))


def run_ul(family_id: str, learner, trials: int, seed: int,
           flip_variant: bool = False, lam: int = 64,
           slack: Optional[float] = None, threads: int = 1) -> GameReport:
    """Unlearnability: classical-query learning phase, then a challenge."""

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        f = bbf.sample(family_id, lam, ctx.stream("f"))
        state = learner.phase1(EvalOracle(f), ctx)
        if flip_variant:
            b = ctx.stream("b1").getrandbits(1)
            oracle = FlipOracle(f, b, ctx.stream("x1"))
            guess = learner.phase2_flip(state, oracle, ctx)
            return int(guess == b), {}
        x = random_bits(ctx.stream("x1"), f.input_len)
        y = learner.phase2(state, x, ctx)
        return int(y == bbf.eval(f, x)), {}

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"family": family_id, "n": 0, "k": 1, "trials": trials,
              "flip_variant": flip_variant, "lam": lam,
              "adversary": getattr(learner, "name", "custom")}
    return _make_report("flip_ul" if flip_variant else "ul", params, outcomes,
                        1, 0.5, seed, slack, counters,
                        1000 * (time.perf_counter() - t0))


def run_wprf(family_id: str, distinguisher, trials: int, seed: int,
             lam: int = 64, slack: Optional[float] = None,
             threads: int = 1) -> GameReport:
    """Weak-PRF game: oracle serves (r, f(r)) or (r, uniform) per hidden coin."""

    def trial(t: int) -> tuple[int, dict]:
        ctx = TrialContext(seed, t)
        f = bbf.sample(family_id, lam, ctx.stream("f"))
        coin = ctx.stream("b1").getrandbits(1)
        rng = ctx.stream("osamp")

        class _Oracle:
            def query(self) -> tuple[str, int]:
                r = random_bits(rng, f.input_len)
                y = bbf.eval(f, r) if coin == 0 else rng.getrandbits(1)
                return r, y

        guess = distinguisher(_Oracle(), ctx)
        return int(guess == coin), {}

    t0 = time.perf_counter()
    outcomes, counters = _run_trials(trial, trials, threads)
    params = {"family": family_id, "n": 0, "k": 1, "trials": trials, "lam": lam,
              "adversary": getattr(distinguisher, "name", getattr(distinguisher, "__name__", "custom"))}
    return _make_report("wprf", params, outcomes, 1, 0.5, seed, slack, counters,
                        1000 * (time.perf_counter() - t0))
