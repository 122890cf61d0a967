"""The release acceptance matrix: twelve numbered criteria with hard
pass/fail checks, shared by ``udsim suite acceptance`` and the test gate.

Each criterion is a function returning (passed, detail).  All runs are
seeded; re-running a row reproduces its report byte-for-byte (criterion 12
checks exactly that).
"""

from __future__ import annotations

import itertools
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from scipy.stats import chi2_contingency

from . import adversaries as adv
from . import bbf, games, kat, qcp, quantum, schemes, signatures
from .rngstream import TrialContext, random_bits

SEED = 20260800
THREADS = 4


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float


def _chi2_equal(hist_a: list[int], hist_b: list[int], alpha: float = 0.01) -> tuple[bool, float]:
    """Homogeneity test on two histograms; True = no detected difference."""
    cols = [(a, b) for a, b in zip(hist_a, hist_b) if a + b > 0]
    table = [[c[0] for c in cols], [c[1] for c in cols]]
    _, p, _, _ = chi2_contingency(table)
    return p > alpha, p


def _ci_single(trials: int, delta: float = games.DELTA) -> float:
    return math.sqrt(math.log(2 / delta) / (2 * trials))


# ---------------------------------------------------------------------------
# Criteria


def crit_1_split_flip() -> tuple[bool, str]:
    r = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(2),
                           10_000, SEED, threads=THREADS)
    ok = 1.72 <= r.mean <= 1.78 and r.verdict == games.EXCEEDS_BOUND \
        and r.wallclock_ms < 10_000
    return ok, f"mean={r.mean:.4f} verdict={r.verdict} {r.wallclock_ms:.0f}ms"


def crit_2_split_ud2() -> tuple[bool, str]:
    s = schemes.extend(schemes.build_ud1_cpa(qcp.SPLIT_PAIR))
    r = games.run_ud(s, 1, 1, adv.SplitUd2Attack(), games.PROFILE_NONE,
                     10_000, SEED, threads=THREADS)
    ok = 1.72 <= r.mean <= 1.78 and r.wallclock_ms < 15_000
    return ok, f"mean={r.mean:.4f} {r.wallclock_ms:.0f}ms"


def crit_3_query_scaling() -> tuple[bool, str]:
    ci = _ci_single(10_000)
    rows = []
    ok = True
    for q in range(1, 7):
        r = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(q),
                               10_000, SEED + q, threads=THREADS)
        per = r.mean / 2
        target = 1 - 2 ** -(q + 1)
        ok &= abs(per - target) <= ci
        rows.append(f"q={q}:{per:.4f}/{target:.4f}")
    return ok, " ".join(rows)


def crit_4_honest_baselines() -> tuple[bool, str]:
    honest = adv.HonestBaseline()
    ud1 = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    ok, rows = True, []
    for n, k in ((1, 1), (2, 3), (3, 0)):
        runs = [
            ("weak", games.run_weak_qcp(qcp.IDEAL_TOKEN, n, k, honest, 10_000,
                                        SEED, threads=THREADS)),
            ("flip", games.run_flip_qcp(qcp.IDEAL_TOKEN, n, k, honest, 10_000,
                                        SEED, threads=THREADS)),
        ]
        for prof in games.PROFILES:
            runs.append((f"ud1/{prof}",
                         games.run_ud(ud1, n, k, honest, prof, 10_000, SEED,
                                      bit_variant=True, threads=THREADS)))
        for tag, r in runs:
            hit = abs(r.mean - r.threshold) <= r.ci_half_width
            ok &= hit
            if not hit:
                rows.append(f"({n},{k}){tag}:{r.mean:.3f}")
    return ok, "all within CI" if ok else "misses: " + " ".join(rows)


def crit_5_malleability_dichotomy() -> tuple[bool, str]:
    attack = adv.MalleabilityCca2Attack()
    unsigned = schemes.extend(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    ra = games.run_ud(unsigned, 1, 1, attack, games.PROFILE_CCA2, 10_000,
                      SEED, threads=THREADS)
    a = ra.mean == 2.0 and ra.counters.get("malleability_wins") == 20_000

    base = schemes.decouple_bit(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    signed = schemes.wrap_cca2_bit(base, signatures.LAMPORT_MERKLE)
    rb = games.run_ud(signed, 1, 1, attack, games.PROFILE_CCA2, 10_000, SEED,
                      bit_variant=True, threads=THREADS)
    b = (rb.counters.get("dec_bottom") == rb.counters.get("flip_queries") == 20_000
         and rb.counters.get("malleability_wins") is None)

    broken = schemes.wrap_cca2_bit(base, signatures.MALLEABLE)
    rc = games.run_ud(broken, 1, 1, attack, games.PROFILE_CCA2, 10_000, SEED,
                      bit_variant=True, threads=THREADS)
    c = rc.mean == 2.0 and rc.counters.get("malleability_wins") == 20_000
    return a and b and c, (f"unsigned={ra.mean:.3f} "
                           f"signed_bottom={rb.counters.get('dec_bottom')}/20000 "
                           f"malleable_ctrl={rc.mean:.3f}")


def crit_6_seq_manipulation_dichotomy() -> tuple[bool, str]:
    unsigned = schemes.extend(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    signed = schemes.wrap_cca2_full(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    ok, rows = True, []
    for mode in ("truncate", "rearrange", "splice"):
        attack = adv.SeqManipulationAttack(mode)
        ru = games.run_ud(unsigned, 1, 1, attack, games.PROFILE_CCA2, 10_000,
                          SEED, threads=THREADS)
        rs = games.run_ud(signed, 1, 1, attack, games.PROFILE_CCA2, 1_000,
                          SEED, threads=THREADS)
        hit = (ru.mean == 2.0 and ru.counters.get("mangle_wins") == 20_000
               and rs.counters.get("dec_bottom") == rs.counters.get("mangle_queries") == 2_000)
        ok &= hit
        rows.append(f"{mode}:{ru.mean:.2f}/{rs.counters.get('dec_bottom')}")
    return ok, " ".join(rows)


def crit_7_reduction_fidelity() -> tuple[bool, str]:
    honest = adv.HonestBaseline()
    checks = {}

    rw = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 1, honest, 1_000, SEED)
    rf = games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.FlipToWeakWrapper(honest),
                            1_000, SEED)
    checks["flip_to_weak"] = rw.outcomes == rf.outcomes

    rl = games.run_lor_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.LorToWeakWrapper(honest),
                           1_000, SEED)
    checks["lor_to_weak"] = rw.outcomes == rl.outcomes

    mem = adv.MemorizingLearner()
    ru = games.run_ul(bbf.KEYED_MIX, mem, 1_000, SEED, lam=8)
    rv = games.run_ul(bbf.KEYED_MIX, adv.UlFlipForward(mem), 1_000, SEED,
                      flip_variant=True, lam=8)
    checks["ul_flip_forward"] = ru.outcomes == rv.outcomes

    inner = adv.RandomIndGuesser()
    ud1 = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    ri = games.run_ind(schemes.underlying(ud1), inner, games.PROFILE_CPA, 1_000, SEED)
    rud = games.run_ud(ud1, 1, 1, adv.UdToIndWrapper(inner), games.PROFILE_CPA,
                       1_000, SEED)
    checks["ud_to_ind"] = all(u == i + 1 for u, i in zip(rud.outcomes, ri.outcomes))

    w = adv.RiaPirateWrapper(adv.SplitFlipAttack(2), 2)
    r1 = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, w, 10_000, SEED,
                            ria=False, threads=THREADS)
    r2 = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(2),
                            10_000, SEED + 1, ria=True, threads=THREADS)
    checks["ria_pirate"], p1 = _chi2_equal(r1.histogram, r2.histogram)

    plain = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    dec = schemes.decouple_bit(plain)
    ha = games.run_ud(plain, 1, 1, honest, games.PROFILE_NONE, 10_000, SEED,
                      bit_variant=True, threads=THREADS)
    hb = games.run_ud(dec, 1, 1, honest, games.PROFILE_NONE, 10_000, SEED + 1,
                      bit_variant=True, threads=THREADS)
    checks["decouple_bit"], p2 = _chi2_equal(ha.histogram, hb.histogram)

    detail = " ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in checks.items())
    return all(checks.values()), detail + f" (chi2 p={p1:.3f},{p2:.3f})"


def crit_8_correctness_suite() -> tuple[bool, str]:
    failures = 0

    def roundtrips(row) -> int:
        name, backend, inst, lam = row
        bad = 0
        for t in range(1_000):
            ctx = TrialContext(SEED, t)
            rng = ctx.stream("f")
            key = inst.key_gen(lam, rng)
            mrng = ctx.stream("m")
            if inst.message_len_support == schemes.BIT_ONLY:
                m = str(mrng.getrandbits(1))
            else:
                m = random_bits(mrng, mrng.randint(1, 8))
            ct = inst.encrypt(key, m, ctx.stream("enc"))
            if inst.decrypt_key(key, ct) != m:
                bad += 1
            if inst.has_decryptors:
                ledger = qcp.ResourceLedger()
                d = inst.dec_gen(key, ledger, ctx.stream("protect"))
                if inst.decrypt_q(d, ct) != m:
                    bad += 1
        return bad

    rows = kat._scheme_factories()
    with ThreadPoolExecutor(max_workers=THREADS) as pool:
        for bad in pool.map(roundtrips, rows):
            failures += bad
    return failures == 0, f"{len(rows)} combos x 1000 round-trips, {failures} failures"


def _all_subspaces(n: int):
    """Every subspace of F_2^n, enumerated by RREF pivot structure."""
    for dim in range(n + 1):
        for pivots in itertools.combinations(range(n), dim):
            free_slots = [(i, j) for i in range(dim) for j in range(pivots[i] + 1, n)
                          if j not in pivots]
            for bits in itertools.product((0, 1), repeat=len(free_slots)):
                rows = [[0] * n for _ in range(dim)]
                for i, p in enumerate(pivots):
                    rows[i][p] = 1
                for (i, j), b in zip(free_slots, bits):
                    rows[i][j] = b
                yield quantum.subspace_from_vectors(n, [tuple(r) for r in rows])


def crit_9_quantum_layer() -> tuple[bool, str]:
    rng = random.Random(SEED)
    worst = 1.0
    for n in range(2, 11):
        for _ in range(100):
            A = quantum.random_subspace(n, rng.randint(0, n), rng)
            fid = quantum.fidelity(quantum.hadamard_all(quantum.subspace_state(A)),
                                   quantum.subspace_state(quantum.dual_subspace(A)))
            worst = min(worst, fid)
    fid_ok = worst >= 1 - 1e-9

    checked = 0
    dual_ok = True
    for n in range(1, 7):
        for A in _all_subspaces(n):
            D = quantum.dual_subspace(A)
            dual_ok &= quantum.dual_subspace(D) == A and A.dim + D.dim == n
            checked += 1
    return fid_ok and dual_ok, f"worst_fidelity={worst:.2e} dual_checked={checked}"


def crit_10_seuf_calibration() -> tuple[bool, str]:
    rr = games.run_seuf_cma(signatures.LAMPORT_MERKLE, adv.replay_forger, 8,
                            1_000, SEED, threads=THREADS)
    rb = games.run_seuf_cma(signatures.LAMPORT_MERKLE, adv.bitflip_forger, 8,
                            1_000, SEED, threads=THREADS)
    rt = games.run_seuf_cma(signatures.MALLEABLE, adv.trivial_forger, 8,
                            1_000, SEED)
    ok = rr.mean == 0.0 and rb.mean == 0.0 and rt.mean == 1.0
    return ok, f"replay={rr.mean} bitflip={rb.mean} trivial_vs_malleable={rt.mean}"


def crit_11_ledger_linearity() -> tuple[bool, str]:
    honest = adv.HonestBaseline()
    ud1_ideal = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    ext_ideal = schemes.extend(ud1_ideal)
    ext_split = schemes.extend(schemes.build_ud1_cpa(qcp.SPLIT_PAIR))
    full = schemes.wrap_cca2_full(ud1_ideal)
    matrix: list[Callable[[], games.GameReport]] = [
        lambda: games.run_weak_qcp(qcp.IDEAL_TOKEN, 2, 1, honest, 200, SEED),
        lambda: games.run_weak_qcp(qcp.SUBSPACE_MODEL, 1, 2, honest, 200, SEED, lam=12),
        lambda: games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, honest, 200, SEED),
        lambda: games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(2), 200, SEED),
        lambda: games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1,
                                   adv.RiaPirateWrapper(adv.SplitFlipAttack(2), 2), 200, SEED),
        lambda: games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1,
                                   adv.FlipToWeakWrapper(honest), 200, SEED),
        lambda: games.run_lor_qcp(qcp.IDEAL_TOKEN, 1, 1,
                                  adv.LorToWeakWrapper(honest), 200, SEED),
        lambda: games.run_ud(ud1_ideal, 2, 2, honest, games.PROFILE_CPA, 200,
                             SEED, bit_variant=True),
        lambda: games.run_ud(ext_split, 1, 1, adv.SplitUd2Attack(),
                             games.PROFILE_NONE, 200, SEED),
        lambda: games.run_ud(ext_ideal, 1, 1, adv.MalleabilityCca2Attack(),
                             games.PROFILE_CCA2, 200, SEED),
        lambda: games.run_ud(ext_ideal, 1, 1, adv.SeqManipulationAttack("truncate"),
                             games.PROFILE_CCA2, 200, SEED),
        lambda: games.run_ud(ext_ideal, 1, 1, adv.SeqManipulationAttack("rearrange"),
                             games.PROFILE_CCA2, 200, SEED),
        lambda: games.run_ud(ext_ideal, 1, 1, adv.SeqManipulationAttack("splice"),
                             games.PROFILE_CCA2, 200, SEED),
        lambda: games.run_ud(full, 1, 1, adv.SeqManipulationAttack("splice"),
                             games.PROFILE_CCA2, 50, SEED),
        lambda: games.run_ud(ud1_ideal, 1, 1, adv.UdToIndWrapper(adv.RandomIndGuesser()),
                             games.PROFILE_CPA, 200, SEED),
    ]
    ran = 0
    for job in matrix:
        job()  # raises AdversaryProtocolViolation on any linearity breach
        ran += 1
    return True, f"{ran} game x adversary rows, zero violations"


def crit_12_determinism() -> tuple[bool, str]:
    def row_a():
        return games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(2),
                                  1_000, SEED, threads=THREADS)

    def row_b():
        s = schemes.extend(schemes.build_ud1_cpa(qcp.SPLIT_PAIR))
        return games.run_ud(s, 1, 1, adv.SplitUd2Attack(), games.PROFILE_NONE,
                            1_000, SEED)

    ok = True
    for row in (row_a, row_b):
        ok &= row().canonical_json() == row().canonical_json()
    return ok, "re-runs byte-identical" if ok else "re-run diverged"


CRITERIA: list[tuple[int, str, Callable[[], tuple[bool, str]]]] = [
    (1, "split_flip attack beats FLIP-QCP threshold", crit_1_split_flip),
    (2, "split_ud2 breaks the 2-bit extension", crit_2_split_ud2),
    (3, "split_flip query-scaling law", crit_3_query_scaling),
    (4, "honest baselines calibrate to n + k/2", crit_4_honest_baselines),
    (5, "CCA2 malleability dichotomy", crit_5_malleability_dichotomy),
    (6, "splice/truncate/rearrange dichotomy", crit_6_seq_manipulation_dichotomy),
    (7, "reduction fidelity under shared seeds", crit_7_reduction_fidelity),
    (8, "scheme correctness round-trips", crit_8_correctness_suite),
    (9, "quantum layer identities", crit_9_quantum_layer),
    (10, "sEUF-CMA harness calibration", crit_10_seuf_calibration),
    (11, "ledger linearity across the matrix", crit_11_ledger_linearity),
    (12, "report determinism", crit_12_determinism),
]


def run_all(name_filter: Optional[str] = None) -> list[CriterionResult]:
    results = []
    for number, name, fn in CRITERIA:
        if name_filter and name_filter not in name and name_filter != str(number):
            continue
        t0 = time.perf_counter()
        passed, detail = fn()
        results.append(CriterionResult(number, name, passed, detail,
                                       time.perf_counter() - t0))
    return results
