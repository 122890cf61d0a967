"""Named attacks and reduction wrappers: exact laws, fallbacks, registry."""

import random
from dataclasses import replace

import pytest

from udsim import adversaries as adv
from udsim import bbf, games, qcp, schemes, signatures
from udsim.errors import (
    BackendMismatch,
    InvalidParams,
    ListExhausted,
    QueryBudgetExceeded,
    UnknownName,
)
from udsim.rngstream import TrialContext

SEED = 99


# ---------------------------------------------------------------------------
# Splitting attacks


@pytest.mark.parametrize("q", [1, 2, 3])
def test_split_flip_scaling_law(q):
    r = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(q), 3000, SEED)
    target = 2 * (1 - 2 ** -(q + 1))
    assert abs(r.mean - target) <= r.ci_half_width


def test_split_flip_needs_split_pair_backend():
    with pytest.raises(BackendMismatch):
        games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.SplitFlipAttack(2), 5, SEED)


def test_split_flip_rejects_negative_budget():
    with pytest.raises(InvalidParams):
        adv.SplitFlipAttack(-1)


def test_split_ud2_attack_and_fallback():
    splitty = schemes.extend(schemes.build_ud1_cpa(qcp.SPLIT_PAIR))
    r = games.run_ud(splitty, 1, 1, adv.SplitUd2Attack(), games.PROFILE_NONE,
                     3000, SEED)
    assert abs(r.mean - 1.75) <= r.ci_half_width

    ideal = schemes.extend(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    r = games.run_ud(ideal, 1, 1, adv.SplitUd2Attack(), games.PROFILE_NONE,
                     3000, SEED)
    assert abs(r.mean - 1.5) <= r.ci_half_width


# ---------------------------------------------------------------------------
# CCA2 attacks


def test_malleability_wins_unsigned_blocked_signed():
    unsigned = schemes.extend(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    r = games.run_ud(unsigned, 1, 1, adv.MalleabilityCca2Attack(),
                     games.PROFILE_CCA2, 300, SEED)
    assert r.mean == 2.0

    signed = schemes.wrap_cca2_bit(schemes.decouple_bit(
        schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)))
    r = games.run_ud(signed, 1, 1, adv.MalleabilityCca2Attack(),
                     games.PROFILE_CCA2, 100, SEED, bit_variant=True)
    assert r.counters["dec_bottom"] == r.counters["flip_queries"] == 200


@pytest.mark.parametrize("mode", ["truncate", "rearrange", "splice"])
def test_seq_manipulation_dichotomy(mode):
    unsigned = schemes.extend(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    r = games.run_ud(unsigned, 1, 1, adv.SeqManipulationAttack(mode),
                     games.PROFILE_CCA2, 300, SEED)
    assert r.mean == 2.0 and r.counters["mangle_wins"] == 600

    signed = schemes.wrap_cca2_full(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    r = games.run_ud(signed, 1, 1, adv.SeqManipulationAttack(mode),
                     games.PROFILE_CCA2, 50, SEED)
    assert r.counters["dec_bottom"] == r.counters["mangle_queries"] == 100


def test_seq_manipulation_unknown_mode():
    with pytest.raises(InvalidParams):
        adv.SeqManipulationAttack("shuffle")


# ---------------------------------------------------------------------------
# Reduction wrappers


def test_flip_to_weak_exact_fidelity():
    h = adv.HonestBaseline()
    rw = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 1, h, 300, SEED)
    rf = games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.FlipToWeakWrapper(h), 300, SEED)
    assert rw.outcomes == rf.outcomes


def test_flip_to_weak_always_wrong_complement():
    r = games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1,
                           adv.FlipToWeakWrapper(adv.AlwaysWrongEvaluator()),
                           2000, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width  # real slot always wrong, dud guesses


def test_q1_split_equals_half_domain_evaluator_reduction():
    a = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(1), 2000, SEED)
    b = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1,
                           adv.FlipToWeakWrapper(adv.SplitProgramEvaluator()),
                           2000, SEED)
    from scipy.stats import chi2_contingency
    cols = [(x, y) for x, y in zip(a.histogram, b.histogram) if x + y]
    _, p, _, _ = chi2_contingency([[c[0] for c in cols], [c[1] for c in cols]])
    assert p > 0.01


def test_lor_to_weak_exact_fidelity():
    h = adv.HonestBaseline()
    rw = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 1, h, 300, SEED)
    rl = games.run_lor_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.LorToWeakWrapper(h), 300, SEED)
    assert rw.outcomes == rl.outcomes


def test_ria_wrapper_zero_query_identical_reports():
    inner = adv.ConstantGuesser(0)
    plain = games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1, inner, 200, SEED)
    wrapped = games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1,
                                 adv.RiaPirateWrapper(inner, 0), 200, SEED)
    assert plain.histogram == wrapped.histogram


def test_ria_wrapper_list_exhaustion():
    class Greedy(adv.HonestBaseline):
        def answer_flip(self, i, state, oracle, ria_oracle, env):
            for _ in range(3):
                ria_oracle.query()
            return 0

    with pytest.raises(ListExhausted):
        games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1,
                           adv.RiaPirateWrapper(Greedy(), 2), 5, SEED)


def test_ud_to_ind_mean_relation_with_rigged_inner():
    class Rigged:
        """Wins with known probability 0.9 by peeking at the challenge-bit
        stream — a side channel only a test can use."""

        name = "rigged"

        def phase1(self, oracles, ctx):
            return "0", "1", None

        def phase2(self, state, c, oracles, ctx):
            b = ctx.stream("b1").getrandbits(1)
            return b if ctx.stream("advr").random() < 0.9 else b ^ 1

    inner = Rigged()
    s = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    ri = games.run_ind(schemes.underlying(s), inner, games.PROFILE_CPA, 2000, SEED)
    ru = games.run_ud(s, 1, 1, adv.UdToIndWrapper(inner), games.PROFILE_CPA,
                      2000, SEED)
    assert abs(ri.mean - 0.9) <= ri.ci_half_width
    assert all(u == i + 1 for u, i in zip(ru.outcomes, ri.outcomes))


def test_ud_to_ind_with_malleability_inner():
    s = schemes.extend(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN))
    r = games.run_ud(s, 1, 1, adv.UdToIndWrapper(adv.MalleabilityIndDistinguisher()),
                     games.PROFILE_CCA2, 300, SEED)
    assert r.mean == 2.0


def test_ul_flip_forward_exact():
    mem = adv.MemorizingLearner()
    ru = games.run_ul(bbf.KEYED_MIX, mem, 300, SEED, lam=8)
    rf = games.run_ul(bbf.KEYED_MIX, adv.UlFlipForward(mem), 300, SEED,
                      flip_variant=True, lam=8)
    assert ru.outcomes == rf.outcomes


class OneQueryFlipLearner:
    """FLIP-UL learner using its single flip query and a memorized table."""

    name = "one_query_flip"

    def __init__(self, q=1):
        self.q = q

    def phase1(self, oracle, ctx):
        n = oracle.f.input_len
        return {format(i, f"0{n}b"): oracle.query(format(i, f"0{n}b"))
                for i in range(1 << n)}

    def phase2_flip(self, state, oracle, ctx):
        r, z = oracle.query()
        return z ^ state[r]


def test_ul_flip_hybrid_q1_plants_the_challenge():
    # With q=1 the hybrid always serves (x, 0), so the learner answers f(x).
    learner = adv.UlFlipHybrid(OneQueryFlipLearner(), 1)
    r = games.run_ul(bbf.KEYED_MIX, learner, 300, SEED, lam=8)
    assert r.mean == 1.0


def test_ul_flip_hybrid_budget_enforced():
    class Greedy(OneQueryFlipLearner):
        def phase2_flip(self, state, oracle, ctx):
            oracle.query()
            oracle.query()
            return 0

    with pytest.raises(QueryBudgetExceeded):
        games.run_ul(bbf.KEYED_MIX, adv.UlFlipHybrid(Greedy(), 1), 5, SEED, lam=8)


def test_ul_flip_hybrid_telescoping_inequality():
    """|p_0 - p_q| <= 2q * (UL advantage of the hybrid learner), measured."""
    q, lam, trials = 2, 8, 3000
    inner = OneQueryFlipLearner()

    def hybrid_mean(plant: int) -> float:
        # p_i: inner's output rate in the hybrid with the challenge at a
        # fixed position; before it correct pairs, after it flipped pairs.
        ones = 0
        for t in range(trials):
            ctx = TrialContext(SEED, t)
            f = bbf.sample(bbf.KEYED_MIX, lam, ctx.stream("f"))
            table = {format(i, f"0{lam}b"): bbf.eval(f, format(i, f"0{lam}b"))
                     for i in range(1 << lam)}
            rng = ctx.stream("hy")
            x = format(rng.getrandbits(lam), f"0{lam}b")

            class Fake:
                j = 0

                def query(self):
                    self.j += 1
                    r = format(rng.getrandbits(lam), f"0{lam}b")
                    if self.j < plant:
                        return r, bbf.eval(f, r)
                    if self.j == plant:
                        return x, 0
                    return r, bbf.eval(f, r) ^ 1

            ones += inner.phase2_flip(table, Fake(), ctx)
        return ones / trials

    p_first = hybrid_mean(1)        # challenge at the first position
    p_last = hybrid_mean(q + 1)     # challenge never reached: all correct pairs
    r = games.run_ul(bbf.KEYED_MIX, adv.UlFlipHybrid(inner, q), trials, SEED, lam=lam)
    advantage = abs(r.mean - 0.5)
    assert abs(p_first - p_last) <= 2 * q * advantage + 0.05


# ---------------------------------------------------------------------------
# LoR-CPA / weak-PRF bridge


def _constant_zero_se():
    se = schemes.build_se_bbf()
    return replace(se, key_gen=lambda lam, rng: schemes.UdKey(
        bbf.sample(bbf.CONSTANT_ZERO, lam, rng)))


def test_wprf_from_lorcpa_majority_vs_constant_zero():
    wrapper = adv.WprfFromLorCpa(adv.MajorityDistinguisher(32))
    r = games.run_lor_cpa(_constant_zero_se(), wrapper, 500, SEED)
    assert r.mean >= 0.95


def test_wprf_from_lorcpa_zero_query_is_half():
    wrapper = adv.WprfFromLorCpa(adv.ZeroQueryDistinguisher())
    r = games.run_lor_cpa(schemes.build_se_bbf(), wrapper, 2000, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width


def test_wprf_wrapper_transcript_matches_real_game_when_b0():
    """For trials whose hidden bit is 0, the wrapped inner sees exactly the
    (r, f(r)) stream the real weak-PRF game would serve."""
    q = 8
    logs = {"wprf": {}, "lor": {}}

    def recorder(bucket):
        def inner(oracle, ctx):
            logs[bucket][ctx.trial] = [oracle.query() for _ in range(q)]
            return 0
        return inner

    trials = 50
    games.run_wprf(bbf.KEYED_MIX, recorder("wprf"), trials, SEED)
    games.run_lor_cpa(schemes.build_se_bbf(),
                      adv.WprfFromLorCpa(recorder("lor")), trials, SEED)
    b0 = [t for t in range(trials)
          if TrialContext(SEED, t).stream("b1").getrandbits(1) == 0]
    assert b0  # sanity: some trials landed on b = 0
    for t in b0:
        assert logs["wprf"][t] == logs["lor"][t]


# ---------------------------------------------------------------------------
# Simulated decryption oracle


def test_sim_dec_oracle_lookup_and_miss():
    s = schemes.wrap_cca2_bit(schemes.decouple_bit(
        schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)))
    key = s.key_gen(12, random.Random(0))
    ct = s.encrypt(key, "1", random.Random(1))
    oracle = adv.sim_dec_oracle([(ct.inner, ct.sig, "1")])
    assert oracle(ct) == "1"
    other = s.encrypt(key, "0", random.Random(2))
    assert oracle(other) is None
    assert adv.sim_dec_oracle([])(ct) is None


def test_sim_dec_oracle_disagreement_witness():
    """A fresh validly-signed cipher (forged with test-only key access) is
    the point where simulation and the real oracle part ways."""
    s = schemes.wrap_cca2_bit(schemes.decouple_bit(
        schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)))
    key = s.key_gen(12, random.Random(3))
    logged = s.encrypt(key, "0", random.Random(4))
    sim = adv.sim_dec_oracle([(logged.inner, logged.sig, "0")])

    fresh_inner = schemes.BitCt("1" * 12, 0)
    forged = schemes.SignedBitCt(
        fresh_inner, signatures.sign(key.sig_keys, schemes.serialize_ct(fresh_inner)))
    assert sim(forged) is None
    assert s.decrypt_key(key, forged) is not None


def test_sim_dec_oracle_agrees_on_attack_queries():
    """Against the signed scheme, every decryption query the malleability
    attack makes gets the same answer from simulation and the real key."""
    s = schemes.wrap_cca2_bit(schemes.decouple_bit(
        schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)))
    for t in range(100):
        ctx = TrialContext(SEED, t)
        key = s.key_gen(12, ctx.stream("f"))
        challenge = s.encrypt(key, str(t % 2), ctx.stream("enc"))
        sim = adv.sim_dec_oracle([(challenge.inner, challenge.sig, str(t % 2))])
        query = schemes.SignedBitCt(
            schemes.BitCt(challenge.inner.r, challenge.inner.beta ^ 1),
            challenge.sig)
        assert sim(query) == s.decrypt_key(key, query) is None


# ---------------------------------------------------------------------------
# Registry


def test_registry_parses_parameters():
    a = adv.make("split_flip:q=3")
    assert isinstance(a, adv.SplitFlipAttack) and a.q == 3


def test_registry_plain_names():
    assert isinstance(adv.make("honest"), adv.HonestBaseline)
    assert isinstance(adv.make("rearrange"), adv.SeqManipulationAttack)


def test_registry_unknown_name():
    with pytest.raises(UnknownName):
        adv.make("nope")


def test_registry_bad_parameters():
    with pytest.raises(InvalidParams):
        adv.make("honest:q=2")


def test_registry_lists_names():
    names = adv.registry_names()
    assert "split_flip" in names and "malleability" in names
