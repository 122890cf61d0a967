"""Game harness: baselines, verdicts, determinism, oracle discipline."""

import random

import pytest

from udsim import adversaries as adv
from udsim import bbf, games, qcp, schemes
from udsim.errors import InvalidParams, ResampleExhausted

TRIALS = 2000
SEED = 42


def _within_ci(report):
    return abs(report.mean - report.threshold) <= report.ci_half_width


def test_weak_qcp_honest_baseline():
    r = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.HonestBaseline(), TRIALS, SEED)
    assert _within_ci(r)
    assert r.threshold == 1.5


def test_weak_qcp_perfect_when_no_duds():
    r = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 0, adv.HonestBaseline(), 500, SEED)
    assert r.mean == 1.0


def test_flip_qcp_honest_baseline_n2k3():
    r = games.run_flip_qcp(qcp.IDEAL_TOKEN, 2, 3, adv.HonestBaseline(), TRIALS, SEED)
    assert r.threshold == 3.5
    assert _within_ci(r)


def test_constant_guesser_sits_at_half():
    r = games.run_flip_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.ConstantGuesser(0), TRIALS, SEED)
    assert abs(r.mean - 1.0) <= r.ci_half_width


def test_lor_qcp_honest_is_perfect_on_real_slots():
    r = games.run_lor_qcp(qcp.IDEAL_TOKEN, 1, 0, adv.HonestBaseline(), 500, SEED)
    assert r.mean == 1.0


def test_lor_oracle_exhausts_on_constant_zero():
    f = bbf.sample(bbf.CONSTANT_ZERO, 8, random.Random(0))
    oracle = games.LorOracle(f, 0, random.Random(1))
    with pytest.raises(ResampleExhausted):
        oracle.query()


def test_n_zero_rejected():
    with pytest.raises(InvalidParams):
        games.run_weak_qcp(qcp.IDEAL_TOKEN, 0, 2, adv.HonestBaseline(), 10, SEED)


def test_report_is_deterministic():
    def run():
        return games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(2),
                                  500, SEED)

    assert run().canonical_json() == run().canonical_json()


def test_report_independent_of_thread_count():
    def run(threads):
        return games.run_ud(schemes.build_ud1_cpa(qcp.IDEAL_TOKEN), 1, 1,
                            adv.HonestBaseline(), games.PROFILE_CPA, 400, SEED,
                            bit_variant=True, threads=threads)

    assert run(1).canonical_json() == run(4).canonical_json()


def test_canonical_json_excludes_wallclock():
    r = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 0, adv.HonestBaseline(), 10, SEED)
    assert "wallclock" not in r.canonical_json()
    assert "wallclock_ms" in r.to_dict()


def test_verdict_exceeds_for_strong_attack():
    r = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(6), TRIALS, SEED)
    assert r.verdict == games.EXCEEDS_BOUND


def test_verdict_within_for_honest_at_volume():
    r = games.run_weak_qcp(qcp.IDEAL_TOKEN, 1, 1, adv.HonestBaseline(), 10_000, SEED)
    assert r.verdict == games.WITHIN_BOUND


def test_ud_honest_all_profiles():
    s = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    for profile in games.PROFILES:
        r = games.run_ud(s, 1, 1, adv.HonestBaseline(), profile, 1000, SEED,
                         bit_variant=True)
        assert _within_ci(r), profile


def test_cca2_challenge_exclusion_is_counted():
    class EchoAttack(adv.HonestBaseline):
        def ud_answer(self, i, state, c, oracles, env):
            assert oracles.dec.query(c) is None  # challenge itself is blocked
            return super().ud_answer(i, state, c, oracles, env)

    s = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    r = games.run_ud(s, 1, 1, EchoAttack(), games.PROFILE_CCA2, 200, SEED,
                     bit_variant=True)
    assert r.counters["dec_challenge_blocked"] == 400
    assert r.counters["dec_queries"] == 400


def test_seuf_trivial_forger_only_beats_malleable():
    strong = games.run_seuf_cma("LamportMerkle", adv.trivial_forger, 4, 200, SEED)
    weak = games.run_seuf_cma("Malleable", adv.trivial_forger, 4, 200, SEED)
    assert strong.mean == 0.0
    assert weak.mean == 1.0
    assert weak.verdict == games.EXCEEDS_BOUND  # threshold 0 for forgery games


def test_lor_cpa_constant_guess_is_half():
    se = schemes.build_se_bbf()

    def guess_zero(submit, ctx):
        submit("0", "1")
        return 0

    r = games.run_lor_cpa(se, guess_zero, TRIALS, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width


def test_lor_cpa_constant_zero_key_is_broken():
    from dataclasses import replace

    se = schemes.build_se_bbf()
    broken = replace(se, key_gen=lambda lam, rng: schemes.UdKey(
        bbf.sample(bbf.CONSTANT_ZERO, lam, rng)))

    def read_beta(submit, ctx):
        return submit("0", "1").beta

    r = games.run_lor_cpa(broken, read_beta, 500, SEED)
    assert r.mean == 1.0


def test_lor_cpa_length_mismatch():
    se = schemes.extend(schemes.build_se_bbf())

    def bad(submit, ctx):
        submit("0", "01")
        return 0

    from udsim.errors import ChallengeLengthMismatch
    with pytest.raises(ChallengeLengthMismatch):
        games.run_lor_cpa(se, bad, 5, SEED)


def test_ind_random_guesser_is_half():
    se = schemes.build_se_bbf()
    r = games.run_ind(se, adv.RandomIndGuesser(), games.PROFILE_CPA, TRIALS, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width


def test_ind_malleability_distinguisher_wins_under_cca2():
    se = schemes.extend(schemes.build_se_bbf())
    r = games.run_ind(se, adv.MalleabilityIndDistinguisher(), games.PROFILE_CCA2,
                      500, SEED)
    assert r.mean == 1.0


def test_ul_memorizer_wins_small_domain():
    r = games.run_ul(bbf.KEYED_MIX, adv.MemorizingLearner(), 300, SEED, lam=8)
    assert r.mean == 1.0


def test_ul_no_query_learner_is_half():
    r = games.run_ul(bbf.KEYED_MIX, adv.NoQueryLearner(), TRIALS, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width


def test_wprf_majority_separates_constant_zero():
    r = games.run_wprf(bbf.CONSTANT_ZERO, adv.MajorityDistinguisher(32), 500, SEED)
    assert r.mean >= 0.95


def test_wprf_majority_blind_on_keyed_mix():
    r = games.run_wprf(bbf.KEYED_MIX, adv.MajorityDistinguisher(32), TRIALS, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width + 0.05


def test_wprf_zero_query_is_half():
    r = games.run_wprf(bbf.KEYED_MIX, adv.ZeroQueryDistinguisher(), TRIALS, SEED)
    assert abs(r.mean - 0.5) <= r.ci_half_width


def test_histogram_sums_to_trials():
    r = games.run_weak_qcp(qcp.IDEAL_TOKEN, 2, 1, adv.HonestBaseline(), 300, SEED)
    assert sum(r.histogram) == 300
    assert len(r.histogram) == 4  # outputs 0..n+k
