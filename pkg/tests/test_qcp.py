"""Protected-program backends and the linear resource ledger."""

import random

import pytest

from udsim import bbf, qcp
from udsim.errors import (
    BackendMismatch,
    DeadHandle,
    DimensionTooLarge,
    LengthMismatch,
    OutOfDomain,
)


def _keyed(lam=8, seed=0):
    return bbf.sample(bbf.KEYED_MIX, lam, random.Random(seed))


def _paired(lam=8, seed=0):
    rng = random.Random(seed)
    return bbf.pair_compose(bbf.sample(bbf.KEYED_MIX, lam, rng),
                            bbf.sample(bbf.KEYED_MIX, lam, rng))


def test_protect_registers_live_handle():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, random.Random(0))
    assert ledger.live_handles == {p.resource_id}
    assert ledger.protect_count == 1


def test_protect_twice_distinct_ids():
    ledger = qcp.ResourceLedger()
    rng = random.Random(0)
    a = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, rng)
    b = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, rng)
    assert a.resource_id != b.resource_id


@pytest.mark.parametrize("backend", [qcp.IDEAL_TOKEN, qcp.SPLIT_PAIR, qcp.SUBSPACE_MODEL])
def test_eval_matches_descriptor(backend):
    f = _paired() if backend == qcp.SPLIT_PAIR else _keyed()
    ledger = qcp.ResourceLedger()
    p = qcp.protect(backend, f, ledger, random.Random(1))
    rng = random.Random(2)
    for _ in range(50):
        x = format(rng.getrandbits(f.input_len), f"0{f.input_len}b")
        assert qcp.eval_program(p, x) == bbf.eval(f, x)


def test_split_pair_requires_paired_descriptor():
    ledger = qcp.ResourceLedger()
    with pytest.raises(BackendMismatch):
        qcp.protect(qcp.SPLIT_PAIR, _keyed(), ledger, random.Random(0))


def test_subspace_model_dimension_cap():
    ledger = qcp.ResourceLedger()
    with pytest.raises(DimensionTooLarge):
        qcp.protect(qcp.SUBSPACE_MODEL, _keyed(lam=32), ledger, random.Random(0))


def test_split_consumes_parent_and_tracks_provenance():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.SPLIT_PAIR, _paired(), ledger, random.Random(0))
    h0, h1 = qcp.split_pair(p, ledger)
    assert p.resource_id not in ledger.live_handles
    assert ledger.live_handles == {h0.resource_id, h1.resource_id}
    assert ledger.provenance[h0.resource_id] == p.resource_id
    assert ledger.provenance[h1.resource_id] == p.resource_id


def test_double_split_is_dead():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.SPLIT_PAIR, _paired(), ledger, random.Random(0))
    qcp.split_pair(p, ledger)
    with pytest.raises(DeadHandle):
        qcp.split_pair(p, ledger)


def test_eval_after_retire_is_dead():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, random.Random(0))
    ledger.retire(p.resource_id)
    with pytest.raises(DeadHandle):
        qcp.eval_program(p, "0" * 8)


def test_ideal_token_refuses_split():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, random.Random(0))
    with pytest.raises(BackendMismatch):
        qcp.split_pair(p, ledger)


def test_half_programs_cover_their_half_domain():
    f = _paired()
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.SPLIT_PAIR, f, ledger, random.Random(0))
    h0, h1 = qcp.split_pair(p, ledger)
    rng = random.Random(1)
    for _ in range(50):
        x = format(rng.getrandbits(f.input_len), f"0{f.input_len}b")
        holder, other = (h0, h1) if x[0] == "0" else (h1, h0)
        assert qcp.eval_program(holder, x) == bbf.eval(f, x)
        with pytest.raises(OutOfDomain):
            qcp.eval_program(other, x)


def test_half_program_length_check():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.SPLIT_PAIR, _paired(), ledger, random.Random(0))
    h0, _ = qcp.split_pair(p, ledger)
    with pytest.raises(LengthMismatch):
        qcp.eval_program(h0, "0")


def test_dud_is_a_coin():
    ledger = qcp.ResourceLedger()
    d = qcp.make_dud(ledger, random.Random(0))
    assert qcp.is_dud(d)
    outs = {qcp.eval_program(d, "whatever") for _ in range(64)}
    assert outs == {0, 1}


def test_distribute_pads_with_duds():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, random.Random(0))
    states = qcp.distribute([p], 3, ledger, random.Random(1))
    assert states[0] is p
    assert all(qcp.is_dud(s) for s in states[1:])
    assert len(ledger.live_handles) == 3


def test_distribute_rejects_duplicate_handles():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, random.Random(0))
    with pytest.raises(DeadHandle):
        qcp.distribute([p, p], 3, ledger, random.Random(1))


def test_distribute_rejects_dead_handles():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(), ledger, random.Random(0))
    ledger.retire(p.resource_id)
    with pytest.raises(DeadHandle):
        qcp.distribute([p], 2, ledger, random.Random(1))


def test_input_len_reporting():
    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.IDEAL_TOKEN, _keyed(lam=12), ledger, random.Random(0))
    assert qcp.input_len(p) == 12
    q = qcp.protect(qcp.SPLIT_PAIR, _paired(lam=12), ledger, random.Random(0))
    h0, _ = qcp.split_pair(q, ledger)
    assert qcp.input_len(h0) == 13


def test_ledger_dump_is_json():
    import json

    ledger = qcp.ResourceLedger()
    p = qcp.protect(qcp.SPLIT_PAIR, _paired(), ledger, random.Random(0))
    qcp.split_pair(p, ledger)
    dump = json.loads(ledger.dump())
    assert set(dump) == {"live", "provenance"}
    assert len(dump["live"]) == 2
