"""Command-line interface: exit codes, config merging, KAT plumbing."""

import json

import pytest

from udsim import kat
from udsim.cli import main


def test_run_honest_within_bound(tmp_path):
    out = tmp_path / "report.json"
    code = main(["run", "--game", "weak_qcp", "--backend", "ideal",
                 "--adversary", "honest", "--n", "1", "--k", "1",
                 "--trials", "10000", "--seed", "7", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == "WithinBound"
    assert abs(report["mean"] - 1.5) < 0.1


def test_run_split_flip_exceeds_bound(tmp_path):
    out = tmp_path / "report.json"
    code = main(["run", "--game", "flip_qcp", "--backend", "split_pair",
                 "--adversary", "split_flip:q=2", "--n", "1", "--k", "1",
                 "--trials", "2000", "--seed", "7", "--out", str(out)])
    assert code == 1
    assert abs(json.loads(out.read_text())["mean"] - 1.75) < 0.05


def test_unknown_adversary_exit_3(capsys):
    assert main(["run", "--game", "weak_qcp", "--backend", "ideal",
                 "--adversary", "nope", "--trials", "10", "--seed", "1"]) == 3


def test_unknown_game_exit_3():
    assert main(["run", "--game", "nope", "--trials", "10", "--seed", "1"]) == 3


def test_invalid_params_exit_4():
    assert main(["run", "--game", "weak_qcp", "--backend", "ideal",
                 "--adversary", "honest", "--n", "0", "--k", "0",
                 "--trials", "10", "--seed", "1"]) == 4


def test_missing_seed_recorded(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["run", "--game", "weak_qcp", "--backend", "ideal",
                 "--adversary", "honest", "--n", "1", "--k", "0",
                 "--trials", "20", "--out", str(out)])
    assert code in (0, 2)
    assert isinstance(json.loads(out.read_text())["seed"], int)


def test_same_config_same_bytes(tmp_path):
    argv = ["run", "--game", "ud1", "--backend", "ideal", "--scheme", "ud1_cpa",
            "--adversary", "honest", "--n", "1", "--k", "1", "--trials", "300",
            "--seed", "5", "--profile", "cpa"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(argv + ["--out", str(a)])
    main(argv + ["--out", str(b)])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("wallclock_ms"), rb.pop("wallclock_ms")
    assert ra == rb


def test_threads_do_not_change_output(tmp_path):
    argv = ["run", "--game", "flip_qcp", "--backend", "split_pair",
            "--adversary", "split_flip:q=2", "--n", "1", "--k", "1",
            "--trials", "400", "--seed", "5"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(argv + ["--threads", "1", "--out", str(a)])
    main(argv + ["--threads", "4", "--out", str(b)])
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    ra.pop("wallclock_ms"), rb.pop("wallclock_ms")
    assert ra == rb


def test_config_file_flags_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("game=weak_qcp\nbackend=ideal\nadversary=honest\n"
                   "n=1\nk=0\ntrials=20\nseed=9\n")
    out = tmp_path / "r.json"
    code = main(["run", "--config", str(cfg), "--trials", "30", "--out", str(out)])
    assert code in (0, 2)
    report = json.loads(out.read_text())
    assert report["params"]["trials"] == 30  # flag wins
    assert report["seed"] == 9               # file fills the rest


def test_config_file_json_variant(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"game": "weak_qcp", "backend": "ideal",
                               "adversary": "honest", "n": 1, "k": 0,
                               "trials": 20, "seed": 9}))
    out = tmp_path / "r.json"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) in (0, 2)


def test_kat_verify_pristine(tmp_path):
    for suite in kat.SUITES:
        kat.regenerate(tmp_path, suite)
    assert main(["kat", "all", "--dir", str(tmp_path)]) == 0


def test_kat_detects_corruption(tmp_path, capsys):
    kat.regenerate(tmp_path, "bbf")
    path = tmp_path / "bbf_kat.json"
    vectors = json.loads(path.read_text())
    vectors[0]["output_bit"] ^= 1
    path.write_text(json.dumps(vectors))
    assert main(["kat", "bbf", "--dir", str(tmp_path)]) == 1


def test_kat_regenerate_is_deterministic(tmp_path):
    a = kat.regenerate(tmp_path / "a", "sig").read_text()
    b = kat.regenerate(tmp_path / "b", "sig").read_text()
    assert a == b


def test_shipped_kats_verify():
    for suite in kat.SUITES:
        kat.verify(kat.default_dir(), suite)


def test_list_subcommand(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "split_flip" in out and "wrap_cca2_full" in out and "flip_qcp" in out


def test_single_adversary_games_run(tmp_path):
    assert main(["run", "--game", "seuf_cma", "--scheme", "Malleable",
                 "--adversary", "trivial_forger", "--trials", "50",
                 "--seed", "3", "--out", str(tmp_path / "s.json")]) == 1
    assert main(["run", "--game", "wprf", "--scheme", "constant_zero",
                 "--adversary", "majority:q=32", "--trials", "100",
                 "--seed", "3", "--out", str(tmp_path / "w.json")]) == 1
    assert main(["run", "--game", "ul", "--scheme", "keyed_mix",
                 "--adversary", "no_query", "--trials", "5000", "--seed", "3",
                 "--slack", "0.05", "--out", str(tmp_path / "u.json")]) == 0
