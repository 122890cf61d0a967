"""Command-line front end.

Subcommands:

* ``run``   — play one game and write its JSON report.
* ``kat``   — verify (or regenerate) the known-answer files.
* ``suite`` — run the acceptance matrix and print a table.
* ``list``  — show registered games, schemes, backends, adversaries.

Exit codes for ``run``: 0 WithinBound, 1 ExceedsBound, 2 Inconclusive,
3 unknown name, 4 invalid parameters.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from pathlib import Path

from . import acceptance, adversaries, bbf, games, kat, qcp, schemes
from .errors import InvalidParams, KatMismatch, UnknownName

BACKENDS = {
    "ideal": qcp.IDEAL_TOKEN,
    "split_pair": qcp.SPLIT_PAIR,
    "subspace": qcp.SUBSPACE_MODEL,
}

FAMILIES = {"keyed_mix": bbf.KEYED_MIX, "constant_zero": bbf.CONSTANT_ZERO}

GAMES = ("weak_qcp", "weak_qcp_ria", "flip_qcp", "flip_qcp_ria", "lor_qcp",
         "ud", "ud1", "seuf_cma", "lor_cpa", "ind", "ul", "flip_ul", "wprf")


def _scheme_registry(backend_tag: str, lam: int) -> dict:
    base = lambda: schemes.build_ud1_cpa(backend_tag)
    return {
        "ud1_cpa": base,
        "extend": lambda: schemes.extend(base()),
        "decouple_bit": lambda: schemes.decouple_bit(base()),
        "decouple_general": lambda: schemes.decouple_general(
            schemes.extend(base()), bytes(range(16))),
        "wrap_cca2_bit": lambda: schemes.wrap_cca2_bit(schemes.decouple_bit(base())),
        "wrap_cca2_bit_malleable": lambda: schemes.wrap_cca2_bit(
            schemes.decouple_bit(base()), "Malleable"),
        "wrap_cca2_full": lambda: schemes.wrap_cca2_full(base(), lam=lam),
        "se_bbf": schemes.build_se_bbf,
        "underlying": lambda: schemes.underlying(base()),
    }


def scheme_names() -> list[str]:
    return sorted(_scheme_registry(qcp.IDEAL_TOKEN, 64))


def _build_scheme(name: str, backend_tag: str, lam: int) -> schemes.SchemeInstance:
    registry = _scheme_registry(backend_tag, lam)
    if name not in registry:
        raise UnknownName(f"unknown scheme {name!r}")
    return registry[name]()


def _load_config(path: str) -> dict:
    """Flat key=value text, or JSON when the file starts with '{'."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    config = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        k, _, v = line.partition("=")
        config[k.strip()] = v.strip()
    return config


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Config file values fill in; explicit flags override."""
    if not getattr(args, "config", None):
        return args
    file_vals = _load_config(args.config)
    for key, val in file_vals.items():
        key = key.replace("-", "_")
        if getattr(args, key, None) is None:
            if key in ("n", "k", "trials", "seed", "threads", "lam"):
                val = int(val)
            elif key == "slack":
                val = float(val)
            setattr(args, key, val)
    return args


def cmd_run(args: argparse.Namespace) -> int:
    args = _merge_config(args)
    if args.game is None or args.game not in GAMES:
        raise UnknownName(f"unknown game {args.game!r}")
    seed = args.seed if args.seed is not None else secrets.randbits(48)
    n = args.n if args.n is not None else 1
    k = args.k if args.k is not None else 1
    trials = args.trials if args.trials is not None else 1000
    lam = args.lam
    profile = args.profile or games.PROFILE_NONE
    strategy = adversaries.make(args.adversary or "honest")
    common = dict(trials=trials, seed=seed, lam=lam, slack=args.slack,
                  threads=args.threads)

    if args.game in ("weak_qcp", "weak_qcp_ria", "flip_qcp", "flip_qcp_ria", "lor_qcp"):
        if args.backend not in BACKENDS:
            raise UnknownName(f"unknown backend {args.backend!r}")
        tag = BACKENDS[args.backend]
        if args.game == "lor_qcp":
            report = games.run_lor_qcp(tag, n, k, strategy, **common)
        else:
            runner = games.run_weak_qcp if args.game.startswith("weak") else games.run_flip_qcp
            report = runner(tag, n, k, strategy, ria=args.game.endswith("_ria"), **common)
    elif args.game in ("ud", "ud1"):
        if args.backend not in BACKENDS:
            raise UnknownName(f"unknown backend {args.backend!r}")
        scheme = _build_scheme(args.scheme or "ud1_cpa", BACKENDS[args.backend], lam)
        report = games.run_ud(scheme, n, k, strategy, profile,
                              bit_variant=(args.game == "ud1"), **common)
    elif args.game == "seuf_cma":
        report = games.run_seuf_cma(args.scheme or "LamportMerkle", strategy,
                                    max_queries=8, **common)
    elif args.game == "lor_cpa":
        scheme = _build_scheme(args.scheme or "se_bbf", qcp.IDEAL_TOKEN, lam)
        report = games.run_lor_cpa(scheme, strategy, **common)
    elif args.game == "ind":
        scheme = _build_scheme(args.scheme or "se_bbf", qcp.IDEAL_TOKEN, lam)
        report = games.run_ind(scheme, strategy, profile, **common)
    elif args.game in ("ul", "flip_ul"):
        family = FAMILIES.get(args.scheme or "keyed_mix")
        if family is None:
            raise UnknownName(f"unknown function family {args.scheme!r}")
        report = games.run_ul(family, strategy,
                              flip_variant=(args.game == "flip_ul"), **common)
    else:  # wprf
        family = FAMILIES.get(args.scheme or "keyed_mix")
        if family is None:
            raise UnknownName(f"unknown function family {args.scheme!r}")
        report = games.run_wprf(family, strategy, **common)

    payload = json.dumps(report.to_dict(), indent=1)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    return {games.WITHIN_BOUND: 0, games.EXCEEDS_BOUND: 1,
            games.INCONCLUSIVE: 2}[report.verdict]


def cmd_kat(args: argparse.Namespace) -> int:
    directory = Path(args.dir) if args.dir else kat.default_dir()
    suites = kat.SUITES if args.suite == "all" else (args.suite,)
    for suite in suites:
        if args.regenerate:
            print(f"wrote {kat.regenerate(directory, suite)}")
        else:
            try:
                kat.verify(directory, suite)
                print(f"{suite}: ok")
            except KatMismatch as exc:
                print(f"{suite}: {exc}", file=sys.stderr)
                return 1
    return 0


def cmd_suite(args: argparse.Namespace) -> int:
    results = acceptance.run_all(args.filter)
    width = max((len(r.name) for r in results), default=10)
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{r.number:3d}  {r.name:<{width}}  {mark}  {r.seconds:7.1f}s  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} criteria passed")
    return 0 if failed == 0 else 1


def cmd_list(args: argparse.Namespace) -> int:
    print("games:     ", " ".join(GAMES))
    print("backends:  ", " ".join(sorted(BACKENDS)))
    print("schemes:   ", " ".join(scheme_names()))
    print("families:  ", " ".join(sorted(FAMILIES)))
    print("adversaries:", " ".join(adversaries.registry_names()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="udsim",
                                     description="seeded security-game simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="play one game and emit a JSON report")
    run.add_argument("--game")
    run.add_argument("--scheme")
    run.add_argument("--backend", default="ideal")
    run.add_argument("--adversary")
    run.add_argument("--n", type=int)
    run.add_argument("--k", type=int)
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--profile", choices=games.PROFILES)
    run.add_argument("--slack", type=float)
    run.add_argument("--lam", type=int, default=64)
    run.add_argument("--out")
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--config", help="key=value or JSON config file; flags override")
    run.set_defaults(fn=cmd_run)

    kat_p = sub.add_parser("kat", help="verify or regenerate known-answer files")
    kat_p.add_argument("suite", choices=kat.SUITES + ("all",))
    kat_p.add_argument("--regenerate", action="store_true")
    kat_p.add_argument("--dir")
    kat_p.set_defaults(fn=cmd_kat)

    suite = sub.add_parser("suite", help="run the acceptance matrix")
    suite.add_argument("name", choices=("acceptance",))
    suite.add_argument("--filter")
    suite.set_defaults(fn=cmd_suite)

    lst = sub.add_parser("list", help="show registered names")
    lst.set_defaults(fn=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except UnknownName as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (InvalidParams, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
