#!/usr/bin/env python3
"""Honest-baseline calibration sweep.

Runs the honest strategy across a grid of (n, k) on each pirating game
and checks that the measured mean sits inside the Hoeffding interval
around the n + k/2 baseline.  A drifting row here means the harness or
the strategy is miscalibrated, independent of any attack.
"""

import argparse

from udsim import adversaries as adv
from udsim import games, qcp, schemes


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=20260800)
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()

    honest = adv.HonestBaseline()
    scheme = schemes.build_ud1_cpa(qcp.IDEAL_TOKEN)
    rows = []
    for n, k in ((1, 1), (2, 3), (3, 0)):
        rows.append(games.run_weak_qcp(qcp.IDEAL_TOKEN, n, k, honest,
                                       args.trials, args.seed,
                                       threads=args.threads))
        rows.append(games.run_flip_qcp(qcp.IDEAL_TOKEN, n, k, honest,
                                       args.trials, args.seed,
                                       threads=args.threads))
        for profile in games.PROFILES:
            rows.append(games.run_ud(scheme, n, k, honest, profile,
                                     args.trials, args.seed, bit_variant=True,
                                     threads=args.threads))

    bad = 0
    for r in rows:
        drift = r.mean - r.threshold
        inside = abs(drift) <= r.ci_half_width
        bad += not inside
        tag = "ok" if inside else "DRIFT"
        params = r.params
        print(f"{r.game_name:<10} n={params['n']} k={params['k']} "
              f"profile={params.get('oracle_profile', '-'):<5} "
              f"mean={r.mean:.4f} baseline={r.threshold:.1f} "
              f"drift={drift:+.4f} (ci {r.ci_half_width:.4f})  {tag}")
    print(f"{len(rows) - bad}/{len(rows)} rows within interval")
    raise SystemExit(0 if bad == 0 else 1)


if __name__ == "__main__":
    main()
