#!/usr/bin/env python3
"""Splitting-attack scaling curve.

Runs the flip game on the split-pair backend with the splitting pirate at
increasing per-freeloader query budgets q and prints the measured
per-freeloader success rate next to the closed-form value 1 - 2^-(q+1).
"""

import argparse
import math

from udsim import adversaries as adv
from udsim import games, qcp


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=20260800)
    parser.add_argument("--qmax", type=int, default=8)
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()

    ci = math.sqrt(math.log(2 / 0.01) / (2 * args.trials))
    print(f"trials={args.trials} seed={args.seed} (ci half-width {ci:.4f})")
    print(f"{'q':>3}  {'measured':>9}  {'predicted':>9}  {'delta':>8}")
    for q in range(1, args.qmax + 1):
        report = games.run_flip_qcp(qcp.SPLIT_PAIR, 1, 1, adv.SplitFlipAttack(q),
                                    args.trials, args.seed + q,
                                    threads=args.threads)
        per = report.mean / 2
        target = 1 - 2 ** -(q + 1)
        print(f"{q:>3}  {per:>9.4f}  {target:>9.4f}  {per - target:>+8.4f}")


if __name__ == "__main__":
    main()
