"""How tight are the exponential-matrix bounds as n grows?

For each n, draws random node pairs and reports the mean and worst gap
between the oracle log-det and each bound (lower, upper, Hadamard), plus how
often the theorem upper bound beats Hadamard. Writes CSV to stdout.

    python3 scripts/bound_tightness.py --n-max 7 --trials 200 --seed 1
"""

import argparse
import csv
import sys

import numpy as np

from expbounds import ExpMatrixSpec, hadamard_log_upper, logdet_exp, theorem_bounds
from expbounds.verify import random_nodes, trial_rng


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=7)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--low", type=float, default=-3.0)
    ap.add_argument("--high", type=float, default=3.0)
    ap.add_argument("--min-gap", type=float, default=1e-3)
    args = ap.parse_args()

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(
        ["n", "trials", "mean_lower_gap", "max_lower_gap", "mean_upper_gap", "max_upper_gap", "mean_hadamard_gap", "theorem_upper_wins"]
    )
    for n in range(2, args.n_max + 1):
        lower, upper, hada, wins = [], [], [], 0
        for trial in range(args.trials):
            rng = trial_rng(args.seed, n * 1_000_003 + trial)
            spec = ExpMatrixSpec(
                random_nodes(rng, n, args.low, args.high, args.min_gap),
                random_nodes(rng, n, args.low, args.high, args.min_gap),
            )
            d = logdet_exp(spec).log_abs
            b = theorem_bounds(spec)
            h = hadamard_log_upper(spec)
            lower.append(d - b.log_lower)
            upper.append(b.log_upper - d)
            hada.append(h - d)
            wins += b.log_upper < h
        writer.writerow(
            [n, args.trials, np.mean(lower), np.max(lower), np.mean(upper), np.max(upper), np.mean(hada), wins]
        )


if __name__ == "__main__":
    main()
