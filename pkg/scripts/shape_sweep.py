"""Compare the determinant-based shape choice lambda* = N/S with leave-one-out.

Samples a test function at random nodes, sweeps lambda over a geometric grid
around lambda*, and prints per-lambda objective, LOOCV error and the error of
the interpolant on a dense check grid. The last line summarizes where each
criterion puts its optimum.

    python3 scripts/shape_sweep.py --n 8 --func runge --seed 3
"""

import argparse
import csv
import math
import sys

import numpy as np

from expbounds import PrecisionConfig, PrecisionExhausted, geometric_grid, interpolate, loocv_error, select_shape, shape_objective
from expbounds.verify import random_nodes

FUNCS = {
    "runge": lambda t: 1.0 / (1.0 + 25.0 * t * t),
    "sine": lambda t: np.sin(3.0 * t),
    "bump": lambda t: np.exp(-4.0 * t * t) * np.cos(5.0 * t),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--func", choices=sorted(FUNCS), default="runge")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--points", type=int, default=25, help="grid points over [lambda*/30, 30 lambda*]")
    ap.add_argument("--bits", type=int, default=256)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    f = FUNCS[args.func]
    t = random_nodes(rng, args.n, -1.0, 1.0, 0.02)
    v = f(np.asarray(t))
    check = np.linspace(-1.0, 1.0, 401)
    lam_star = select_shape(t)
    cfg = PrecisionConfig(mantissa_bits=args.bits)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["lambda", "log_f", "loocv", "max_abs_error"])
    best = {"log_f": (-math.inf, None), "loocv": (math.inf, None), "error": (math.inf, None)}
    for lam in geometric_grid(lam_star / 30, 30 * lam_star, args.points):
        log_f = shape_objective(t, lam)
        try:
            loo = loocv_error(t, v, lam, cfg)
            err = float(np.max(np.abs(interpolate(t, v, lam, cfg)(check) - f(check))))
        except PrecisionExhausted:
            loo = err = math.nan
        writer.writerow([lam, log_f, loo, err])
        if log_f > best["log_f"][0]:
            best["log_f"] = (log_f, lam)
        if loo < best["loocv"][0]:
            best["loocv"] = (loo, lam)
        if err < best["error"][0]:
            best["error"] = (err, lam)
    print(
        f"# lambda*={lam_star:.4g}; grid argmax log_f at {best['log_f'][1]:.4g}, "
        f"argmin loocv at {best['loocv'][1]:.4g}, argmin check error at {best['error'][1]:.4g}",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
