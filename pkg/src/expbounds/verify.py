"""Randomized sandwich checks over many node sets.

Each trial draws from its own generator seeded with ``(seed, trial)``, so a
report is reproducible from the seed alone and any single trial can be
replayed from the instance echoed in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PositivityViolated, PrecisionExhausted
from .expdet import ExpMatrixSpec, hadamard_log_upper, logdet_exp, theorem_bounds, total_positivity_check
from .gaussrbf import GaussianModel, gaussian_bounds, logdet_gaussian
from .highprec import PrecisionConfig
from .nodes import validate_nodes

SLACK = 1e-9


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def random_nodes(rng: np.random.Generator, n: int, low: float, high: float, min_gap: float = 0.0) -> list[float]:
    """``n`` sorted uniform nodes in ``[low, high]`` with consecutive gaps >= ``min_gap``.

    Sorted uniforms on the shrunk interval ``[low, high - (n-1) min_gap]``
    are spread by adding ``i * min_gap`` to the i-th one.
    """
    span = high - low - (n - 1) * min_gap
    if span <= 0:
        raise ValueError("interval too short for the requested gap")
    while True:
        u = np.sort(rng.uniform(low, low + span, size=n))
        x = [float(v) + i * min_gap for i, v in enumerate(u)]
        try:
            return validate_nodes(x).tolist()
        except ValueError:
            continue


@dataclass
class CheckStats:
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    min_slack: float = math.inf
    worst: dict | None = None

    def record(self, slack: float, instance: dict) -> None:
        if slack >= -SLACK:
            self.passed += 1
        else:
            self.failed += 1
        if slack < self.min_slack:
            self.min_slack = slack
            self.worst = dict(instance, slack=slack if math.isfinite(slack) else None)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed": self.failed,
            "skipped": self.skipped,
            "min_slack": self.min_slack if math.isfinite(self.min_slack) else None,
            "worst_instance": self.worst,
        }


@dataclass
class VerifySettings:
    n_min: int = 2
    n_max: int = 5
    trials: int = 100
    seed: int = 0
    low: float = -3.0
    high: float = 3.0
    min_gap: float = 1e-3
    lambda_min: float = 0.1
    lambda_max: float = 10.0
    tp_max_n: int = 5
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)

    def as_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_max": self.n_max,
            "trials": self.trials,
            "seed": self.seed,
            "low": self.low,
            "high": self.high,
            "min_gap": self.min_gap,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "tp_max_n": self.tp_max_n,
            "precision_bits": self.precision.mantissa_bits,
        }


def draw_instance(settings: VerifySettings, trial: int) -> dict:
    rng = trial_rng(settings.seed, trial)
    n = int(rng.integers(settings.n_min, settings.n_max + 1))
    x = random_nodes(rng, n, settings.low, settings.high, settings.min_gap)
    y = random_nodes(rng, n, settings.low, settings.high, settings.min_gap)
    t = random_nodes(rng, n, settings.low, settings.high, settings.min_gap)
    lam = float(rng.uniform(settings.lambda_min, settings.lambda_max))
    return {"trial": trial, "n": n, "x": x, "y": y, "t": t, "lambda": lam}


def run_verify(settings: VerifySettings) -> dict:
    names = ["theorem_lower", "theorem_upper", "hadamard", "bound_gap", "gaussian_lower", "gaussian_upper"]
    stats = {name: CheckStats() for name in names}
    tp = {"passed": 0, "failed": 0, "skipped": 0, "minors_checked": 0, "min_log_minor": None,
          "min_minor_instance": None, "violations": []}
    skipped = []
    theorem_tighter = hadamard_tighter = 0
    diff_range = [math.inf, -math.inf]
    cfg = settings.precision

    for trial in range(settings.trials):
        inst = draw_instance(settings, trial)
        spec = ExpMatrixSpec(inst["x"], inst["y"])
        exp_inst = {k: inst[k] for k in ("trial", "n", "x", "y")}
        bounds = theorem_bounds(spec)
        hada = hadamard_log_upper(spec)
        stats["bound_gap"].record(bounds.log_upper - bounds.log_lower, exp_inst)
        diff = bounds.log_upper - hada
        diff_range = [min(diff_range[0], diff), max(diff_range[1], diff)]
        if diff < 0:
            theorem_tighter += 1
        elif diff > 0:
            hadamard_tighter += 1
        try:
            log_det = logdet_exp(spec, cfg).log_abs
        except PrecisionExhausted as exc:
            for name in ("theorem_lower", "theorem_upper", "hadamard"):
                stats[name].skipped += 1
            skipped.append({"trial": trial, "check": "exponential", "reason": f"{type(exc).__name__}: {exc}"})
        except PositivityViolated:
            for name in ("theorem_lower", "theorem_upper", "hadamard"):
                stats[name].record(-math.inf, exp_inst)
        else:
            stats["theorem_lower"].record(log_det - bounds.log_lower, exp_inst)
            stats["theorem_upper"].record(bounds.log_upper - log_det, exp_inst)
            stats["hadamard"].record(hada - log_det, exp_inst)

        model = GaussianModel(inst["t"], inst["lambda"])
        g_inst = {k: inst[k] for k in ("trial", "n", "t", "lambda")}
        gb = gaussian_bounds(model)
        try:
            g_det = logdet_gaussian(model, cfg).log_abs
        except PrecisionExhausted as exc:
            stats["gaussian_lower"].skipped += 1
            stats["gaussian_upper"].skipped += 1
            skipped.append({"trial": trial, "check": "gaussian", "reason": f"{type(exc).__name__}: {exc}"})
        except PositivityViolated:
            stats["gaussian_lower"].record(-math.inf, g_inst)
            stats["gaussian_upper"].record(-math.inf, g_inst)
        else:
            stats["gaussian_lower"].record(g_det - gb.log_lower, g_inst)
            stats["gaussian_upper"].record(gb.log_upper - g_det, g_inst)

        if inst["n"] > settings.tp_max_n:
            tp["skipped"] += 1
            continue
        try:
            report = total_positivity_check(spec, cfg, max_n=settings.tp_max_n)
        except PositivityViolated as exc:
            tp["failed"] += 1
            tp["violations"].append(dict(exp_inst, witness=[list(w) for w in exc.witness]))
        except PrecisionExhausted as exc:
            tp["skipped"] += 1
            skipped.append({"trial": trial, "check": "total_positivity", "reason": f"{type(exc).__name__}: {exc}"})
        else:
            tp["passed"] += 1
            tp["minors_checked"] += report.n_minors
            if tp["min_log_minor"] is None or report.min_log_minor < tp["min_log_minor"]:
                tp["min_log_minor"] = report.min_log_minor
                tp["min_minor_instance"] = dict(exp_inst, witness=[list(w) for w in report.witness])

    checks = {name: s.as_dict() for name, s in stats.items()}
    checks["total_positivity"] = tp
    failures = sum(s.failed for s in stats.values()) + tp["failed"]
    return {
        "command": "verify",
        "input": settings.as_dict(),
        "checks": checks,
        "theorem_upper_vs_hadamard": {
            "theorem_tighter": theorem_tighter,
            "hadamard_tighter": hadamard_tighter,
            "min_difference": diff_range[0] if settings.trials else None,
            "max_difference": diff_range[1] if settings.trials else None,
        },
        "skipped": skipped,
        "failures": failures,
    }
