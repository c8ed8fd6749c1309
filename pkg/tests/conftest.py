import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# (criterion, passed, detail) lines collected by test_acceptance.py
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda r: int(r[0].split()[0])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


class Monomial:
    """``f(a) = a**k``; evaluates exactly on Fractions, and at mpf precision when given a context."""

    def __init__(self, k):
        self.k = k

    def value(self, alpha, ctx=None):
        if ctx is not None:
            return ctx.mpf(alpha) ** self.k
        return alpha ** self.k


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def exact_divided_difference(nodes, f):
    """Symmetric formula sum_i f(v_i) / prod_{j != i} (v_i - v_j), in exact rationals."""
    v = [Fraction(a) for a in nodes]
    total = Fraction(0)
    for i, vi in enumerate(v):
        denom = Fraction(1)
        for j, vj in enumerate(v):
            if j != i:
                denom *= vi - vj
        total += Fraction(f(vi)) / denom
    return total


def log_rel(a, b):
    """Disagreement of two log-domain values, absolute near 0 and relative elsewhere."""
    return abs(a - b) / max(1.0, abs(b))
