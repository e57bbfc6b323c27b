from fractions import Fraction
from math import comb

import numpy as np
import pytest


def bernstein_literal(n, k, x):
    """Literal binomial formula, exact for rational x."""
    if k < 0 or k > n:
        return Fraction(0)
    x = Fraction(x)
    return comb(n, k) * x**k * (1 - x) ** (n - k)


def stancu_literal(n, r, k, x):
    """Three-branch Stancu value written out case by case (independent of the library)."""
    x = Fraction(x)
    if 0 <= k < r:
        return (1 - x) * bernstein_literal(n - r, k, x)
    if r <= k <= n - r:
        return (1 - x) * bernstein_literal(n - r, k, x) + x * bernstein_literal(n - r, k - r, x)
    return x * bernstein_literal(n - r, k - r, x)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
