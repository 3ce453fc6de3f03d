"""Shared oracle helpers for the test suite.

High-precision reference values come from mpmath at 30 significant digits,
through code paths entirely independent of the package's own quadrature and
summation (so a bug in the engine cannot confirm itself).
"""

from __future__ import annotations

import mpmath

mpmath.mp.dps = 30


def mp_quad(f, points) -> float:
    """High-precision quadrature oracle; ``points`` as in mpmath.quad."""
    return float(mpmath.quad(f, points))


def mp_pi_power(num: int, den: int) -> float:
    """Nearest double to pi**num / den."""
    return float(mpmath.pi**num / den)
