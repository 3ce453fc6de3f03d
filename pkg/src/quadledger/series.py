"""Sums over odd integers and their term-by-term moment integrals.

Two families: sum over k >= 0 of 1/(2k+1)**s, and its alternating variant
sum of (-1)**k/(2k+1)**s, both for integer exponent s >= 2.

The non-alternating family would need ~10**10 terms for 1e-10 accuracy at
s = 2 by direct summation, so the tail from N onward is replaced by an
Euler-Maclaurin estimate with the first two correction terms:

    tail(N) ~ m**(1-s)/(2(s-1)) + m**-s/2 + s*m**-(s+1)/6
              - s(s+1)(s+2)*m**-(s+3)/90,        m = 2N + 1

The reported tail bound is the magnitude of the first omitted correction,
s(s+1)(s+2)(s+3)(s+4) * m**-(s+5) / 945, which also bounds the true error
because the summand is completely monotone. The alternating family uses
plain partial summation: its error is bounded by the first omitted term,
and convergence is already O(N**-s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .summation import CompensatedSum


class SeriesFamily(Enum):
    ODD_POWER = "odd"
    ALTERNATING_ODD_POWER = "altodd"


class ToleranceUnreachable(Exception):
    """The requested tolerance needs more terms than the configured cap."""


class UnsupportedPower(Exception):
    """moment_integral supports log powers 1, 2 and 3 only."""


_TERM_CAP = 10**7
_MIN_TERMS = 8


@dataclass(frozen=True)
class SeriesSpec:
    family: SeriesFamily
    exponent: int

    def __post_init__(self) -> None:
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise ValueError("exponent must be an integer")
        if self.exponent < 2:
            raise ValueError("exponent must be at least 2 for convergence")


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    tail_bound: float


def _euler_maclaurin_tail(s: int, n_terms: int) -> float:
    m = 2.0 * n_terms + 1.0
    return (
        m ** (1 - s) / (2.0 * (s - 1))
        + 0.5 * m**-s
        + (s / 6.0) * m ** (-s - 1)
        - (s * (s + 1) * (s + 2) / 90.0) * m ** (-s - 3)
    )


def _first_omitted_correction(s: int, n_terms: int) -> float:
    m = 2.0 * n_terms + 1.0
    return s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 945.0 * m ** (-s - 5)


def sum_series(spec: SeriesSpec, tol: float) -> SeriesResult:
    """Sum the series to within ``tol``, reporting the terms used and a tail bound.

    Raises ToleranceUnreachable if more than 10**7 terms would be needed.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    s = spec.exponent
    if spec.family is SeriesFamily.ODD_POWER:
        coeff = s * (s + 1) * (s + 2) * (s + 3) * (s + 4) / 945.0
        m_min = (2.0 * coeff / tol) ** (1.0 / (s + 5))
        n_terms = max(_MIN_TERMS, int(math.ceil((m_min - 1.0) / 2.0)))
        if n_terms > _TERM_CAP:
            raise ToleranceUnreachable(f"tolerance {tol!r} needs more than {_TERM_CAP} terms")
        while _first_omitted_correction(s, n_terms) > 0.5 * tol:
            n_terms += max(1, n_terms // 10)
            if n_terms > _TERM_CAP:
                raise ToleranceUnreachable(
                    f"tolerance {tol!r} needs more than {_TERM_CAP} terms"
                )
        acc = CompensatedSum()
        for k in range(n_terms):
            acc.add((2.0 * k + 1.0) ** -s)
        value = acc.value + _euler_maclaurin_tail(s, n_terms)
        return SeriesResult(value, n_terms, _first_omitted_correction(s, n_terms))

    n_terms = max(1, int(math.ceil(((1.0 / tol) ** (1.0 / s) - 1.0) / 2.0)))
    if n_terms > _TERM_CAP:
        raise ToleranceUnreachable(f"tolerance {tol!r} needs more than {_TERM_CAP} terms")
    while (2.0 * n_terms + 1.0) ** -s > tol:
        n_terms += 1
        if n_terms > _TERM_CAP:
            raise ToleranceUnreachable(
                f"tolerance {tol!r} needs more than {_TERM_CAP} terms"
            )
    acc = CompensatedSum()
    sign = 1.0
    for k in range(n_terms):
        acc.add(sign * (2.0 * k + 1.0) ** -s)
        sign = -sign
    return SeriesResult(acc.value, n_terms, (2.0 * n_terms + 1.0) ** -s)


def zeta2_from_odd(odd_sum: float) -> float:
    """Map the odd-square sum to the full reciprocal-square sum.

    Splitting sum(1/n**2) over odd and even n gives
    zeta(2) = odd_sum + zeta(2)/4, hence zeta(2) = (4/3)*odd_sum.
    """
    if not odd_sum > 0.0:
        raise ValueError("odd_sum must be positive")
    return (4.0 / 3.0) * odd_sum


def moment_integral(k: int, p: int) -> float:
    """Closed form of the moment integral of y**(2k) * ln(y)**p over [0, 1].

    Repeated integration by parts gives (-1)**p * p! / (2k+1)**(p+1).
    """
    if not isinstance(k, int) or isinstance(k, bool) or k < 0:
        raise ValueError("k must be a non-negative integer")
    if p not in (1, 2, 3):
        raise UnsupportedPower(f"log power {p!r} not in (1, 2, 3)")
    sign = -1.0 if p % 2 else 1.0
    return sign * math.factorial(p) / float(2 * k + 1) ** (p + 1)
