import math

import mpmath
import pytest

from quadledger.quadcore import integrate_finite
from quadledger.series import (
    SeriesFamily,
    SeriesSpec,
    ToleranceUnreachable,
    UnsupportedPower,
    moment_integral,
    sum_series,
    zeta2_from_odd,
)

from conftest import mp_pi_power

ODD2 = SeriesSpec(SeriesFamily.ODD_POWER, 2)
ALT3 = SeriesSpec(SeriesFamily.ALTERNATING_ODD_POWER, 3)


def brute_force_odd_power(s: int, terms: int) -> float:
    # independent oracle: plain summation, descending so small terms count
    return math.fsum((2 * k + 1.0) ** -s for k in reversed(range(terms)))


def brute_force_alternating(s: int, threshold: float) -> float:
    # independent oracle: sum until the first omitted term drops below threshold
    total = []
    k = 0
    while (2 * k + 1.0) ** -s >= threshold:
        total.append((-1.0) ** k * (2 * k + 1.0) ** -s)
        k += 1
    return math.fsum(total)


def test_spec_validation():
    with pytest.raises(ValueError):
        SeriesSpec(SeriesFamily.ODD_POWER, 1)
    with pytest.raises(ValueError):
        SeriesSpec(SeriesFamily.ODD_POWER, 2.0)  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        sum_series(ODD2, 0.0)


def test_odd_power_two_matches_pi_squared_over_eight():
    res = sum_series(ODD2, 1e-12)
    assert res.tail_bound <= 1e-12
    assert abs(res.value - mp_pi_power(2, 8)) <= 1e-12
    # the tail estimate keeps the term count tiny
    assert res.terms_used < 1000


def test_odd_power_matches_brute_force():
    # 2e6 terms of the s=2 series leave a tail below 2.6e-7; compare there
    oracle = brute_force_odd_power(2, 2_000_000)
    res = sum_series(ODD2, 1e-12)
    assert abs(res.value - oracle) <= 1.3e-7


def test_odd_power_four():
    res = sum_series(SeriesSpec(SeriesFamily.ODD_POWER, 4), 1e-12)
    oracle = brute_force_odd_power(4, 200_000)
    assert abs(res.value - oracle) <= 1e-12
    assert abs(res.value - 1.0146780316041921) <= 1e-12


def test_alternating_three():
    res = sum_series(ALT3, 1e-12)
    oracle = brute_force_alternating(3, 1e-13)
    assert abs(res.value - oracle) <= 2e-12
    assert abs(res.value - 0.9689461462593694) <= 2e-12
    assert res.tail_bound <= 1e-12


def test_tail_honesty():
    loose = sum_series(ODD2, 1e-8)
    tight = sum_series(ODD2, 1e-10)
    assert abs(loose.value - tight.value) <= loose.tail_bound


def test_alternating_partial_sums_bracket_value():
    res = sum_series(ALT3, 1e-12)
    for terms in (3, 10, 25, 101, 400):
        partial_even = math.fsum((-1.0) ** k * (2 * k + 1.0) ** -3
                                 for k in range(2 * (terms // 2)))
        partial_odd = math.fsum((-1.0) ** k * (2 * k + 1.0) ** -3
                                for k in range(2 * (terms // 2) + 1))
        assert partial_even < res.value < partial_odd


def test_corollary_consistency():
    odd = sum_series(ODD2, 1e-12)
    zeta2 = zeta2_from_odd(odd.value)
    n = 10**6
    brute = math.fsum(1.0 / (k * k) for k in reversed(range(1, n + 1))) + 1.0 / n
    assert abs(zeta2 - brute) <= 1e-6
    assert abs(zeta2 - mp_pi_power(2, 6)) <= 1e-9


def test_zeta2_from_odd():
    assert zeta2_from_odd(0.75) == 1.0
    assert abs(zeta2_from_odd(1.23370055013617) - 1.64493406684823) <= 1e-11
    with pytest.raises(ValueError):
        zeta2_from_odd(0.0)
    with pytest.raises(ValueError):
        zeta2_from_odd(-1.0)


def test_moment_integral_closed_forms():
    assert moment_integral(0, 1) == -1.0
    assert math.isclose(moment_integral(1, 1), -1.0 / 9.0, rel_tol=0, abs_tol=1e-16)
    assert moment_integral(0, 3) == -6.0
    assert moment_integral(0, 2) == 2.0
    with pytest.raises(UnsupportedPower):
        moment_integral(0, 4)
    with pytest.raises(ValueError):
        moment_integral(-1, 1)


def test_moment_integral_matches_quadrature():
    for k in range(11):
        for p in (1, 2, 3):
            f = lambda y, k=k, p=p: y ** (2 * k) * math.log(y) ** p
            res = integrate_finite(f, 0.0, 1.0)
            assert abs(res.value - moment_integral(k, p)) <= 1e-10, (k, p)


def test_moment_integral_matches_mpmath():
    for k in (0, 3, 7):
        for p in (1, 2, 3):
            oracle = float(mpmath.quad(
                lambda y: y ** (2 * k) * mpmath.log(y) ** p, [0, 1]))
            assert abs(moment_integral(k, p) - oracle) <= 1e-14


def test_tolerance_unreachable():
    with pytest.raises(ToleranceUnreachable):
        sum_series(SeriesSpec(SeriesFamily.ALTERNATING_ODD_POWER, 2), 1e-15)


def test_result_metadata():
    res = sum_series(ALT3, 1e-6)
    assert res.tail_bound <= 1e-6
    assert (2.0 * res.terms_used + 1.0) ** -3 <= 1e-6
    assert (2.0 * (res.terms_used - 1) + 1.0) ** -3 > 1e-6
