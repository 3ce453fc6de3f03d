import math
import random

import pytest

from quadledger.quadcore import (
    EvaluationError,
    IntegrationDomain,
    InvalidDomain,
    NonConvergence,
    QuadConfig,
    integrate,
    integrate_finite,
    integrate_semi_infinite,
    refinement_values,
)

from conftest import mp_quad, mp_pi_power

PI = math.pi


# ----------------------------------------------------------------------
# domain and config validation
# ----------------------------------------------------------------------

def test_domain_requires_ordered_bounds():
    with pytest.raises(InvalidDomain):
        IntegrationDomain(1.0, 1.0)
    with pytest.raises(InvalidDomain):
        IntegrationDomain(2.0, 1.0)
    with pytest.raises(InvalidDomain):
        IntegrationDomain(math.inf, math.inf)
    with pytest.raises(InvalidDomain):
        IntegrationDomain(-math.inf, 0.0)


def test_domain_split_validation():
    with pytest.raises(InvalidDomain):
        IntegrationDomain(0.0, 1.0, (0.0,))
    with pytest.raises(InvalidDomain):
        IntegrationDomain(0.0, 1.0, (1.0,))
    with pytest.raises(InvalidDomain):
        IntegrationDomain(0.0, 1.0, (0.5, 0.5))
    with pytest.raises(InvalidDomain):
        IntegrationDomain(0.0, 1.0, (0.7, 0.3))
    dom = IntegrationDomain(0.0, math.inf, (0.5, 1.0, 2.0))
    assert dom.pieces() == ((0.0, 0.5), (0.5, 1.0), (1.0, 2.0), (2.0, math.inf))


def test_config_validation():
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=0.0, rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadConfig(max_level=2)
    with pytest.raises(ValueError):
        QuadConfig(max_evals=50)
    with pytest.raises(ValueError):
        QuadConfig(abs_tol=-1.0)


# ----------------------------------------------------------------------
# known values (each closed form reproduced to 1e-10 absolute)
# ----------------------------------------------------------------------

def test_finite_arctan_kernel():
    res = integrate_finite(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0)
    assert res.converged
    assert abs(res.value - mp_pi_power(1, 4)) <= 1e-10
    assert res.error_estimate <= max(1e-10, 1e-10 * abs(res.value))


def test_finite_constant_is_exact_within_estimate():
    res = integrate_finite(lambda x: 1.0, 0.0, 1.0)
    assert abs(res.value - 1.0) <= max(res.error_estimate, 1e-15)


def test_finite_log_kernel_matches_oracle():
    # independently: -pi^2/8 by high-precision quadrature
    oracle = mp_quad(lambda y: mpmath_log(y) / (1 - y**2), [0, 1])
    res = integrate_finite(lambda y: math.log(y) / (1.0 - y * y), 0.0, 1.0)
    assert abs(res.value - oracle) <= 1e-10
    assert abs(res.value - (-mp_pi_power(2, 8))) <= 1e-10


def test_semi_infinite_arctan_tail():
    res = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x * x), 0.0)
    assert abs(res.value - mp_pi_power(1, 2)) <= 1e-10


def test_semi_infinite_shifted_kernel():
    res = integrate_semi_infinite(lambda y: 1.0 / (y * y + 4.0), 0.0)
    assert abs(res.value - mp_pi_power(1, 4)) <= 1e-10


def test_semi_infinite_log_antisymmetry():
    res = integrate_semi_infinite(lambda x: math.log(x) / (1.0 + x * x), 0.0)
    assert abs(res.value) <= 1e-12


def test_split_domain_log_kernel():
    dom = IntegrationDomain(0.0, math.inf, (1.0,))
    res = integrate(lambda y: math.log(y) / (1.0 - y * y), dom)
    assert res.converged
    assert abs(res.value - (-mp_pi_power(2, 4))) <= 1e-10


def test_split_domain_squared_log_kernel():
    # over [0,inf) with the removable point split out, equals the
    # [0,1] integral of (1+y^2)*ln^2(y)/(1-y^2)^2
    oracle = mp_quad(
        lambda y: (1 + y**2) * mpmath_log(y) ** 2 / (1 - y**2) ** 2, [0, 1])
    dom = IntegrationDomain(0.0, math.inf, (1.0,))
    res = integrate(lambda y: math.log(y) ** 2 / ((1.0 - y * y) * (1.0 - y * y)), dom)
    assert abs(res.value - oracle) <= 1e-10


def test_integrate_without_splits_delegates():
    dom = IntegrationDomain.semi_infinite(0.0)
    a = integrate(lambda x: 1.0 / (1.0 + x * x), dom)
    b = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x * x), 0.0)
    assert a.value == b.value


# ----------------------------------------------------------------------
# invariants and properties
# ----------------------------------------------------------------------

def test_level_doubling_convergence():
    # for smooth integrands the level-(L+1) error is at most the square
    # root of the level-L error
    corpus = [
        (lambda x: x**3 - 2 * x + 1, 0.0, 1.0, 0.25),
        (lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, mp_pi_power(1, 4)),
        (lambda x: math.log(x), 0.0, 1.0, -1.0),
    ]
    for f, lo, hi, exact in corpus:
        estimates = refinement_values(f, IntegrationDomain(lo, hi),
                                      QuadConfig(max_level=8))
        errors = [abs(s - exact) for s in estimates]
        for level in range(4, len(errors) - 1):
            assert errors[level + 1] <= math.sqrt(max(errors[level], 1e-16))


@pytest.mark.parametrize("kernel,domain", [
    (lambda x: 1.0 / (1.0 + x * x), IntegrationDomain(0.0, 1.0, (0.5,))),
    (lambda y: math.log(y) / (1.0 - y * y), IntegrationDomain(0.0, math.inf, (1.0,))),
    (lambda x: math.log(x), IntegrationDomain(0.0, 2.0)),
])
def test_endpoint_avoidance(kernel, domain):
    seen: list[float] = []

    def recording(x):
        seen.append(x)
        return kernel(x)

    integrate(recording, domain)
    forbidden = {domain.lower, domain.upper, *domain.split_points}
    assert seen
    for x in seen:
        assert x not in forbidden
        assert domain.lower < x < domain.upper


def test_additivity_over_splits():
    rng = random.Random(20240817)
    f = lambda x: math.exp(-x) + x * x
    for _ in range(20):
        a = rng.uniform(-3.0, 1.0)
        c = a + rng.uniform(0.5, 4.0)
        b = rng.uniform(a + 0.1, c - 0.1)
        whole = integrate(f, IntegrationDomain(a, c, (b,)))
        left = integrate_finite(f, a, b)
        right = integrate_finite(f, b, c)
        diff = abs(whole.value - (left.value + right.value))
        combined = whole.error_estimate + left.error_estimate + right.error_estimate
        # allow plain roundoff when the error estimates underflow to zero
        assert diff <= max(2.0 * combined, 1e-13)


def test_symmetry_of_log_kernel_halves():
    upper = integrate_semi_infinite(lambda y: math.log(y) / (1.0 - y * y), 1.0)
    lower = integrate_finite(lambda y: math.log(y) / (1.0 - y * y), 0.0, 1.0)
    diff = abs(upper.value - lower.value)
    assert diff <= max(upper.error_estimate + lower.error_estimate, 1e-13)


def test_evaluation_budget_respected():
    config = QuadConfig(max_evals=100)
    with pytest.raises(NonConvergence) as excinfo:
        integrate_finite(lambda x: 1.0 / (1.0 + x * x), 0.0, 1.0, config)
    assert excinfo.value.result is None or not excinfo.value.result.converged


def test_nonconvergence_carries_partial_result():
    config = QuadConfig(max_level=3)
    noisy = lambda x: 1.0 / (1.0 + x * x) + 1e-6 * math.sin(1e7 * x)
    with pytest.raises(NonConvergence) as excinfo:
        integrate_finite(noisy, 0.0, 1.0, config)
    partial = excinfo.value.result
    assert partial is not None
    assert not partial.converged
    assert abs(partial.value - mp_pi_power(1, 4)) < 1e-3


def test_evaluation_error_on_domain_failure():
    with pytest.raises(EvaluationError) as excinfo:
        integrate_finite(lambda y: math.log(y), -1.0, 1.0)
    assert excinfo.value.node is not None


def test_evaluation_error_on_non_finite():
    with pytest.raises(EvaluationError):
        integrate_finite(lambda x: math.nan, 0.0, 1.0)
    with pytest.raises(EvaluationError):
        integrate_semi_infinite(lambda x: 1.0 / (1.0 + x * x) if x < 5 else math.inf, 0.0)


def test_converged_result_satisfies_tolerance_contract():
    config = QuadConfig(abs_tol=1e-9, rel_tol=1e-9)
    for f, lo, hi in [
        (lambda x: math.exp(-x), 0.0, 5.0),
        (lambda x: math.sqrt(x), 0.0, 2.0),
        (lambda x: 1.0 / (1.0 + x * x), -1.0, 3.0),
    ]:
        res = integrate_finite(f, lo, hi, config)
        assert res.converged
        assert res.error_estimate <= max(config.abs_tol, config.rel_tol * abs(res.value))
        assert res.evaluations <= config.max_evals


def mpmath_log(y):
    import mpmath
    return mpmath.log(y)
