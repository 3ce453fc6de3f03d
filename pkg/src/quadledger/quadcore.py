"""One-dimensional double-exponential quadrature.

Finite intervals use the tanh-sinh transform x = mid + halfspan*tanh((pi/2)*sinh(t));
semi-infinite intervals [lower, inf) use the exp-sinh transform
x = lower + sigma*exp((pi/2)*sinh(t)) with sigma = |lower| (or 1 when lower is 0).
Both turn endpoint singularities of integrable logarithmic type into smooth,
doubly-exponentially decaying integrands of t, which the trapezoid rule then
nails at a geometric per-level rate: halving the mesh roughly squares the error.

Node generation and truncation policy (all scale-relative, so node tables are
computed once per refinement level and shared):

* table rows stop once the transform weight underflows below 1e-300;
* exp-sinh offsets are capped at 1e60 times the interval scale, keeping every
  node coordinate small enough that squares and quartic products of
  coordinates stay finite in double precision;
* a side whose endpoint is exactly zero stops descending at a relative offset
  of 1e-60 (squares of coordinates then stay strictly positive);
* a side stops as soon as a node collides with its endpoint in floating
  point, so no node ever equals a domain endpoint or split point.

Convergence at level L requires the last *two* successive-level differences
to sit inside max(abs_tol, rel_tol*|value|); a single small difference can be
a transient crossing rather than convergence. The reported error estimate is
|S_L - S_{L-1}|, an estimate rather than a bound.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .summation import CompensatedSum

HALF_PI = math.pi / 2.0

_WEIGHT_FLOOR = 1e-300   # drop abscissae whose transform weight underflows
_OFFSET_CAP = 1e60       # largest exp-sinh offset, relative to the scale
_DEPTH_EPS = 1e-60       # relative descent floor toward a zero endpoint


class QuadratureError(Exception):
    """Base class for quadrature failures."""


class InvalidDomain(QuadratureError):
    """An integration domain violates its invariants."""


class EvaluationError(QuadratureError):
    """The integrand failed (raised, or returned a non-finite value) at a node.

    Attributes
    ----------
    node : float or None
        The abscissa at which the integrand failed.
    """

    def __init__(self, message: str, node: float | None = None) -> None:
        super().__init__(message)
        self.node = node


class NonConvergence(QuadratureError):
    """Refinement budget exhausted before the tolerance test passed.

    Attributes
    ----------
    result : QuadResult or None
        Best partial result at the point of failure (converged=False).
    """

    def __init__(self, message: str, result: "QuadResult | None" = None) -> None:
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadConfig:
    """Tolerance and budget knobs shared by all quadrature entry points."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_level: int = 12
    max_evals: int = 200_000

    def __post_init__(self) -> None:
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_level < 3:
            raise ValueError("max_level must be at least 3")
        if self.max_evals < 100:
            raise ValueError("max_evals must be at least 100")


DEFAULT_CONFIG = QuadConfig()


@dataclass(frozen=True)
class QuadResult:
    """Outcome of one quadrature: value, error estimate, cost, convergence flag."""

    value: float
    error_estimate: float
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class IntegrationDomain:
    """An interval, finite or semi-infinite, with optional interior split points.

    ``upper`` may be ``math.inf`` for a semi-infinite domain. Split points mark
    interior singular or removable-singular abscissae; integration partitions
    the domain there so every troublesome point becomes an (avoided) endpoint.
    """

    lower: float
    upper: float
    split_points: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        object.__setattr__(
            self, "split_points", tuple(float(p) for p in self.split_points)
        )
        if not math.isfinite(self.lower):
            raise InvalidDomain("lower bound must be finite")
        if math.isnan(self.upper) or self.upper == -math.inf:
            raise InvalidDomain("upper bound must be finite or +inf")
        if not self.upper > self.lower:
            raise InvalidDomain("domain requires lower < upper")
        prev = self.lower
        for p in self.split_points:
            if not math.isfinite(p):
                raise InvalidDomain("split points must be finite")
            if not (self.lower < p < self.upper):
                raise InvalidDomain(f"split point {p!r} is not strictly inside the domain")
            if p <= prev:
                raise InvalidDomain("split points must be strictly increasing, no duplicates")
            prev = p

    @classmethod
    def finite(cls, lower: float, upper: float,
               split_points: Sequence[float] = ()) -> "IntegrationDomain":
        if math.isinf(upper):
            raise InvalidDomain("finite domain requires a finite upper bound")
        return cls(lower, upper, tuple(split_points))

    @classmethod
    def semi_infinite(cls, lower: float,
                      split_points: Sequence[float] = ()) -> "IntegrationDomain":
        return cls(lower, math.inf, tuple(split_points))

    @property
    def is_semi_infinite(self) -> bool:
        return math.isinf(self.upper)

    def pieces(self) -> tuple[tuple[float, float], ...]:
        """Sub-intervals delimited by the split points, in order."""
        bounds = (self.lower, *self.split_points, self.upper)
        return tuple(zip(bounds[:-1], bounds[1:]))


# --------------------------------------------------------------------------
# Node tables, memoized per refinement level behind a lock (read-mostly).
# Level 0 holds t = h, 2h, ...; level L >= 1 holds the new odd multiples of
# h = 2**-L. Entries are scale-free: tanh-sinh rows store (delta, weight)
# with delta = 1 - |tanh((pi/2) sinh t)| computed in its cancellation-safe
# exponential form; exp-sinh rows store (offset, weight) per sign of t.
# --------------------------------------------------------------------------

_tables_lock = threading.Lock()
_tanh_sinh_tables: dict[int, tuple[tuple[float, float], ...]] = {}
_exp_sinh_tables: dict[int, tuple[tuple[tuple[float, float], ...],
                                  tuple[tuple[float, float], ...]]] = {}


def _tanh_sinh_rows(level: int) -> tuple[tuple[float, float], ...]:
    rows = _tanh_sinh_tables.get(level)
    if rows is not None:
        return rows
    with _tables_lock:
        rows = _tanh_sinh_tables.get(level)
        if rows is not None:
            return rows
        h = 2.0 ** -level
        step = 1 if level == 0 else 2
        out: list[tuple[float, float]] = []
        k = 1
        while True:
            t = k * h
            s = HALF_PI * math.sinh(t)
            ex = math.exp(-2.0 * s)
            delta = 2.0 * ex / (1.0 + ex)
            weight = 2.0 * math.pi * math.cosh(t) * ex / (1.0 + ex) ** 2
            if weight < _WEIGHT_FLOOR:
                break
            out.append((delta, weight))
            k += step
        rows = tuple(out)
        _tanh_sinh_tables[level] = rows
        return rows


def _exp_sinh_rows(level: int) -> tuple[tuple[tuple[float, float], ...],
                                        tuple[tuple[float, float], ...]]:
    rows = _exp_sinh_tables.get(level)
    if rows is not None:
        return rows
    with _tables_lock:
        rows = _exp_sinh_tables.get(level)
        if rows is not None:
            return rows
        h = 2.0 ** -level
        step = 1 if level == 0 else 2
        plus: list[tuple[float, float]] = []
        k = 1
        while True:
            t = k * h
            s = HALF_PI * math.sinh(t)
            try:
                r = math.exp(s)
            except OverflowError:
                break
            if r > _OFFSET_CAP:
                break
            plus.append((r, HALF_PI * math.cosh(t) * r))
            k += step
        minus: list[tuple[float, float]] = []
        k = 1
        while True:
            t = -k * h
            s = HALF_PI * math.sinh(t)
            r = math.exp(s)
            weight = HALF_PI * math.cosh(t) * r
            if weight < _WEIGHT_FLOOR:
                break
            minus.append((r, weight))
            k += step
        rows = (tuple(plus), tuple(minus))
        _exp_sinh_tables[level] = rows
        return rows


class _Budget:
    __slots__ = ("used", "limit")

    def __init__(self, limit: int) -> None:
        self.used = 0
        self.limit = limit


def _call(f: Callable[[float], float], x: float, budget: _Budget) -> float:
    if budget.used >= budget.limit:
        raise NonConvergence(
            f"evaluation budget of {budget.limit} exhausted before convergence"
        )
    budget.used += 1
    try:
        y = f(x)
    except (NonConvergence, EvaluationError):
        raise
    except (ArithmeticError, ValueError) as exc:
        raise EvaluationError(f"integrand failed at x={x!r}: {exc}", node=x) from exc
    y = float(y)
    if not math.isfinite(y):
        raise EvaluationError(f"integrand returned {y!r} at x={x!r}", node=x)
    return y


def _run_levels(add_level, config: QuadConfig, trace: list[float] | None):
    """Shared refinement driver.

    ``add_level(level)`` evaluates the new nodes of that level into a running
    compensated sum and returns the raw node total; the driver rescales by the
    mesh width and applies the two-consecutive-differences convergence test.
    Returns (value, error_estimate, converged). Integrand failures and budget
    exhaustion surface as exceptions out of ``add_level``.
    """
    prev_value = None
    err = math.inf
    prev_err = math.inf
    value = math.nan
    for level in range(config.max_level + 1):
        total = add_level(level)
        value = (2.0 ** -level) * total
        if trace is not None:
            trace.append(value)
        if prev_value is not None:
            prev_err = err
            err = abs(value - prev_value)
            band = max(config.abs_tol, config.rel_tol * abs(value))
            if err <= band and prev_err <= band and trace is None:
                return value, err, True
        prev_value = value
    return value, err, False


def _finite_core(f, lower: float, upper: float, config: QuadConfig,
                 budget: _Budget, trace: list[float] | None):
    halfspan = 0.5 * (upper - lower)
    midpoint = 0.5 * (upper + lower)
    if not lower < midpoint < upper:
        # interval thinner than the floating-point grid: numerically null
        return 0.0, 0.0, True
    lower_is_zero = lower == 0.0
    upper_is_zero = upper == 0.0
    acc = CompensatedSum()
    acc.add(HALF_PI * _call(f, midpoint, budget))

    def add_level(level: int) -> float:
        lower_side = upper_side = True
        for delta, weight in _tanh_sinh_rows(level):
            offset = halfspan * delta
            if upper_side:
                x = upper - offset
                if x >= upper or (upper_is_zero and delta < _DEPTH_EPS):
                    upper_side = False
                else:
                    acc.add(weight * _call(f, x, budget))
            if lower_side:
                x = lower + offset
                if x <= lower or (lower_is_zero and delta < _DEPTH_EPS):
                    lower_side = False
                else:
                    acc.add(weight * _call(f, x, budget))
            if not (lower_side or upper_side):
                break
        return halfspan * acc.value

    return _run_levels(add_level, config, trace)


def _semi_infinite_core(f, lower: float, config: QuadConfig,
                        budget: _Budget, trace: list[float] | None):
    sigma = abs(lower) or 1.0
    lower_is_zero = lower == 0.0
    acc = CompensatedSum()
    acc.add(sigma * HALF_PI * _call(f, lower + sigma, budget))

    def add_level(level: int) -> float:
        plus, minus = _exp_sinh_rows(level)
        for r, weight in plus:
            offset = sigma * r
            if math.isinf(offset):
                break
            acc.add(sigma * weight * _call(f, lower + offset, budget))
        for r, weight in minus:
            x = lower + sigma * r
            if x <= lower or (lower_is_zero and r < _DEPTH_EPS):
                break
            acc.add(sigma * weight * _call(f, x, budget))
        return acc.value

    return _run_levels(add_level, config, trace)


def integrate_finite(f: Callable[[float], float], lower: float, upper: float,
                     config: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Integrate ``f`` over the finite interval [lower, upper].

    Tanh-sinh quadrature; integrable logarithmic singularities at either
    endpoint are fine because nodes approach endpoints double-exponentially
    without ever touching them.

    Raises
    ------
    NonConvergence
        If max_level or max_evals is exhausted first (carries the partial
        result).
    EvaluationError
        If ``f`` raises a domain-style error or returns a non-finite value
        at an interior node.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise InvalidDomain("integrate_finite requires finite bounds")
    if not lower < upper:
        raise InvalidDomain("integrate_finite requires lower < upper")
    budget = _Budget(config.max_evals)
    value, err, converged = _finite_core(f, lower, upper, config, budget, None)
    if not converged:
        raise NonConvergence(
            f"no convergence within {config.max_level} levels "
            f"(last error estimate {err:.3e})",
            result=QuadResult(value, err, budget.used, False),
        )
    return QuadResult(value, err, budget.used, True)


def integrate_semi_infinite(f: Callable[[float], float], lower: float,
                            config: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Integrate ``f`` over [lower, inf).

    Exp-sinh quadrature with offsets scaled by max(|lower|, 1). The integrand
    must decay integrably; mass beyond roughly 1e60 times the scale is
    treated as negligible, which is ample for anything decaying at least
    like x**-1.3.
    """
    if not math.isfinite(lower):
        raise InvalidDomain("integrate_semi_infinite requires a finite lower bound")
    budget = _Budget(config.max_evals)
    value, err, converged = _semi_infinite_core(f, lower, config, budget, None)
    if not converged:
        raise NonConvergence(
            f"no convergence within {config.max_level} levels "
            f"(last error estimate {err:.3e})",
            result=QuadResult(value, err, budget.used, False),
        )
    return QuadResult(value, err, budget.used, True)


def integrate(f: Callable[[float], float], domain: IntegrationDomain,
              config: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Integrate ``f`` over ``domain``, partitioning at its split points.

    Each piece runs at tolerance tightened by the piece count; piece values
    are summed with compensation and piece error estimates combine in root
    sum of squares. A piece that exhausts its refinement levels contributes
    its partial value and error estimate rather than aborting: the tolerance
    contract is judged on the whole integral, so a sliver piece between two
    nearly coincident split points (whose own relative tolerance is
    unreachable in double precision) cannot sink an otherwise converged
    result. The combined estimate must pass the tolerance test, otherwise
    NonConvergence is raised.
    """
    piece_bounds = domain.pieces()
    n = len(piece_bounds)
    piece_config = replace(config, abs_tol=config.abs_tol / n,
                           rel_tol=config.rel_tol / n) if n > 1 else config
    total = CompensatedSum()
    err_sq = 0.0
    evaluations = 0
    for lo, hi in piece_bounds:
        budget = _Budget(config.max_evals)
        try:
            if math.isinf(hi):
                value, err, _converged = _semi_infinite_core(
                    f, lo, piece_config, budget, None)
            else:
                value, err, _converged = _finite_core(
                    f, lo, hi, piece_config, budget, None)
        finally:
            evaluations += budget.used
        total.add(value)
        err_sq += err * err
    value = total.value
    error = math.sqrt(err_sq)
    if error > max(config.abs_tol, config.rel_tol * abs(value)):
        raise NonConvergence(
            "combined piece error estimates exceed the requested tolerance",
            result=QuadResult(value, error, evaluations, False),
        )
    return QuadResult(value, error, evaluations, True)


def refinement_values(f: Callable[[float], float], domain: IntegrationDomain,
                      config: QuadConfig = DEFAULT_CONFIG) -> list[float]:
    """Successive per-level estimates S_0..S_L for a split-free domain.

    Diagnostic hook used by convergence-rate tests; runs every level up to
    max_level regardless of the tolerance test.
    """
    if domain.split_points:
        raise InvalidDomain("refinement_values requires a split-free domain")
    trace: list[float] = []
    budget = _Budget(config.max_evals)
    try:
        if domain.is_semi_infinite:
            _semi_infinite_core(f, domain.lower, config, budget, trace)
        else:
            _finite_core(f, domain.lower, domain.upper, config, budget, trace)
    except NonConvergence:
        pass  # evaluation budget ran out; return the levels completed so far
    return trace
