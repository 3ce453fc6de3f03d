"""Iterated two-dimensional integration over product domains.

The double integral is computed as nested one-dimensional quadratures: at
each node of the outer rule, the inner integral is solved to a tightened
tolerance and its value becomes the outer integrand. Running both iteration
orders and comparing is the order-of-integration (Fubini) agreement check.

Inner tolerance policy: the relative tolerance is tightened by a factor of
10 (configurable) so inner noise does not pollute the outer error estimate.
The inner *absolute* tolerance is dropped to zero whenever a relative
tolerance is available: on semi-infinite outer domains the outer transform
weights grow with position, so a fixed absolute inner error would be
amplified arbitrarily.

Dependent inner split points: ``ProductDomain.inner_splits`` maps the value
of the outermost integration variable to extra split points for the
innermost domain (in whichever orientation is active). Every valid point is
kept, because a split may mark a genuine singularity that nodes must never
touch; exact duplicates collapse, and the sliver pieces that arise when a
dynamic split lands next to another split are absorbed by the piece-sum
tolerance policy of :func:`quadledger.quadcore.integrate`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

from .quadcore import (
    DEFAULT_CONFIG,
    IntegrationDomain,
    InvalidDomain,
    NonConvergence,
    QuadConfig,
    QuadResult,
    integrate,
)


class IterationOrder(Enum):
    INNER_FIRST = "inner-first"
    OUTER_FIRST = "outer-first"


@dataclass(frozen=True)
class ProductDomain:
    """A rectangle ``outer x inner``, with optional dependent inner splits."""

    outer: IntegrationDomain
    inner: IntegrationDomain
    inner_splits: Callable[[float], Sequence[float]] | None = None


@dataclass(frozen=True)
class FubiniReport:
    """Agreement of the two iteration orders; the caller judges pass/fail."""

    value_order_ab: float
    value_order_ba: float
    discrepancy: float
    both_converged: bool


_INNER_TIGHTENING = 10.0


def _with_dynamic_splits(base: IntegrationDomain,
                         extra: Sequence[float]) -> IntegrationDomain:
    """Merge dependent split points into a domain (exact duplicates collapse)."""
    points = set(base.split_points)
    for p in extra:
        p = float(p)
        if not math.isfinite(p):
            raise InvalidDomain(f"dependent split point {p!r} is not finite")
        if not (base.lower < p < base.upper):
            raise InvalidDomain(
                f"dependent split point {p!r} is not strictly inside "
                f"[{base.lower!r}, {base.upper!r}]"
            )
        points.add(p)
    if points == set(base.split_points):
        return base
    return IntegrationDomain(base.lower, base.upper, tuple(sorted(points)))


def _inner_config(config: QuadConfig) -> QuadConfig:
    if config.rel_tol > 0.0:
        return replace(config, abs_tol=0.0, rel_tol=config.rel_tol / _INNER_TIGHTENING)
    return replace(config, abs_tol=config.abs_tol / _INNER_TIGHTENING)


def integrate_iterated(f: Callable[[float, float], float], domain: ProductDomain,
                       order: IterationOrder = IterationOrder.INNER_FIRST,
                       config: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Iterated integral of ``f(u, v)`` with u over ``domain.outer``.

    INNER_FIRST computes, for each outer node u, the inner integral over v;
    OUTER_FIRST transposes the nesting so the declared outer domain becomes
    the innermost integral. ``evaluations`` counts all integrand calls made
    by inner integrals (which may exceed ``max_evals``; that cap applies to
    each one-dimensional solve individually). Non-convergence of any inner
    integral aborts the whole computation: a silently skipped node would
    corrupt verification.
    """
    if order is IterationOrder.OUTER_FIRST:
        transposed = ProductDomain(domain.inner, domain.outer, domain.inner_splits)
        return integrate_iterated(lambda v, u: f(u, v), transposed,
                                  IterationOrder.INNER_FIRST, config)

    inner_cfg = _inner_config(config)
    inner_evals = 0

    def outer_integrand(u: float) -> float:
        nonlocal inner_evals
        inner_domain = domain.inner
        if domain.inner_splits is not None:
            inner_domain = _with_dynamic_splits(inner_domain,
                                                tuple(domain.inner_splits(u)))
        try:
            result = integrate(lambda v: f(u, v), inner_domain, inner_cfg)
        except NonConvergence as exc:
            raise NonConvergence(
                f"inner integral did not converge at outer node {u!r}: {exc}",
                result=exc.result,
            ) from exc
        inner_evals += result.evaluations
        return result.value

    outer = integrate(outer_integrand, domain.outer, config)
    return QuadResult(outer.value, outer.error_estimate, inner_evals,
                      outer.converged)


def fubini_check(f: Callable[[float, float], float], domain: ProductDomain,
                 config: QuadConfig = DEFAULT_CONFIG) -> FubiniReport:
    """Run both iteration orders and report their discrepancy."""
    values: list[float] = []
    converged = True
    for order in (IterationOrder.INNER_FIRST, IterationOrder.OUTER_FIRST):
        try:
            values.append(integrate_iterated(f, domain, order, config).value)
        except NonConvergence as exc:
            converged = False
            values.append(exc.result.value if exc.result is not None else math.nan)
    return FubiniReport(values[0], values[1], abs(values[0] - values[1]), converged)
