"""Compensated floating-point accumulation.

Node sums and series partial sums run through :class:`CompensatedSum`
(Neumaier's variant of Kahan summation) so that millions of small
contributions do not lose low-order bits to a large running total.
"""

from __future__ import annotations


class CompensatedSum:
    """Running sum with a first-order error compensation term.

    The compensation handles both the usual case (|sum| >= |term|) and
    the reverse, so terms may arrive in any order and any magnitude.
    """

    __slots__ = ("_total", "_compensation")

    def __init__(self, value: float = 0.0) -> None:
        self._total = float(value)
        self._compensation = 0.0

    def add(self, term: float) -> None:
        t = self._total + term
        if abs(self._total) >= abs(term):
            self._compensation += (self._total - t) + term
        else:
            self._compensation += (term - t) + self._total
        self._total = t

    @property
    def value(self) -> float:
        return self._total + self._compensation

    def __repr__(self) -> str:
        return f"CompensatedSum({self.value!r})"


def compensated_total(terms) -> float:
    """Sum an iterable of floats with compensation."""
    acc = CompensatedSum()
    for term in terms:
        acc.add(term)
    return acc.value
