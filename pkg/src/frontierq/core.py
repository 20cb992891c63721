"""Sample data model and the check-function extreme-quantile engine.

Observations are input/output pairs (x, y) with x a nonnegative input vector
and y a scalar output (multivariate outputs are reduced to a scalar score at
ingestion).  The quantile engine minimizes the Koenker-Bassett check objective
over the "effective sample" of outputs whose inputs are dominated by a query
point; for finite samples the minimizer is an order statistic, and we fix a
deterministic tie-breaking convention (see `check_quantile`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import EmptyEffectiveSample, InvalidTau

__all__ = [
    "Observation",
    "Sample",
    "EffectiveSample",
    "IntervalEstimate",
    "reduce_outputs",
    "effective_sample",
    "check_quantile",
    "order_statistic_index",
    "empirical_quantile",
]


@dataclass(frozen=True)
class Observation:
    """A single production plan: input vector x and scalar output y."""

    x: tuple[float, ...]
    y: float

    def __post_init__(self):
        if len(self.x) < 1:
            raise ValueError("input vector must have at least one coordinate")
        if not all(math.isfinite(v) for v in self.x) or not math.isfinite(self.y):
            raise ValueError("observation coordinates must be finite")


@dataclass(frozen=True)
class Sample:
    """An i.i.d. sample of (input vector, scalar output) pairs.

    x has shape (n, p), y has shape (n,).  Multivariate outputs must be
    reduced with `reduce_outputs` before constructing a Sample.
    """

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape[0] != y.shape[0] and x.shape[1] == y.shape[0]:
            x = x.T
        if x.shape[0] != y.shape[0]:
            raise ValueError("x and y must have the same number of observations")
        if y.shape[0] < 1:
            raise ValueError("sample must contain at least one observation")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


def reduce_outputs(y: np.ndarray) -> np.ndarray:
    """Reduce q-dimensional outputs to the scalar productivity score max_j y_j.

    Accepts shape (n,) (identity) or (n, q).  Applied once at ingestion.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        return y
    if y.ndim != 2 or y.shape[1] < 1:
        raise ValueError("outputs must have shape (n,) or (n, q) with q >= 1")
    return y.max(axis=1)


@dataclass(frozen=True)
class EffectiveSample:
    """Outputs of observations dominated by the query input level x0.

    `y_values` is stored sorted ascending; `p_hat` = n_eff / n estimates the
    dominance probability P(X <= x0).
    """

    y_values: np.ndarray
    n_eff: int
    p_hat: float
    query_x: np.ndarray
    n_total: int = field(default=0)

    def __post_init__(self):
        y = np.sort(np.asarray(self.y_values, dtype=float).ravel())
        if y.size == 0:
            raise EmptyEffectiveSample("effective sample is empty")
        object.__setattr__(self, "y_values", y)
        object.__setattr__(self, "n_eff", int(y.size))
        if not (0.0 < self.p_hat <= 1.0):
            raise ValueError("p_hat must lie in (0, 1]")

    @property
    def y_max(self) -> float:
        return float(self.y_values[-1])


def effective_sample(sample: Sample, x0) -> EffectiveSample:
    """Extract outputs with X_i <= x0 componentwise.

    Raises EmptyEffectiveSample when no observation is dominated by x0.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    if x0.shape[0] != sample.p:
        raise ValueError(f"x0 has length {x0.shape[0]}, expected {sample.p}")
    mask = np.all(sample.x <= x0, axis=1)
    n_eff = int(mask.sum())
    if n_eff == 0:
        raise EmptyEffectiveSample(f"no observation dominated by x0={x0.tolist()}")
    return EffectiveSample(
        y_values=sample.y[mask],
        n_eff=n_eff,
        p_hat=n_eff / sample.n,
        query_x=x0,
        n_total=sample.n,
    )


# Relative snapping tolerance for deciding whether tau * n_eff is an integer.
_INT_SNAP = 1e-9


def order_statistic_index(tau: float, n: int) -> int:
    """1-based order-statistic index for the tau-th check quantile of n points.

    Returns ceil(tau * n); when tau * n is an integer the minimizer of the
    check objective is an interval and we take its lower endpoint, the
    (tau * n)-th order statistic.  Floating-point products within a relative
    1e-9 of an integer are snapped to that integer first.
    """
    if not (0.0 < tau < 1.0):
        raise InvalidTau(f"tau={tau} outside (0, 1)")
    t = tau * n
    r = round(t)
    if abs(t - r) <= _INT_SNAP * max(1.0, t) and r >= 1:
        return int(r)
    return int(math.ceil(t))


def empirical_quantile(sorted_values: np.ndarray, tau: float) -> float:
    """Order-statistic quantile of an ascending-sorted array (same convention
    as `check_quantile`)."""
    j = order_statistic_index(tau, sorted_values.shape[0])
    return float(sorted_values[j - 1])


def check_quantile(es: EffectiveSample, tau: float) -> float:
    """Minimizer of the check objective sum_i rho_tau(Y_i - q) over the
    effective sample.

    Convention: the ceil(tau * n_eff)-th order statistic; when tau * n_eff is
    an integer the argmin is the interval between two order statistics and we
    return the lower endpoint.
    """
    return empirical_quantile(es.y_values, tau)


@dataclass
class IntervalEstimate:
    """Point estimate with a confidence interval.

    lower <= upper always; lower <= point <= upper is not guaranteed for
    median-unbiased constructions.
    """

    point: float
    lower: float
    upper: float
    level: float
    method: str
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("interval endpoints out of order")

    @property
    def length(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper
