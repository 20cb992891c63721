"""Bias-cancelling subsampling inference for the frontier value.

The point estimator combines two extreme quantiles with weights that cancel
their first-order bias terms; critical values come from recomputing the
studentized, scale-free statistic

    Z~*_{b,s} = alpha_hat_b * [w1 (q_hat_b(tau_b1) - q_hat_n(tau_b1))
                               + w2 (q_hat_b(tau_b2) - q_hat_n(tau_b2))]

on S size-b subsamples drawn with replacement from the FULL sample and then
filtered by X <= x0 (the dominance indicator lives inside the objective, so
the effective subsample size is random, about b * p_hat).

Z~* is exactly affine-invariant: it is built from quantile differences
(shift cancels) scaled by the reciprocal spacing alpha_hat_b (scale cancels),
so critical values are dimensionless and the final point/CI construction is
a plain anchor-plus-offset in data units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    IntervalEstimate,
    Sample,
    check_quantile,
    effective_sample,
    empirical_quantile,
)
from .errors import InvalidTau, SubsampleRetriesExceeded
from .evt import bias_weights, normalizer

__all__ = ["SubsamplingConfig", "subsample_indices", "run_subsampling"]

_MAX_REDRAWS = 100
_INT_SNAP = 1e-9  # same integer-snapping rule as core.order_statistic_index


@dataclass(frozen=True)
class SubsamplingConfig:
    """Quantile constants, subsample size, and resampling counts.

    k1 < k2 are the tail constants of the combined quantiles; (k0, m) build
    the normalizer.  b is the subsample size, S the number of subsamples,
    alpha the CI miscoverage level.
    """

    k1: float
    k2: float
    k0: float
    m: float
    b: int
    S: int = 5000
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.k1 < self.k2):
            raise ValueError("need 0 < k1 < k2")
        if self.k0 <= 0.0 or self.m <= 1.0:
            raise ValueError("need k0 > 0 and m > 1")
        if self.b < 2:
            raise ValueError("subsample size b must be at least 2")
        if self.S < 1:
            raise ValueError("need at least one subsample")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if max(self.k2, self.m * self.k0) >= self.b:
            raise InvalidTau("quantile constants must be smaller than b")


def subsample_indices(n: int, b: int, s: int, seed: int, attempt: int = 0) -> np.ndarray:
    """Indices of the s-th size-b subsample, uniform with replacement on 0..n-1.

    Deterministic function of (seed, s, attempt); attempt > 0 is used only
    when a degenerate subsample must be redrawn.
    """
    if b < 1:
        raise ValueError("b must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11, s, attempt]))
    return rng.integers(0, n, size=b)


def _order_indices(tau: float, n_eff: np.ndarray) -> np.ndarray:
    """Vectorized ceil(tau * n_eff) with the integer-snapping convention."""
    t = tau * n_eff
    r = np.rint(t)
    snap = (np.abs(t - r) <= _INT_SNAP * np.maximum(1.0, t)) & (r >= 1)
    return np.where(snap, r, np.ceil(t)).astype(np.int64)


def _subsample_stats(
    rows: np.ndarray, taus: tuple[float, float, float, float]
) -> tuple[np.ndarray, np.ndarray]:
    """Per-row quantiles (q1b, q2b) and the normalizer spacing.

    rows: (S, b) array of outputs with non-dominated entries set to -inf and
    each row sorted ascending.  taus = (tau_b1, tau_b2, tau at k0, tau at
    m*k0).  Returns (quantile pair array (S, 2), spacing array (S,)); rows
    with an empty effective set get spacing 0 (degenerate marker).
    """
    S, b = rows.shape
    n_eff = (rows > -np.inf).sum(axis=1)
    ok = n_eff > 0
    ne = np.maximum(n_eff, 1)  # avoid 0 in index arithmetic; masked below
    cols = []
    for tau in taus:
        j = _order_indices(tau, ne)
        pos = b - ne + j - 1
        cols.append(rows[np.arange(S), pos])
    q1b, q2b, q_hi, q_lo = cols
    spacing = np.where(ok, q_hi - q_lo, 0.0)
    return np.column_stack([q1b, q2b]), spacing


def run_subsampling(
    sample: Sample, x0, cfg: SubsamplingConfig, xi_hat: float
) -> IntervalEstimate:
    """Median-unbiased frontier estimate with subsampling confidence interval.

    Steps: (1) bias-cancelling weights from xi_hat; (2) full-sample extreme
    quantiles at both the full-sample and subsample tail levels, plus the
    normalizer alpha_hat_n; (3) S subsamples of size b with replacement,
    each filtered by X <= x0, yielding the scale-free statistics Z~*_{b,s}
    (degenerate subsamples are redrawn, up to 100 times each); (4) empirical
    quantiles C_hat of {Z~*} using the same order-statistic convention as
    check_quantile; (5) point = combo - C_hat(0.5)/alpha_hat_n and
    CI = (combo - C_hat(1-alpha/2)/alpha_hat_n, combo - C_hat(alpha/2)/alpha_hat_n).
    """
    n = sample.n
    if cfg.b >= n:
        raise ValueError("subsample size b must be smaller than n")
    es = effective_sample(sample, x0)
    w = bias_weights(cfg.k1, cfg.k2, xi_hat)

    tau_n1 = 1.0 - cfg.k1 / n
    tau_n2 = 1.0 - cfg.k2 / n
    tau_b1 = 1.0 - cfg.k1 / cfg.b
    tau_b2 = 1.0 - cfg.k2 / cfg.b
    tau_b0 = 1.0 - cfg.k0 / cfg.b
    tau_bm = 1.0 - cfg.m * cfg.k0 / cfg.b
    taus = (tau_b1, tau_b2, tau_b0, tau_bm)

    qn1 = check_quantile(es, tau_n1)
    qn2 = check_quantile(es, tau_n2)
    qn_b1 = check_quantile(es, tau_b1)
    qn_b2 = check_quantile(es, tau_b2)
    alpha_n = normalizer(es, n, cfg.k0, cfg.m).alpha_hat

    # outputs with non-dominated observations marked -inf, for masked sorting
    x0v = np.asarray(x0, dtype=float).ravel()
    dominated = np.all(sample.x <= x0v, axis=1)
    y_masked = np.where(dominated, sample.y, -np.inf)

    idx = np.empty((cfg.S, cfg.b), dtype=np.int64)
    for s in range(cfg.S):
        idx[s] = subsample_indices(n, cfg.b, s, cfg.seed)
    rows = np.sort(y_masked[idx], axis=1)
    qb, spacing = _subsample_stats(rows, taus)

    redraws = 0
    bad = np.flatnonzero(spacing <= 0.0)
    for s in bad:
        for attempt in range(1, _MAX_REDRAWS + 1):
            row = np.sort(y_masked[subsample_indices(n, cfg.b, int(s), cfg.seed, attempt)])
            q_pair, sp = _subsample_stats(row[None, :], taus)
            redraws += 1
            if sp[0] > 0.0:
                qb[s], spacing[s] = q_pair[0], sp[0]
                break
        else:
            raise SubsampleRetriesExceeded(
                f"subsample {s} stayed degenerate after {_MAX_REDRAWS} redraws"
            )

    d1 = qb[:, 0] - qn_b1
    d2 = qb[:, 1] - qn_b2
    z_star = (w.w1 * d1 + w.w2 * d2) / spacing

    z_sorted = np.sort(z_star)
    c_med = empirical_quantile(z_sorted, 0.5)
    c_lo = empirical_quantile(z_sorted, cfg.alpha / 2.0)
    c_hi = empirical_quantile(z_sorted, 1.0 - cfg.alpha / 2.0)

    combo = qn1 + w.w2 * (qn2 - qn1)  # = w1*qn1 + w2*qn2 with w1 + w2 = 1
    point = combo - c_med / alpha_n
    lower = combo - c_hi / alpha_n
    upper = combo - c_lo / alpha_n
    return IntervalEstimate(
        point=point,
        lower=lower,
        upper=upper,
        level=1.0 - cfg.alpha,
        method="sub",
        diagnostics={
            "alpha_hat": alpha_n,
            "w1": w.w1,
            "w2": w.w2,
            "c_med": c_med,
            "c_lo": c_lo,
            "c_hi": c_hi,
            "n_eff": es.n_eff,
            "p_hat": es.p_hat,
            "xi_hat": xi_hat,
            "redraws": redraws,
            "z_star": z_star,
        },
    )
