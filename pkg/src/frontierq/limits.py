"""Fixed-k limit laws: simulation from exponential sums and the joint density.

Two routes to the same distribution, each serving as the other's oracle:

* ``simulate_limit`` draws the normalized limit vector directly from i.i.d.
  standard exponentials: Z(h) = -(Gamma_h / p)^(-xi) with Gamma_h a cumulative
  exponential sum, normalized by the spacing Z(h0) - Z(h(m k0)).  The
  dominance probability p cancels in the ratio, so draws are computed from
  the p-free powers (bit-identical for any p > 0).

* ``joint_density`` evaluates the closed-form joint density of the unsigned
  ratios by Monte Carlo integration over a pair of gamma variates (s, t),
  conditioning on the two order statistics that build the normalizer.  The
  density lives on positive, strictly increasing magnitudes (u_1, ..., u_L);
  callers pass u_l = alpha_hat * (q_bar - q_hat_l) >= 0.

``density_pool`` materializes the (s, t) draws once so repeated evaluations
(e.g. along an MCMC chain) see a fixed, smooth approximate density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = [
    "HGrid",
    "DensityValue",
    "DensityPool",
    "simulate_limit",
    "joint_density",
    "density_pool",
]

_CHUNK = 65536  # fixed simulation chunk so draw streams are worker-invariant


@dataclass(frozen=True)
class HGrid:
    """Effective order-statistic indices (h(k0), h(m k0), h(k1), ..., h(kL)).

    Must be strictly increasing: h0 < hm0 < targets[0] < ... < targets[-1].
    """

    h0: int
    hm0: int
    h_targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "h_targets", tuple(int(h) for h in self.h_targets))
        seq = (self.h0, self.hm0, *self.h_targets)
        if len(self.h_targets) < 1:
            raise ValueError("at least one target index is required")
        if any(h < 1 for h in seq):
            raise ValueError("all indices must be positive integers")
        if any(a >= b for a, b in zip(seq, seq[1:])):
            raise ValueError(f"indices must be strictly increasing, got {seq}")

    @property
    def L(self) -> int:
        return len(self.h_targets)

    @property
    def h_max(self) -> int:
        return self.h_targets[-1]

    @property
    def increments(self) -> tuple[int, ...]:
        """Gamma shape parameters h_l - h_{l-1} with h_0 = h(m k0)."""
        prev = (self.hm0, *self.h_targets[:-1])
        return tuple(h - p for h, p in zip(self.h_targets, prev))


@dataclass(frozen=True)
class DensityValue:
    """Monte Carlo density estimate with its standard error."""

    value: float
    mc_se: float
    draws: int

    def __post_init__(self):
        if self.value < 0.0 or self.mc_se < 0.0:
            raise ValueError("density value and mc_se must be nonnegative")


def _ztilde_from_gammas(gammas: np.ndarray, xi: float, grid: HGrid) -> np.ndarray:
    """Normalized limit draws from cumulative exponential sums.

    gammas has shape (count, h_max) with gammas[:, h-1] = Gamma_h.  The
    dominance probability cancels in the ratio and is omitted.
    """
    pw = gammas[:, [grid.h0 - 1, grid.hm0 - 1] + [h - 1 for h in grid.h_targets]] ** (-xi)
    denom = pw[:, 1] - pw[:, 0]
    return -pw[:, 2:] / denom[:, None]


def simulate_limit(
    grid: HGrid, xi: float, count: int, seed: int, p: float = 1.0
) -> np.ndarray:
    """Simulate `count` draws of (Z~(k1), ..., Z~(kL)); returns shape (count, L).

    Draws are generated in fixed-size chunks with per-chunk substreams derived
    from (seed, chunk index), so results do not depend on how chunks are
    scheduled.  Entries are negative and strictly decreasing across targets.
    """
    if xi >= 0.0:
        raise ValueError("xi must be negative for frontier limits")
    if count < 1:
        raise ValueError("count must be at least 1")
    if p <= 0.0:
        raise ValueError("p must be positive")
    out = np.empty((count, grid.L))
    for ci, start in enumerate(range(0, count, _CHUNK)):
        stop = min(start + _CHUNK, count)
        rng = np.random.default_rng(np.random.SeedSequence([seed, 7001, ci]))
        e = rng.exponential(size=(stop - start, grid.h_max))
        out[start:stop] = _ztilde_from_gammas(np.cumsum(e, axis=1), xi, grid)
    return out


class DensityPool:
    """Fixed (s, t) gamma draws plus precomputed xi-dependent terms.

    Evaluating the density against one pool is deterministic and cheap:
    everything that does not depend on the evaluation point u is cached.
    """

    def __init__(self, grid: HGrid, xi: float, s: np.ndarray, t: np.ndarray):
        if xi >= 0.0:
            raise ValueError("xi must be negative")
        s = np.asarray(s, dtype=float).ravel()
        t = np.asarray(t, dtype=float).ravel()
        if s.shape != t.shape or s.size < 1:
            raise ValueError("s and t must be equal-length nonempty arrays")
        self.grid = grid
        self.xi = float(xi)
        self.s = s
        self.t = t
        self.size = s.size

        L = grid.L
        inv = -1.0 / xi  # positive
        self._inv = inv
        self._shapes = np.array(grid.increments, dtype=float)
        self.v0 = t + s
        util = self.v0 ** (-xi) - s ** (-xi)
        self.u_tilde = util
        self._w = util**inv
        # per-draw constant: L*log(-1/xi) + (-L/xi)*log(util)
        # - sum_l lgamma(shape_l) + sum_{l>=2} (shape_l - 1)*log(w)
        logw = np.log(self._w)
        c = L * math.log(inv) + (L * inv) * np.log(util) - gammaln(self._shapes).sum()
        if L > 1:
            c = c + (self._shapes[1:] - 1.0).sum() * logw
        self._const = c
        self._logw = logw

    def _check_u(self, u: np.ndarray):
        if u.shape[-1] != self.grid.L:
            raise ValueError(f"u must have length L={self.grid.L}")
        if np.any(u <= 0.0):
            raise ValueError("all magnitudes u_l must be strictly positive")
        if self.grid.L > 1 and np.any(np.diff(u, axis=-1) <= 0.0):
            raise ValueError("magnitudes u must be strictly increasing")

    def log_integrand(self, u) -> np.ndarray:
        """Per-draw log of the density integrand at one point u (length L).

        Entries outside the gamma-increment support are -inf.
        """
        u = np.asarray(u, dtype=float).ravel()
        self._check_u(u)
        a = u**self._inv
        d1 = a[0] * self._w - self.v0
        ok = d1 > 0.0
        li = np.full(self.size, -np.inf)
        if not np.any(ok):
            return li
        val = self._const[ok] + (self._inv - 1.0) * np.log(u).sum()
        sh1 = self._shapes[0]
        if sh1 != 1.0:
            val = val + (sh1 - 1.0) * np.log(d1[ok])
        val = val - d1[ok]
        if self.grid.L > 1:
            da = np.diff(a)
            val = val + ((self._shapes[1:] - 1.0) * np.log(da)).sum()
            val = val - da.sum() * self._w[ok]
        li[ok] = val
        return li

    def density(self, u) -> DensityValue:
        """Monte Carlo density value and standard error at one point u."""
        f = np.exp(self.log_integrand(u))
        n = self.size
        se = 0.0 if n == 1 else float(f.std(ddof=1) / math.sqrt(n))
        return DensityValue(value=float(f.mean()), mc_se=se, draws=n)

    def log_density(self, u) -> float:
        """log of the Monte Carlo density (stable; -inf when out of support)."""
        li = self.log_integrand(u)
        m = np.max(li)
        if not np.isfinite(m):
            return -np.inf
        return float(logsumexp(li) - math.log(self.size))

    def density_batch(self, U: np.ndarray, chunk: int = 256) -> np.ndarray:
        """Density values for a batch of points U with shape (M, L)."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        self._check_u(U)
        out = np.empty(U.shape[0])
        inv = self._inv
        sh = self._shapes
        for start in range(0, U.shape[0], chunk):
            u = U[start : start + chunk]
            a = u**inv  # (m, L)
            d1 = a[:, [0]] * self._w[None, :] - self.v0[None, :]  # (m, N)
            ok = d1 > 0.0
            if sh[0] != 1.0:
                with np.errstate(divide="ignore", invalid="ignore"):
                    li = np.where(ok, (sh[0] - 1.0) * np.log(d1) - d1, -np.inf)
            else:
                li = np.where(ok, -d1, -np.inf)
            li = li + self._const[None, :]
            li = li + (inv - 1.0) * np.log(u).sum(axis=1, keepdims=True)
            if self.grid.L > 1:
                da = np.diff(a, axis=1)  # (m, L-1)
                li = li + ((sh[1:] - 1.0) * np.log(da)).sum(axis=1, keepdims=True)
                li = li - da.sum(axis=1, keepdims=True) * self._w[None, :]
            out[start : start + chunk] = np.exp(li).mean(axis=1)
        return out


def density_pool(grid: HGrid, xi: float, mc_draws: int, seed: int) -> DensityPool:
    """Materialize mc_draws (s, t) pairs: s ~ Gamma(h0, 1), t ~ Gamma(hm0 - h0, 1).

    Integer shapes are sampled as sums of exponentials for exact
    reproducibility across platforms.
    """
    if mc_draws < 1:
        raise ValueError("mc_draws must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7002]))
    s = rng.exponential(size=(mc_draws, grid.h0)).sum(axis=1)
    t = rng.exponential(size=(mc_draws, grid.hm0 - grid.h0)).sum(axis=1)
    return DensityPool(grid, xi, s, t)


def joint_density(
    u,
    xi: float,
    grid: HGrid,
    mc_draws: int = 2000,
    seed: int = 0,
    pool: DensityPool | None = None,
) -> DensityValue:
    """Joint density of the unsigned limit ratios at magnitudes u (length L).

    Averages the closed-form conditional integrand over mc_draws gamma pairs;
    pass ``pool`` to reuse draws across evaluations (common random numbers).
    """
    if pool is None:
        pool = density_pool(grid, xi, mc_draws, seed)
    else:
        if pool.grid != grid or pool.xi != float(xi):
            raise ValueError("pool was built for a different (grid, xi)")
    return pool.density(u)
