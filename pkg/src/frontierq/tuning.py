"""Rules of thumb: h-grid presets and construction, subsample size, defaults.

Everything here maps sample size and the empirical dominance probability
p_hat to concrete tuning constants so both inference engines can run with no
manual input.  Grids are specified on the scale of *effective* integer
order-statistic indices h; the quantile constants k are recovered per sample
through ``k_of_h``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import NonPositiveB, RangeTooNarrow
from .evt import k_of_h
from .limits import HGrid
from .subsampling import SubsamplingConfig

__all__ = [
    "TuningConfig",
    "preset_grid",
    "auto_grid",
    "subsample_size",
    "default_L",
    "sub_config",
    "abc_grid",
]

_PRESETS = {
    "S1": (15, 21, 27, 33, 39),
    "S2": (10, 15, 20, 25, 30),
}

# the b-formula is calibrated on moderate effective sizes; warn outside
_B_RANGE = (300.0, 1e5)


@dataclass(frozen=True)
class TuningConfig:
    """Resolved tuning constants for one (sample, query point) pair."""

    h_grid: tuple[int, ...]
    b: int
    S: int = 5000
    chain_total: int = 20000
    burn_in: int = 10000
    preset: str = "custom"

    def __post_init__(self):
        seq = self.h_grid
        if len(seq) < 3:
            raise ValueError("h_grid needs at least (h(k0), h(m k0), one target)")
        if any(a >= b for a, b in zip(seq, seq[1:])):
            raise ValueError("h_grid must be strictly increasing")
        if seq[1] < seq[0] + 2:
            raise ValueError("h(m k0) must exceed h(k0) + 1 (normalizer spacing)")
        if self.b < 2:
            raise ValueError("b must be at least 2")


def preset_grid(preset: str) -> tuple[int, ...]:
    """Named effective-index grids (h(k0), h(m k0), h(k1), h(k2), h(k3))."""
    try:
        return _PRESETS[preset]
    except KeyError:
        raise ValueError(f"unknown preset {preset!r}; choose from {sorted(_PRESETS)}") from None


def default_L(n_eff: int) -> int:
    """Number of combined quantile levels: 2 for small effective samples, else 3."""
    return 2 if n_eff < 2000 else 3


def subsample_size(n: int, p_hat: float) -> int:
    """Piecewise subsample-size rule in the effective size np = n * p_hat:

        b = floor([0.4 np - (np-300)+/7 - 2.3 (np-1000)+/28
                   - (7/40)(1 - log 5000 / log np)(np-5000)+] / p_hat)

    Raises NonPositiveB when the bracket is nonpositive (sample too small);
    warns when np falls outside the calibrated range [300, 1e5].
    """
    np_eff = n * p_hat
    if np_eff < 1.0:
        raise NonPositiveB("effective sample size n * p_hat is below 1")
    if not (_B_RANGE[0] <= np_eff <= _B_RANGE[1]):
        warnings.warn(
            f"n*p_hat = {np_eff:.1f} outside the calibrated range {_B_RANGE}; "
            "the subsample-size rule is extrapolating",
            stacklevel=2,
        )
    bracket = 0.4 * np_eff
    bracket -= max(np_eff - 300.0, 0.0) / 7.0
    bracket -= 2.3 * max(np_eff - 1000.0, 0.0) / 28.0
    if np_eff > 5000.0:
        bracket -= (7.0 / 40.0) * (1.0 - math.log(5000.0) / math.log(np_eff)) * (np_eff - 5000.0)
    if bracket <= 0.0:
        raise NonPositiveB(f"subsample-size bracket {bracket:.3f} <= 0; sample too small")
    return int(math.floor(bracket / p_hat))


def auto_grid(
    n_eff: int, b: int, p_hat: float, L: int, h1: int = 10, h2: float | None = None
) -> tuple[int, ...]:
    """L + 2 equally spaced integers in [h1, max(40, 0.1 * b * p_hat)].

    h1 is the outlier-tolerance floor (raise it to look past suspect top
    observations); pass h2 to override the default upper bound.  Points are
    rounded to nearest integers; duplicates are repaired by incrementing
    upward.  Raises RangeTooNarrow when the range cannot hold L + 2 distinct
    integers.
    """
    if L not in (2, 3):
        raise ValueError("L must be 2 or 3")
    if h1 < 1:
        raise ValueError("h1 must be a positive integer")
    if h2 is None:
        h2 = max(40.0, 0.1 * b * p_hat)
    count = L + 2
    if math.floor(h2) - h1 + 1 < count:
        raise RangeTooNarrow(f"[{h1}, {h2:.1f}] cannot hold {count} distinct integers")
    pts = [round(h1 + i * (h2 - h1) / (count - 1)) for i in range(count)]
    pts[-1] = min(pts[-1], math.floor(h2))
    # repair rounding collisions while keeping the grid inside [h1, floor(h2)]
    for i in range(count - 2, -1, -1):
        pts[i] = min(pts[i], pts[i + 1] - 1)
    for i in range(1, count):
        if pts[i] <= pts[i - 1]:
            pts[i] = pts[i - 1] + 1
    if pts[0] < h1 or pts[-1] > math.floor(h2):
        raise RangeTooNarrow("could not fit distinct integers inside the range")
    return tuple(int(v) for v in pts)


def sub_config(
    grid: tuple[int, ...],
    p_hat: float,
    b: int,
    S: int = 5000,
    alpha: float = 0.05,
    seed: int = 0,
) -> SubsamplingConfig:
    """Subsampling configuration from an h-grid.

    The subsampling engine consumes only the first four grid entries:
    (h(k0), h(m k0), h(k1), h(k2)).
    """
    if len(grid) < 4:
        raise ValueError("grid needs at least 4 entries for the subsampling engine")
    k0 = k_of_h(grid[0], p_hat)
    km0 = k_of_h(grid[1], p_hat)
    k1 = k_of_h(grid[2], p_hat)
    k2 = k_of_h(grid[3], p_hat)
    return SubsamplingConfig(
        k1=k1, k2=k2, k0=k0, m=km0 / k0, b=b, S=S, alpha=alpha, seed=seed
    )


def abc_grid(grid: tuple[int, ...], L: int) -> HGrid:
    """HGrid for the posterior engine: normalizer indices plus L targets."""
    if len(grid) < 2 + L:
        raise ValueError(f"grid has {len(grid)} entries, need {2 + L}")
    return HGrid(h0=grid[0], hm0=grid[1], h_targets=tuple(grid[2 : 2 + L]))
