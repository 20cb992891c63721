"""Tests for the limit-law simulator and the joint limit density.

The two implementations are independent oracles for each other: the simulator
draws the normalized limit vector from exponential sums, while the density
integrates a closed form over gamma variates.  The acceptance suite compares
them distributionally; here we pin conventions, determinism, and small exact
cases.
"""

import numpy as np
import pytest

from frontierq.limits import (
    DensityPool,
    HGrid,
    _ztilde_from_gammas,
    density_pool,
    joint_density,
    simulate_limit,
)

GRID1 = HGrid(h0=1, hm0=2, h_targets=(3,))
GRID_S1_L2 = HGrid(h0=15, hm0=21, h_targets=(27, 33))


# ------------------------------------------------------------------ HGrid


def test_hgrid_validation():
    g = HGrid(h0=15, hm0=21, h_targets=(27, 33, 39))
    assert g.L == 3 and g.h_max == 39
    assert g.increments == (6, 6, 6)
    with pytest.raises(ValueError):
        HGrid(h0=2, hm0=2, h_targets=(3,))
    with pytest.raises(ValueError):
        HGrid(h0=1, hm0=3, h_targets=(3,))
    with pytest.raises(ValueError):
        HGrid(h0=0, hm0=2, h_targets=(3,))
    with pytest.raises(ValueError):
        HGrid(h0=1, hm0=2, h_targets=())


# -------------------------------------------------------------- simulator


def test_ztilde_forced_example():
    # Gamma = (1, 2, 3), xi = -1: powers are (1, 2, 3), spacing 2 - 1 = 1,
    # so the normalized draw at the target is -3 exactly
    z = _ztilde_from_gammas(np.array([[1.0, 2.0, 3.0]]), -1.0, GRID1)
    assert z.shape == (1, 1)
    assert z[0, 0] == -3.0


def test_simulate_limit_shape_and_signs():
    z = simulate_limit(GRID_S1_L2, -0.5, 500, seed=1)
    assert z.shape == (500, 2)
    assert np.all(z < 0.0)
    # magnitudes increase across targets (draws decrease)
    assert np.all(np.diff(z, axis=1) < 0.0)


def test_simulate_limit_p_free():
    a = simulate_limit(GRID1, -0.5, 200, seed=3, p=1.0)
    b = simulate_limit(GRID1, -0.5, 200, seed=3, p=0.37)
    assert np.array_equal(a, b)


def test_simulate_limit_deterministic_and_chunk_stable():
    a = simulate_limit(GRID_S1_L2, -0.5, 300, seed=9)
    b = simulate_limit(GRID_S1_L2, -0.5, 300, seed=9)
    assert np.array_equal(a, b)
    # a longer run starts with the same draws (chunked substreams)
    c = simulate_limit(GRID_S1_L2, -0.5, 800, seed=9)
    assert np.array_equal(c[:300], a)


def test_simulate_limit_validation():
    with pytest.raises(ValueError):
        simulate_limit(GRID1, 0.0, 10, seed=0)
    with pytest.raises(ValueError):
        simulate_limit(GRID1, -0.5, 0, seed=0)
    with pytest.raises(ValueError):
        simulate_limit(GRID1, -0.5, 10, seed=0, p=0.0)


# ---------------------------------------------------------------- density


def test_density_pool_determinism():
    p1 = density_pool(GRID_S1_L2, -0.5, 500, seed=4)
    p2 = density_pool(GRID_S1_L2, -0.5, 500, seed=4)
    u = np.array([0.7, 1.9])
    assert p1.density(u).value == p2.density(u).value
    assert p1.log_density(u) == p2.log_density(u)


def test_density_single_draw_matches_integrand():
    pool = density_pool(GRID1, -0.5, 1, seed=5)
    u = np.array([1.3])
    v = pool.density(u)
    assert v.draws == 1 and v.mc_se == 0.0
    assert v.value == pytest.approx(np.exp(pool.log_integrand(u))[0])


def test_density_batch_matches_scalar():
    pool = density_pool(GRID_S1_L2, -0.5, 400, seed=6)
    U = np.array([[6.5, 8.5], [7.0, 9.0], [8.0, 11.0]])
    batch = pool.density_batch(U)
    for row, val in zip(U, batch):
        assert val == pytest.approx(pool.density(row).value, rel=1e-12)


def test_density_mc_se_shrinks_with_draws():
    # (7, 9) sits in the bulk of the limit law for the S1-style grid
    u = np.array([7.0, 9.0])
    small = joint_density(u, -0.5, GRID_S1_L2, mc_draws=500, seed=7)
    large = joint_density(u, -0.5, GRID_S1_L2, mc_draws=32000, seed=7)
    assert large.mc_se < small.mc_se / 4.0  # ~ 1/sqrt(64) in expectation
    # values agree within a few joint standard errors
    tol = 6.0 * (small.mc_se + large.mc_se)
    assert abs(small.value - large.value) <= tol


def test_density_support_errors():
    pool = density_pool(GRID_S1_L2, -0.5, 100, seed=8)
    with pytest.raises(ValueError):
        pool.density(np.array([1.0, 0.5]))  # not increasing
    with pytest.raises(ValueError):
        pool.density(np.array([-0.1, 0.5]))  # not positive
    with pytest.raises(ValueError):
        pool.density(np.array([0.5]))  # wrong length


def test_log_density_out_of_support_is_neg_inf():
    # for grid (1, 2, 3) the integrand needs u^(1/|xi|) * u_tilde > v0 for
    # some pool draw; a tiny u is outside every draw's support
    pool = density_pool(GRID1, -0.5, 50, seed=10)
    assert pool.log_density(np.array([1e-12])) == -np.inf


def test_joint_density_pool_mismatch():
    pool = density_pool(GRID1, -0.5, 50, seed=11)
    with pytest.raises(ValueError):
        joint_density(np.array([0.5, 1.0]), -0.5, GRID_S1_L2, pool=pool)
    with pytest.raises(ValueError):
        joint_density(np.array([0.5]), -1.0, GRID1, pool=pool)


def test_density_pool_validation():
    with pytest.raises(ValueError):
        DensityPool(GRID1, 0.5, np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        DensityPool(GRID1, -0.5, np.ones(3), np.ones(4))
    with pytest.raises(ValueError):
        density_pool(GRID1, -0.5, 0, seed=0)
