"""Lattice-core tests against independent oracles.

Oracles used here:
  * exact binomial enumeration for 1-d walk powers,
  * repeated neighbour-shift application (no FFT) for small k,
  * grid refinement for periodization effects.
"""

import math

import numpy as np
import pytest

from latspec.lattice import (
    GridSpec,
    TruncationError,
    apply_walk,
    bochner_riesz_multiplier,
    bump,
    convolve,
    default_grid,
    functional_calculus,
    gaussian_multiplier,
    kernel_from_symbol,
    walk_power_kernel,
    walk_symbol,
    wave_kernel,
)


def binomial_walk_value(k: int, d: int) -> float:
    """Oracle: P(S_k = d) for the simple walk on Z, exact rationals."""
    if (k + d) % 2 or abs(d) > k:
        return 0.0
    return math.comb(k, (k + d) // 2) / 2 ** k


def brute_walk_kernel(grid: GridSpec, k: int) -> np.ndarray:
    """Oracle: k-fold neighbour averaging of a delta, no Fourier transform."""
    delta = np.zeros(grid.shape)
    delta[(0,) * grid.n] = 1.0
    out = delta
    for _ in range(k):
        out = apply_walk(out)
    return out


# --------------------------------------------------------------------------
# grid plumbing


def test_grid_validation():
    with pytest.raises(ValueError):
        GridSpec(4, 16)
    with pytest.raises(ValueError):
        GridSpec(1, 10**9)
    for bad_m in (7, 9, 4, 0):
        with pytest.raises(ValueError):
            GridSpec(1, bad_m)
    assert default_grid(1).M == 4096
    assert default_grid(2).M == 512
    assert default_grid(3).M == 64


def test_coord_axis_centered_order():
    grid = GridSpec(1, 8)
    assert list(grid.coord_axis()) == [0, 1, 2, 3, -4, -3, -2, -1]


# --------------------------------------------------------------------------
# symbol


def test_walk_symbol_extremes_and_range():
    for n in (1, 2, 3):
        grid = GridSpec(n, 16)
        sym = walk_symbol(grid)
        assert sym.values[(0,) * n] == pytest.approx(1.0, abs=1e-15)
        half = grid.M // 2
        assert sym.values[(half,) * n] == pytest.approx(-1.0, abs=1e-15)
        assert np.all(sym.values <= 1.0 + 1e-15)
        assert np.all(sym.values >= -1.0 - 1e-15)


def test_symbol_kernel_roundtrip_parseval():
    rng = np.random.default_rng(7)
    grid = GridSpec(2, 32)
    m = rng.standard_normal(grid.shape)
    ker = kernel_from_symbol(grid, m)
    # Parseval: sum |kappa|^2 == mean |m|^2
    lhs = np.sum(np.abs(ker.values) ** 2)
    rhs = np.mean(np.abs(m) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-10)
    back = ker.symbol().values
    assert np.max(np.abs(back - m)) < 1e-10


# --------------------------------------------------------------------------
# walk application and powers


def test_apply_walk_delta_neighbours():
    grid = GridSpec(2, 16)
    delta = np.zeros(grid.shape)
    delta[0, 0] = 1.0
    stepped = apply_walk(delta)
    assert stepped[1, 0] == pytest.approx(0.25)
    assert stepped[0, 15] == pytest.approx(0.25)
    assert stepped[0, 0] == 0.0
    assert np.sum(stepped) == pytest.approx(1.0)


def test_apply_walk_preserves_constants():
    grid = GridSpec(3, 8)
    ones = np.ones(grid.shape)
    assert np.max(np.abs(apply_walk(ones) - 1.0)) < 1e-15


@pytest.mark.parametrize("k,d,expect", [
    (2, 0, 0.5), (2, 2, 0.25), (2, -2, 0.25), (2, 1, 0.0),
    (16, 0, 12870 / 65536),
])
def test_walk_power_frozen_binomials(k, d, expect):
    grid = GridSpec(1, 64)
    ker = walk_power_kernel(grid, k)
    assert ker.at((d,)) == pytest.approx(expect, abs=1e-14)


@pytest.mark.parametrize("k", [0, 1, 3, 8, 20])
def test_walk_power_matches_binomial_oracle(k):
    grid = GridSpec(1, 128)
    ker = walk_power_kernel(grid, k)
    for d in range(-k - 2, k + 3):
        assert ker.at((d,)).real == pytest.approx(
            binomial_walk_value(k, d), abs=1e-13
        )


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("k", [1, 5, 12, 20])
def test_walk_power_matches_shift_oracle(n, k):
    grid = GridSpec(n, 128)
    ker = walk_power_kernel(grid, k)
    oracle = brute_walk_kernel(grid, k)
    assert np.max(np.abs(ker.values - oracle)) < 1e-12


def test_walk_power_probability_and_parity():
    grid = GridSpec(2, 64)
    ker = walk_power_kernel(grid, 9)
    vals = ker.values
    assert np.all(vals > -1e-14)
    assert np.sum(vals) == pytest.approx(1.0, abs=1e-12)
    # bipartite lattice: k and |d|_1 must share parity
    d1, d2 = grid.coord_grids()
    wrong_parity = (np.abs(d1) + np.abs(d2)) % 2 == 0
    assert np.max(np.abs(vals[wrong_parity])) < 1e-14


def test_walk_power_semigroup_convolution():
    grid = GridSpec(2, 128)
    for ka, kb in [(3, 5), (10, 22), (32, 32)]:
        lhs = convolve(walk_power_kernel(grid, ka), walk_power_kernel(grid, kb))
        rhs = walk_power_kernel(grid, ka + kb)
        assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12


def test_walk_power_truncation_error():
    with pytest.raises(TruncationError):
        walk_power_kernel(GridSpec(1, 16), 4000)


def test_walk_power_grid_refinement_agreement():
    # n=2 has no product-form closed kernel; two resolutions must agree.
    k = 12
    coarse = walk_power_kernel(GridSpec(2, 64), k)
    fine = walk_power_kernel(GridSpec(2, 128), k)
    for d in [(0, 0), (2, 0), (3, 1), (6, 6)]:
        assert coarse.at(d).real == pytest.approx(fine.at(d).real, abs=1e-13)


# --------------------------------------------------------------------------
# functional calculus


def test_functional_calculus_constant_is_delta():
    grid = GridSpec(2, 32)
    ker = functional_calculus(grid, lambda lam: np.ones_like(lam))
    delta = np.zeros(grid.shape)
    delta[0, 0] = 1.0
    assert np.max(np.abs(ker.values - delta)) < 1e-12


def test_functional_calculus_identity_function_is_walk():
    grid = GridSpec(1, 64)
    ker = functional_calculus(grid, lambda lam: lam)
    assert ker.at((1,)).real == pytest.approx(0.5, abs=1e-14)
    assert ker.at((0,)).real == pytest.approx(0.0, abs=1e-14)


def test_functional_calculus_one_minus_walk():
    grid = GridSpec(1, 64)
    ker = functional_calculus(grid, lambda lam: lam, of="one_minus_walk")
    assert ker.at((0,)).real == pytest.approx(1.0, abs=1e-14)
    assert ker.at((1,)).real == pytest.approx(-0.5, abs=1e-14)


def test_functional_calculus_rejects_unbounded():
    grid = GridSpec(1, 32)
    with np.errstate(divide="ignore"):
        with pytest.raises(ValueError):
            functional_calculus(grid, lambda lam: 1.0 / (1.0 - lam))


def test_functional_calculus_homomorphism():
    grid = GridSpec(1, 128)
    f = lambda lam: np.exp(-2.0 * (1 - lam))
    h = lambda lam: lam ** 2
    lhs = functional_calculus(grid, lambda lam: f(lam) * h(lam))
    rhs = convolve(functional_calculus(grid, f), functional_calculus(grid, h))
    assert np.max(np.abs(lhs.values - rhs.values)) < 1e-12


def test_real_even_symbol_gives_real_even_kernel():
    grid = GridSpec(2, 64)
    ker = functional_calculus(grid, lambda lam: np.exp(-3.0 * (1 - lam)))
    assert np.isrealobj(ker.values)
    flipped = ker.values[np.ix_(*( [np.r_[0, grid.M - 1:0:-1]] * grid.n ))]
    assert np.max(np.abs(ker.values - flipped)) < 1e-15
    # coordinate permutation symmetry
    assert np.max(np.abs(ker.values - ker.values.T)) < 1e-15


def test_multiplier_support_clamping():
    f = gaussian_multiplier(0.0, 0.05)
    lam = np.array([-0.6, 0.0, 0.6])
    vals = f(lam)
    assert vals[1] == pytest.approx(1.0)
    assert vals[0] == 0.0 and vals[2] == 0.0  # outside declared support
    g = bump(0.25, 0.75)
    assert g(np.array([0.25, 0.75, 0.5]))[0:2] == pytest.approx([0.0, 0.0])
    assert g(np.array([0.5]))[0] == pytest.approx(1.0)


def test_bochner_riesz_multiplier_alpha0_is_indicator():
    f = bochner_riesz_multiplier(0.5, 0.0)
    lam = np.array([0.0, 0.25, 0.5, 0.75])
    assert list(f.fn(lam)) == [1.0, 1.0, 0.0, 0.0]


# --------------------------------------------------------------------------
# wave kernel


def test_wave_kernel_t0_is_walk():
    grid = GridSpec(1, 64)
    ker = wave_kernel(grid, 0.0)
    assert ker.at((1,)).real == pytest.approx(0.5, abs=1e-14)
    assert abs(ker.at((0,))) < 1e-14


def test_wave_propagator_unitary_symbol():
    grid = GridSpec(2, 32)
    g = walk_symbol(grid).values
    assert np.max(np.abs(np.abs(np.exp(1j * 5.0 * g)) - 1.0)) < 1e-14


def test_wave_kernel_grid_refinement():
    a = wave_kernel(GridSpec(1, 256), 8.0)
    b = wave_kernel(GridSpec(1, 1024), 8.0)
    assert a.l1() == pytest.approx(b.l1(), abs=1e-6)


def test_tail_mass_flags_spread_kernels():
    # heat-type profile wide enough to hit the window edge
    grid = GridSpec(1, 32)
    ker = functional_calculus(grid, lambda lam: np.exp(-0.001 * (1 - lam)))
    assert ker.tail_mass < 1e-12  # nearly a delta: no leak
    spread = walk_power_kernel(GridSpec(1, 64), 64, tol=np.inf)
    assert spread.tail_mass > 1e-12
