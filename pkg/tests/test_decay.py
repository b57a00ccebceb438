"""Tests for decay certification: block norms, fitted exponents, bounds.

Expected values come from three independent sources: closed-form binomial
enumeration of the walk powers (math.comb), planted power-law kernels whose
exponent the fits must recover, and small cases checked by hand.
"""

import csv
import math

import numpy as np
import pytest

from latspec.decay import (
    BlockNorms,
    PveParams,
    block_norm_matrix,
    block_norms_to_csv,
    displacement_norms,
    fit_pve,
    gaussian_bound_check,
    lattice_ball_volume,
    poly_bound_check,
    pve_constant_ratio,
    row_sum_bound,
    squared_kernel_bound_check,
)
from latspec.geometry import build_net, build_partition, lattice_box
from latspec.lattice import GridSpec, apply_walk, kernel_from_values

# ---------------------------------------------------------------------------
# helpers


def exact_walk_kernel(M, k, n=1):
    """A^k by k exact shift-and-average steps (no FFT rounding dust)."""
    grid = GridSpec(n, M)
    vals = np.zeros(grid.shape)
    vals[(0,) * n] = 1.0
    for _ in range(k):
        vals = apply_walk(vals)
    return kernel_from_values(grid, vals)


def planted_kernel(M, exponent, n=1):
    grid = GridSpec(n, M)
    d = displacement_norms(grid, "linf")
    return kernel_from_values(grid, (1.0 + d) ** (-exponent))


def binomial_walk_value(k, d):
    """A^k(0, d) = 2^-k C(k, (k+d)/2), zero off the parity-allowed range."""
    if abs(d) > k or (k + d) % 2:
        return 0.0
    return math.comb(k, (k + abs(d)) // 2) / 2.0**k


def partition_1d(side, r):
    model = lattice_box(1, side)
    return model, build_partition(model, build_net(model, r), r)


DELTA_128 = kernel_from_values(GridSpec(1, 128), np.eye(1, 128, 0).ravel())


# ---------------------------------------------------------------------------
# parameters and volumes


class TestPveParams:
    @pytest.mark.parametrize("p,sigma", [(1.0, 0.5), (1.5, 1.0 / 6.0), (2.0, 0.0)])
    def test_sigma(self, p, sigma):
        assert PveParams(p=p, tau=1.0, a=2.0).sigma == pytest.approx(sigma, abs=1e-15)

    @pytest.mark.parametrize("p", [0.5, 0.99, 2.01, 5.0])
    def test_p_out_of_range(self, p):
        with pytest.raises(ValueError, match=r"\[1, 2\]"):
            PveParams(p=p, tau=1.0, a=2.0)

    def test_scale_and_target_positive(self):
        with pytest.raises(ValueError, match="tau"):
            PveParams(p=1.0, tau=0.0, a=2.0)
        with pytest.raises(ValueError, match="decay a"):
            PveParams(p=1.0, tau=1.0, a=-1.0)


class TestBallVolume:
    @pytest.mark.parametrize(
        "n,r,metric,expected",
        [
            (1, 1.0, "linf", 1),    # open ball: strict inequality
            (1, 4.0, "linf", 7),
            (2, 2.0, "linf", 9),
            (2, 2.0, "l1", 5),
            (2, 2.0, "l2", 9),
            (3, 1.5, "linf", 27),
        ],
    )
    def test_known_counts(self, n, r, metric, expected):
        assert lattice_ball_volume(n, r, metric) == expected

    def test_matches_enumeration(self):
        r = 3.7
        axis = np.arange(-5, 6)
        dx, dy = np.meshgrid(axis, axis, indexing="ij")
        count = int(np.count_nonzero(np.hypot(dx, dy) < r))
        assert lattice_ball_volume(2, r, "l2") == count

    def test_unknown_metric(self):
        with pytest.raises(ValueError, match="metric"):
            lattice_ball_volume(2, 1.0, "hamming")


def test_displacement_norms_orders():
    grid = GridSpec(2, 8)
    linf = displacement_norms(grid, "linf")
    l1 = displacement_norms(grid, "l1")
    l2 = displacement_norms(grid, "l2")
    assert linf.shape == (8, 8)
    assert linf[0, 0] == 0 and linf[1, 3] == 3
    assert l1[1, 3] == 4
    assert l2[3, 4] == pytest.approx(5.0)
    assert np.all(linf <= l2 + 1e-12) and np.all(l2 <= l1 + 1e-12)


# ---------------------------------------------------------------------------
# block-norm matrix


class TestBlockNormMatrix:
    def test_identity_blocks(self):
        """Identity kernel: diagonal blocks only, weight V^sigma = 1 at tau=1."""
        _, part = partition_1d(40, 1.0)
        block = block_norm_matrix(DELTA_128, part, PveParams(p=1.0, tau=1.0, a=2.0))
        off = ~np.eye(block.n_cells, dtype=bool)
        assert np.all(block.norms[off] == 0.0)
        assert np.allclose(np.diag(block.norms), 1.0, atol=1e-14)

    def test_range_one_operator(self):
        # A couples only adjacent sites, so blocks vanish beyond distance 1
        _, part = partition_1d(40, 1.0)
        a1 = exact_walk_kernel(128, 1)
        block = block_norm_matrix(a1, part, PveParams(p=1.0, tau=1.0, a=2.0))
        assert np.all(block.norms[block.distances > 1.0] == 0.0)
        at_one = block.norms[np.isclose(block.distances, 1.0)]
        assert np.allclose(at_one, 0.5, atol=1e-14)

    def test_binomial_tail_oracle(self):
        """p=1 block norm of A^16 vs direct enumeration over the two balls."""
        k16 = exact_walk_kernel(256, 16)
        model, part = partition_1d(100, 4.0)
        params = PveParams(p=1.0, tau=4.0, a=6.0)
        block = block_norm_matrix(k16, params=params, partition=part)
        weight = math.sqrt(lattice_ball_volume(1, 4.0))
        for i, j in [(3, 9), (10, 12), (25, 25), (0, 40)]:
            ball_i = model.points[model.ball(part.centers[i], 4.0)].ravel()
            ball_j = model.points[model.ball(part.centers[j], 4.0)].ravel()
            oracle = weight * max(
                math.sqrt(sum(binomial_walk_value(16, x - y) ** 2 for x in ball_i))
                for y in ball_j
            )
            assert block.norms[i, j] == pytest.approx(oracle, rel=1e-12, abs=1e-300)

    def test_p2_blocks_symmetric_for_selfadjoint(self):
        k8 = exact_walk_kernel(256, 8)
        _, part = partition_1d(80, 4.0)
        block = block_norm_matrix(k8, part, PveParams(p=2.0, tau=4.0, a=6.0))
        assert block.exact
        assert np.abs(block.norms - block.norms.T).max() < 1e-12

    def test_interpolated_p_on_singletons(self):
        """Singleton balls make both endpoint norms |K(d)|, so the p=1.5
        interpolation bound collapses to the exact value."""
        k8 = exact_walk_kernel(256, 8)
        _, part = partition_1d(60, 1.0)
        mid = block_norm_matrix(k8, part, PveParams(p=1.5, tau=1.0, a=2.0))
        exact = block_norm_matrix(k8, part, PveParams(p=1.0, tau=1.0, a=2.0))
        assert not mid.exact
        assert np.abs(mid.norms - exact.norms).max() < 1e-14

    def test_scale_mismatch_rejected(self):
        _, part = partition_1d(40, 4.0)
        with pytest.raises(ValueError, match="does not match tau"):
            block_norm_matrix(DELTA_128, part, PveParams(p=1.0, tau=2.0, a=2.0))

    def test_dimension_mismatch_rejected(self):
        model = lattice_box(2, 10)
        part = build_partition(model, build_net(model, 1.0), 1.0)
        with pytest.raises(ValueError, match="dimension"):
            block_norm_matrix(DELTA_128, part, PveParams(p=1.0, tau=1.0, a=2.0))

    def test_window_too_small_rejected(self):
        _, part = partition_1d(200, 1.0)
        with pytest.raises(ValueError, match="periodic window"):
            block_norm_matrix(DELTA_128, part, PveParams(p=1.0, tau=1.0, a=2.0))


# ---------------------------------------------------------------------------
# PVE exponent fits


class TestFitPve:
    def test_planted_cubic_recovered(self):
        """Envelope bins are unbiased on an exact power law: the planted
        (1+d)^-3 kernel comes back with exponent 3 to machine precision."""
        _, part = partition_1d(160, 1.0)
        block = block_norm_matrix(
            planted_kernel(4096, 3.0), part, PveParams(p=1.0, tau=1.0, a=2.0)
        )
        fit = fit_pve(block)
        assert fit.exponent == pytest.approx(3.0, abs=1e-9)
        assert fit.passed and fit.n_points >= 6

    @pytest.mark.parametrize("seed", range(3))
    def test_planted_random_exponents(self, seed):
        rng = np.random.default_rng(seed)
        _, part = partition_1d(160, 1.0)
        for exponent in rng.uniform(1.5, 6.0, size=3):
            block = block_norm_matrix(
                planted_kernel(4096, exponent),
                part,
                PveParams(p=1.0, tau=1.0, a=max(exponent - 1.0, 0.5)),
            )
            fit = fit_pve(block)
            assert fit.exponent == pytest.approx(exponent, abs=1e-9)
            assert fit.passed

    def test_identity_vacuous(self):
        _, part = partition_1d(40, 1.0)
        block = block_norm_matrix(DELTA_128, part, PveParams(p=1.0, tau=1.0, a=9.0))
        fit = fit_pve(block)
        assert fit.passed and fit.extras["vacuous"]
        assert fit.exponent == math.inf

    @pytest.mark.parametrize(
        "k,M,side,floor_exponent",
        [(16, 256, 100, 4.0), (64, 512, 200, 16.0), (256, 2048, 700, 56.0)],
    )
    def test_walk_power_exponent_grows_with_k(self, k, M, side, floor_exponent):
        """Gaussian-profile kernels at scale tau = sqrt(k): the measurable
        decay order grows with k, clearing any fixed target once k is large
        enough (the window, not the operator, is the limit)."""
        tau = float(math.isqrt(k))
        _, part = partition_1d(side, tau)
        block = block_norm_matrix(
            exact_walk_kernel(M, k), part, PveParams(p=1.0, tau=tau, a=6.0)
        )
        fit = fit_pve(block, min_bins=3, min_span=4.0)
        assert fit.exponent > floor_exponent
        if k >= 64:
            assert fit.passed  # target n + a = 7

    def test_large_target_needs_large_k(self):
        _, part = partition_1d(700, 16.0)
        block = block_norm_matrix(
            exact_walk_kernel(2048, 256), part, PveParams(p=1.0, tau=16.0, a=20.0)
        )
        assert fit_pve(block, min_bins=3, min_span=4.0).passed

    def test_insufficient_bins_rejected(self):
        _, part = partition_1d(100, 4.0)
        block = block_norm_matrix(
            exact_walk_kernel(256, 16), part, PveParams(p=1.0, tau=4.0, a=6.0)
        )
        with pytest.raises(ValueError, match="usable bins"):
            fit_pve(block)  # compact support leaves only 3 bins at default 6


# ---------------------------------------------------------------------------
# squared-kernel bound


class TestSquaredKernel:
    def test_planted_quartic(self):
        """(1+|d|)^-4 squared still decays at order ~4, clearing the
        guaranteed floor a - D - eps = 2.9."""
        fit = squared_kernel_bound_check(planted_kernel(4096, 4.0), a=3.0, tau=1.0)
        assert fit.passed
        assert fit.exponent == pytest.approx(3.9967, abs=0.05)

    def test_identity_vacuous(self):
        fit = squared_kernel_bound_check(DELTA_128, a=5.0, tau=1.0)
        assert fit.passed and fit.extras["vacuous"]

    def test_finite_range_vacuous(self):
        # A^2 squared has range 4; any tau beyond that empties the far field
        a2 = exact_walk_kernel(256, 2)
        fit = squared_kernel_bound_check(a2, a=3.0, tau=8.0)
        assert fit.passed and fit.extras["vacuous"]


# ---------------------------------------------------------------------------
# Gaussian and polynomial profile checks


class TestGaussianBound:
    def test_dimension_one(self):
        diag, tail = gaussian_bound_check(1)
        assert diag.passed and tail.passed
        assert diag.exponent == pytest.approx(-0.5, abs=0.05)
        assert tail.exponent == pytest.approx(-0.5027, abs=0.02)
        per_k = tail.extras["per_k_slopes"]
        slopes = [per_k[k] for k in sorted(per_k)]
        assert all(s < 0 for s in slopes)
        assert slopes == sorted(slopes)  # drift toward -1/2 from below

    def test_dimension_two(self):
        diag, tail = gaussian_bound_check(2)
        assert diag.passed and tail.passed
        assert diag.exponent == pytest.approx(-0.9899, abs=0.01)
        assert tail.exponent == pytest.approx(-1.0122, abs=0.01)

    def test_window_doubling_stable(self):
        # truncation certificates make the two windows carry the same kernel
        diag_small, tail_small = gaussian_bound_check(2, M=512)
        diag_big, tail_big = gaussian_bound_check(2, M=1024)
        assert diag_small.exponent == pytest.approx(diag_big.exponent, abs=1e-6)
        assert tail_small.exponent == pytest.approx(tail_big.exponent, abs=1e-6)

    @pytest.mark.parametrize(
        "bad,message",
        [
            ((16, 32, 64), "at least 4"),
            ((16, 32, 64, 128, 255), "even"),
            ((16, 20, 24, 32), "factor of 8"),
        ],
    )
    def test_ladder_validation(self, bad, message):
        with pytest.raises(ValueError, match=message):
            gaussian_bound_check(1, k_values=bad)

    def test_needs_explicit_window_beyond_defaults(self):
        with pytest.raises(ValueError, match="explicitly"):
            gaussian_bound_check(3)


class TestPolyBound:
    K_SET = (16, 32, 64, 128, 256)

    def test_exact_kernels_cover_order_twelve(self):
        """Binomial kernels carry genuine tails down to 2^-256; with the
        noise floor off, the pooled fit supports order ~24."""
        kernels = {k: exact_walk_kernel(2048, k) for k in self.K_SET}
        fit = poly_bound_check(kernels, N=12.0, noise_floor=0.0)
        assert fit.passed
        assert fit.exponent == pytest.approx(23.72, abs=0.5)
        assert fit.extras["largest_passing_N"] >= 12

    def test_planted_profile_order_three(self):
        grid = GridSpec(1, 2048)
        d2 = displacement_norms(grid, "l2") ** 2
        kernels = {
            k: kernel_from_values(grid, (1.0 + d2 / k) ** (-3.0) / math.sqrt(k))
            for k in self.K_SET
        }
        fit = poly_bound_check(kernels, N=3.0)
        assert fit.passed
        assert fit.exponent == pytest.approx(3.0, abs=1e-9)
        assert fit.extras["largest_passing_N"] == 3
        assert not poly_bound_check(kernels, N=5.0).passed

    def test_zero_kernels_vacuous(self):
        grid = GridSpec(1, 64)
        kernels = {k: kernel_from_values(grid, np.zeros(64)) for k in (2, 4, 8, 16)}
        fit = poly_bound_check(kernels, N=100.0)
        assert fit.passed and fit.extras["vacuous"]

    def test_validation(self):
        with pytest.raises(ValueError, match="at least one"):
            poly_bound_check({}, N=1.0)
        grid = GridSpec(1, 64)
        bad = {-2: kernel_from_values(grid, np.zeros(64))}
        with pytest.raises(ValueError, match="positive"):
            poly_bound_check(bad, N=1.0)


# ---------------------------------------------------------------------------
# summability and reporting


def test_row_sum_bound_stable_across_windows():
    """The tail sum sup_j sum_i (1 + d/tau)^-7 must not grow with the
    window when the exponent exceeds the dimension."""
    values = {}
    for side in (128, 256):
        _, part = partition_1d(side, 4.0)
        block = block_norm_matrix(
            exact_walk_kernel(1024, 16), part, PveParams(p=1.0, tau=4.0, a=6.0)
        )
        values[side] = row_sum_bound(block, 7.0)
    assert values[256] / values[128] == pytest.approx(1.0, abs=1e-6)
    assert values[128] == pytest.approx(1.13741, abs=1e-4)


def test_two_scale_constant_report():
    _, part1 = partition_1d(160, 1.0)
    _, part2 = partition_1d(160, 2.0)
    kernel = planted_kernel(4096, 3.0)
    fit1 = fit_pve(block_norm_matrix(kernel, part1, PveParams(p=1.0, tau=1.0, a=2.0)))
    fit2 = fit_pve(block_norm_matrix(kernel, part2, PveParams(p=1.0, tau=2.0, a=2.0)))
    report = pve_constant_ratio(fit1, fit2)
    assert set(report) == {
        "constant_small", "constant_large", "ratio",
        "exponent_small", "exponent_large",
    }
    assert report["ratio"] == pytest.approx(
        report["constant_large"] / report["constant_small"], rel=1e-12
    )
    assert report["ratio"] > 0


def test_block_norms_csv_roundtrip(tmp_path):
    _, part = partition_1d(40, 1.0)
    block = block_norm_matrix(
        exact_walk_kernel(128, 4), part, PveParams(p=1.0, tau=1.0, a=2.0)
    )
    path = tmp_path / "blocks.csv"
    block_norms_to_csv(block, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["i", "j", "distance", "norm"]
    assert len(rows) == 1 + block.n_cells**2
    for i, j, dist, norm in rows[1:]:
        assert float(dist) == block.distances[int(i), int(j)]
        assert float(norm) == block.norms[int(i), int(j)]
