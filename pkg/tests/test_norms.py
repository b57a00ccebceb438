"""Tests for operator-norm reports and growth-law sweeps.

Exact norms are checked against dense circulant SVD and hand values;
growth fits against the light-cone / multiplier-theorem targets they
certify.  The zero operator and rejection paths close out the edges.
"""

import math

import numpy as np
import pytest

from latspec.lattice import (
    GridSpec,
    MultiplierFunction,
    bump,
    functional_calculus,
    kernel_from_values,
    walk_power_kernel,
    wave_kernel,
)
from latspec.norms import (
    NormReport,
    bochner_riesz_sweep,
    conv_norm,
    multiplier_bound_check,
    probe_lower_bound,
    uniform_multiplier_sweep,
    wave_growth_fit,
)

INF = math.inf
EXACT_PAIRS = [(1, 1), (INF, INF), (2, 2), (1, 2), (1, INF), (2, INF)]

ZERO_BUMP = MultiplierFunction(
    lambda lam: np.zeros_like(lam), (0.125, 0.25), "zero"
)


def delta_kernel(M=128):
    return kernel_from_values(GridSpec(1, M), np.eye(1, M, 0).ravel())


def random_kernel(M=64, nnz=9, seed=0, complex_values=False):
    rng = np.random.default_rng(seed)
    vals = np.zeros(M, dtype=complex if complex_values else float)
    idx = rng.choice(M, nnz, replace=False)
    vals[idx] = rng.normal(size=nnz)
    if complex_values:
        vals[idx] = vals[idx] + 1j * rng.normal(size=nnz)
    return kernel_from_values(GridSpec(1, M), vals)


def circulant_matrix(kernel):
    M = kernel.grid.M
    vals = kernel.values
    return np.array([[vals[(x - y) % M] for y in range(M)] for x in range(M)])


# ---------------------------------------------------------------------------
# conv_norm


class TestConvNorm:
    @pytest.mark.parametrize("p,q", EXACT_PAIRS)
    def test_identity_operator(self, p, q):
        report = conv_norm(delta_kernel(), p, q)
        assert report.exact
        assert report.lower == report.upper == pytest.approx(1.0, abs=1e-14)

    def test_identity_interpolated(self):
        for p, q in [(1.5, 1.5), (1.5, 3.0), (4.0, 8.0)]:
            report = conv_norm(delta_kernel(), p, q)
            assert not report.exact
            assert report.upper == pytest.approx(1.0, abs=1e-12)
            assert report.lower == pytest.approx(1.0, abs=1e-12)

    def test_walk_operator_hand_values(self):
        a = walk_power_kernel(GridSpec(1, 256), 1)
        assert conv_norm(a, 1, 1).upper == pytest.approx(1.0, abs=1e-12)
        assert conv_norm(a, 2, 2).upper == pytest.approx(1.0, abs=1e-12)
        assert conv_norm(a, 1, 2).upper == pytest.approx(2**-0.5, abs=1e-12)
        assert conv_norm(a, 1, INF).upper == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    @pytest.mark.parametrize("M", [64, 128])
    def test_l2_matches_dense_svd(self, seed, M):
        """The (2,2) norm must equal the circulant's top singular value."""
        kernel = random_kernel(M=M, seed=seed)
        top = np.linalg.svd(circulant_matrix(kernel), compute_uv=False)[0]
        assert conv_norm(kernel, 2, 2).upper == pytest.approx(top, abs=1e-10)

    @pytest.mark.parametrize("p,q", EXACT_PAIRS)
    def test_probe_family_reaches_exact(self, p, q):
        kernel = random_kernel(seed=3, complex_values=True)
        exact = conv_norm(kernel, p, q).upper
        lower, _ = probe_lower_bound(kernel, p, q)
        assert lower >= 0.9 * exact

    @pytest.mark.parametrize("p,q", [(1.5, 1.5), (1.5, 2.0), (4 / 3, 4.0), (3.0, 8.0)])
    def test_sandwich(self, p, q):
        kernel = random_kernel(seed=11, complex_values=True)
        report = conv_norm(kernel, p, q)
        assert not report.exact
        assert 0 < report.lower <= report.upper < math.inf

    def test_selfadjoint_duality(self):
        # real symmetric kernel: 1->1 and inf->inf norms are the same sum
        kernel = walk_power_kernel(GridSpec(1, 128), 4)
        one = conv_norm(kernel, 1, 1)
        top = conv_norm(kernel, INF, INF)
        assert one.upper == top.upper

    def test_zero_operator(self):
        # multiplier supported outside the spectrum of I - A
        zero = functional_calculus(GridSpec(1, 128), bump(2.5, 3.0), of="one_minus_walk")
        assert conv_norm(zero, 1, 1).upper == 0.0
        report = conv_norm(zero, 1.5, 1.5)
        assert report.lower == report.upper == 0.0

    def test_rejects_unbounded_range(self):
        with pytest.raises(ValueError, match="q < p"):
            conv_norm(delta_kernel(), 2, 1)
        with pytest.raises(ValueError, match=">= 1"):
            conv_norm(delta_kernel(), 0.5, 2)

    def test_tail_contamination_flagged(self):
        d = np.abs(np.arange(64) - 32)
        heavy = kernel_from_values(GridSpec(1, 64), np.roll((1.0 + d) ** -1.01, 32))
        assert conv_norm(heavy, 1, 1).contaminated
        assert not conv_norm(delta_kernel(), 1, 1).contaminated

    def test_bound_ordering_enforced(self):
        with pytest.raises(ValueError, match="exceeds upper"):
            NormReport(
                p=1.5, q=1.5, lower=2.0, upper=1.0,
                lower_method="x", upper_method="y", exact=False,
            )


# ---------------------------------------------------------------------------
# wave propagator growth


class TestWaveGrowth:
    def test_dimension_one(self):
        fit = wave_growth_fit(1)
        assert fit.passed  # target 1/2 + 0.2
        assert fit.exponent == pytest.approx(0.3779, abs=0.01)
        assert fit.extras["truncated"] == []

    def test_dimension_two(self):
        fit = wave_growth_fit(2, t_values=(1, 2, 4, 8, 16, 32))
        assert fit.passed  # target 1 + 0.2
        assert fit.exponent == pytest.approx(0.6534, abs=0.02)

    def test_window_doubling_stable(self):
        base = wave_growth_fit(1)
        doubled = wave_growth_fit(1, M=16384)
        assert abs(base.exponent - doubled.exponent) <= 0.03

    def test_time_zero_is_the_walk(self):
        kernel = wave_kernel(GridSpec(1, 512), 0.0)
        assert kernel.l1() == pytest.approx(1.0, abs=1e-12)

    def test_nonpositive_ladder_rejected(self):
        with pytest.raises(ValueError, match="positive"):
            wave_growth_fit(1, t_values=(0.0, 1.0, 2.0, 4.0))

    def test_contaminated_window_rejected(self):
        # t beyond the light cone of a tiny window leaves < 3 clean points
        with pytest.raises(ValueError, match="uncontaminated"):
            wave_growth_fit(1, t_values=(16.0, 32.0, 64.0), M=64)


# ---------------------------------------------------------------------------
# multiplier boundedness sweeps


class TestMultiplierBound:
    def test_smooth_bump_flat(self):
        report = multiplier_bound_check(bump(0.25, 0.75), s=1.1, n=1)
        assert report["bounded"]
        assert report["slope"] <= 0.05
        assert report["max_ratio"] > 0

    def test_zero_multiplier(self):
        report = multiplier_bound_check(ZERO_BUMP, s=1.1, n=1, levels=4)
        assert report["ratios"] == [0.0] * 4
        assert report["bounded"]


class TestUniformSweep:
    def test_dimension_one_bounded(self):
        report = uniform_multiplier_sweep(bump(0.125, 0.375), 1)
        assert report["bounded"]
        assert report["max_over_median"] <= 1.1
        assert abs(report["slope"]) <= 0.05
        assert len(report["norms"]) == 7  # three decades: 4^0 .. 4^6

    def test_dimension_two_bounded(self):
        report = uniform_multiplier_sweep(bump(1 / 16, 1 / 4), 2)
        assert report["bounded"]
        assert report["max_over_median"] <= 1.1

    def test_zero_multiplier(self):
        report = uniform_multiplier_sweep(ZERO_BUMP, 1)
        assert report["zero"] and report["bounded"]
        assert report["norms"] == [0.0] * 7

    @pytest.mark.parametrize("n,lo,hi", [(1, 0.5, 1.5), (2, 0.25, 0.75)])
    def test_support_violation_rejected(self, n, lo, hi):
        with pytest.raises(ValueError, match="support"):
            uniform_multiplier_sweep(bump(lo, hi), n)


class TestBochnerRiesz:
    def test_smooth_mean_uniform(self):
        report = bochner_riesz_sweep(2, alphas=(10.0,))
        entry = report["per_alpha"][10.0]
        assert entry["bounded"]
        assert abs(entry["window_growth_slope"]) <= 0.01
        assert all(abs(v - 1.0) <= 0.01 for v in entry["norms"])

    def test_sharp_cutoff_unbounded_in_window(self):
        """alpha=0 in n=2: the projector kernel tail ~ |d|^{-3/2} is not
        summable, so doubling the window keeps adding mass at rate M^0.5."""
        report = bochner_riesz_sweep(2, alphas=(0.0,))
        entry = report["per_alpha"][0.0]
        assert not entry["bounded"]
        assert entry["window_growth_slope"] == pytest.approx(0.52, abs=0.1)

    def test_sharp_cutoff_dimension_one(self):
        entry = bochner_riesz_sweep(1, alphas=(0.0,))["per_alpha"][0.0]
        assert entry["window_growth_slope"] > 0.05
        assert not entry["bounded"]

    def test_validation(self):
        with pytest.raises(ValueError, match="alpha"):
            bochner_riesz_sweep(1, alphas=(-1.0,))
        with pytest.raises(ValueError, match="spectrum"):
            bochner_riesz_sweep(1, R_values=(3.0,))
