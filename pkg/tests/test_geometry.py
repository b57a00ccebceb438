"""Covering-geometry tests: exhaustive audits against brute-force oracles."""

import numpy as np
import pytest

from latspec.geometry import (
    MetricModel,
    ball_count_check,
    build_net,
    build_partition,
    doubling_fit,
    lattice_box,
    schur_bound,
)


def brute_distances(model, a_idx, b_idx):
    return model.distance(model.points[a_idx], model.points[b_idx])


def audit_net(model, centers_idx, r):
    """Oracle: O(N * centers) exhaustive separation + covering check."""
    pts = model.points
    centers = pts[centers_idx]
    sep_ok = True
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if model.distance(centers[i], centers[j]) <= r / 4:
                sep_ok = False
    cover = max(
        min(model.distance(p, c) for c in centers) for p in pts
    )
    return sep_ok, cover


# --------------------------------------------------------------------------
# metric model basics


def test_metric_triangle_inequality_random_triples():
    rng = np.random.default_rng(3)
    for metric in ("linf", "l1", "l2"):
        model = lattice_box(2, 12, metric)
        for _ in range(50):
            a, b, c = model.points[rng.integers(0, model.size, 3)]
            assert model.distance(a, c) <= model.distance(a, b) + model.distance(b, c) + 1e-12


def test_volume_monotone_in_radius():
    model = lattice_box(2, 21)
    x = model.points[220]
    vols = [model.volume(x, r) for r in (1, 2, 3, 5, 8)]
    assert vols == sorted(vols)
    # open balls: |B(x, 1)| = 1 on the integer lattice
    assert vols[0] == 1


def test_open_ball_exact_counts():
    model = lattice_box(2, 31)
    center = np.array([15, 15])
    # open linf ball of radius r holds (2*ceil(r-1)+1)^2 points
    assert model.volume(center, 3) == 5 ** 2
    assert model.volume(center, 3.5) == 7 ** 2
    l1 = lattice_box(2, 31, "l1")
    assert l1.volume(center, 2) == 5  # center + 4 neighbours


# --------------------------------------------------------------------------
# nets


def test_net_1d_box_frozen_example():
    model = lattice_box(1, 100)
    centers = build_net(model, 4.0)
    gaps = np.diff(np.sort(model.points[centers].ravel()))
    assert np.all(gaps >= 1) and np.all(gaps <= 2)
    sep_ok, cover = audit_net(model, centers, 4.0)
    assert sep_ok and cover <= 1.0


def test_net_tiny_scale_all_points():
    model = lattice_box(1, 17)
    centers = build_net(model, 0.5)
    assert centers.size == model.size


def test_net_single_point_space():
    model = MetricModel(np.zeros((1, 2), dtype=int))
    assert build_net(model, 8.0).size == 1


@pytest.mark.parametrize("metric", ["linf", "l1", "l2"])
def test_net_audit_2d(metric):
    model = lattice_box(2, 24, metric)
    centers = build_net(model, 8.0)
    sep_ok, cover = audit_net(model, centers, 8.0)
    assert sep_ok
    assert cover <= 2.0


def test_net_monotone_in_scale():
    model = lattice_box(2, 40)
    for r in (4.0, 8.0, 16.0):
        assert build_net(model, 2 * r).size <= build_net(model, r).size


# --------------------------------------------------------------------------
# partitions


def exhaustive_partition_audit(part):
    model = part.model
    counts = np.bincount(part.cell_of_point, minlength=part.n_cells)
    assert counts.sum() == model.size  # set partition, exact
    centers = part.centers
    for j in range(model.size):
        i = part.cell_of_point[j]
        assert model.distance(model.points[j], centers[i]) < part.r


def test_partition_1d_box_200():
    model = lattice_box(1, 200)
    part = build_partition(model, build_net(model, 8.0), 8.0)
    exhaustive_partition_audit(part)
    assert part.min_fullness > 0


def test_partition_2d_exhaustive():
    model = lattice_box(2, 48)
    part = build_partition(model, build_net(model, 8.0), 8.0)
    exhaustive_partition_audit(part)


def test_partition_own_quarter_ball_small_scale():
    # for r=8 on Z^n the r/4-balls of a strictly separated net are disjoint,
    # so each cell contains its centre's own r/4-ball outright
    model = lattice_box(2, 40)
    part = build_partition(model, build_net(model, 8.0), 8.0)
    for i in range(part.n_cells):
        ball = model.ball(part.centers[i], 2.0)
        assert np.all(part.cell_of_point[ball] == i)


def test_partition_single_center():
    model = lattice_box(1, 3)
    part = build_partition(model, build_net(model, 100.0), 100.0)
    assert part.n_cells == 1
    assert np.all(part.cell_of_point == 0)


def test_partition_rejects_bad_centers():
    model = lattice_box(1, 50)
    with pytest.raises(ValueError):
        build_partition(model, np.array([0, 1]), 8.0)  # not separated
    with pytest.raises(ValueError):
        build_partition(model, np.array([0]), 8.0)  # not covering


def test_partition_eta_weights():
    model = lattice_box(1, 40)
    part = build_partition(model, build_net(model, 4.0), 4.0)
    eta = part.eta(0)
    x0 = part.centers[0]
    d = model.distance(model.points, x0)
    assert np.allclose(eta, d / 4.0)


# --------------------------------------------------------------------------
# doubling fits


def test_doubling_fit_z1():
    model = lattice_box(1, 300)
    fit = doubling_fit(model, [8, 16, 32, 64])
    assert abs(fit.exponent - 1.0) <= 0.1


def test_doubling_fit_z2():
    model = lattice_box(2, 144)
    fit = doubling_fit(model, [8, 16, 32, 64])
    assert abs(fit.exponent - 2.0) <= 0.1


def test_doubling_fit_degenerate_inputs():
    model = lattice_box(1, 100)
    with pytest.raises(ValueError):
        doubling_fit(model, [4, 4, 4, 4])
    with pytest.raises(ValueError):
        doubling_fit(model, [2, 4])


# --------------------------------------------------------------------------
# annulus counts


def test_ball_count_z2_bounded():
    # greedy-lex nets at r=4 sit on 2Z^2; the dyadic annulus counts then
    # stay below 48 * 4^k uniformly in k (exhaustive count, 256^2 box)
    model = lattice_box(2, 256)
    part = build_partition(model, build_net(model, 4.0), 4.0)
    report = ball_count_check(part, kmax=4)
    assert report["constant"] <= 48.0
    for k in range(5):
        assert report["per_k"][k]["max_count"] <= 48.0 * 2 ** (2 * k)


def test_ball_count_beyond_diameter_zero():
    model = lattice_box(2, 32)
    part = build_partition(model, build_net(model, 4.0), 4.0)
    report = ball_count_check(part, kmax=6)
    assert report["per_k"][6]["max_count"] == 0  # 2^6*4 = 256 > diameter


def test_ball_count_z1_linear_growth():
    model = lattice_box(1, 512, "linf")
    part = build_partition(model, build_net(model, 4.0), 4.0)
    report = ball_count_check(part, kmax=4)
    counts = [report["per_k"][k]["max_count"] for k in range(5)]
    # linear in 2^k: count/2^k roughly constant, and definitely not ~4^k
    ratios = [c / 2 ** k for k, c in enumerate(counts)]
    assert max(ratios) <= 4 * min(r for r in ratios if r > 0)


def brute_annulus_counts(part, kmax):
    centers = part.centers
    n = centers.shape[0]
    out = np.zeros((n, kmax + 1), dtype=int)
    for j in range(n):
        d = part.model.distance(centers, centers[j])
        for k in range(kmax + 1):
            lo, hi = 2.0 ** k * part.r, 2.0 ** (k + 1) * part.r
            out[j, k] = int(np.sum((d >= lo) & (d < hi)))
    return out


def test_ball_count_matches_bruteforce():
    model = lattice_box(2, 40, "l2")
    part = build_partition(model, build_net(model, 4.0), 4.0)
    report = ball_count_check(part, kmax=3)
    brute = brute_annulus_counts(part, 3)
    for k in range(4):
        assert report["per_k"][k]["max_count"] == brute[:, k].max()


# --------------------------------------------------------------------------
# Schur bound


def test_schur_identity_bound_two():
    norms = np.eye(10)
    assert schur_bound(norms) == pytest.approx(2.0)


def test_schur_block_diagonal():
    norms = np.diag([0.5, 3.0, 1.0])
    assert schur_bound(norms) == pytest.approx(6.0)


def test_schur_rejects_bad_input():
    with pytest.raises(ValueError):
        schur_bound(np.eye(3), p=2, q=1)
    with pytest.raises(ValueError):
        schur_bound(-np.eye(3))


def test_schur_dominates_dense_norm_random():
    """Schur bound >= true operator norm on random partitioned operators."""
    rng = np.random.default_rng(11)
    model = lattice_box(1, 30)
    part = build_partition(model, build_net(model, 8.0), 8.0)
    cells = [part.cell_points(i) for i in range(part.n_cells)]
    for _ in range(50):
        T = rng.standard_normal((30, 30))
        blocks = np.zeros((part.n_cells, part.n_cells))
        for i, ci in enumerate(cells):
            for j, cj in enumerate(cells):
                sub = T[np.ix_(ci, cj)]
                blocks[i, j] = np.linalg.norm(sub, 2)
        dense = np.linalg.norm(T, 2)
        assert schur_bound(blocks) >= dense - 1e-12
