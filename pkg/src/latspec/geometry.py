"""Covering geometry for finite lattice patches as doubling metric spaces.

A :class:`MetricModel` is a finite set of integer points with one of the
word metrics (sup, taxicab, euclidean) and counting measure.  On top of it
we build the standard scaffolding of analysis on homogeneous spaces:

  * greedy maximal ``r/4``-separated nets (which automatically cover at
    radius ``r/4``),
  * a measurable partition subordinate to the net: each cell sits inside
    the ``r/2``-ball of its centre, gets priority on its own ``r/4``-ball,
    and the construction is *verified* (disjoint + covering + containment)
    rather than trusted,
  * empirical doubling-exponent fits from exact ball counts,
  * dyadic annulus counts of net centres, and
  * the Schur-type operator bound from a matrix of block norms.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .fitting import DecayFit, power_fit

__all__ = [
    "MetricModel",
    "Partition",
    "lattice_box",
    "build_net",
    "build_partition",
    "doubling_fit",
    "ball_count_check",
    "schur_bound",
    "partition_to_csv",
]

_METRIC_P = {"linf": np.inf, "l1": 1, "l2": 2}


@dataclass(frozen=True)
class MetricModel:
    """Finite point set in Z^n with a word metric and counting measure."""

    points: np.ndarray
    metric: str = "linf"
    _tree: cKDTree = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a non-empty (N, n) array")
        if not np.issubdtype(pts.dtype, np.integer):
            raise ValueError("lattice points must be integers")
        if self.metric not in _METRIC_P:
            raise ValueError(f"unknown metric {self.metric!r}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_tree", cKDTree(pts.astype(float)))

    @property
    def n(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def distance(self, a, b) -> float:
        """Distance between two points (arrays broadcast along rows)."""
        diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        p = _METRIC_P[self.metric]
        if p is np.inf:
            return np.max(diff, axis=-1)
        if p == 1:
            return np.sum(diff, axis=-1)
        return np.sqrt(np.sum(diff * diff, axis=-1))

    def ball(self, center, r: float) -> np.ndarray:
        """Indices of the *open* ball ``{x : d(x, center) < r}``."""
        center = np.asarray(center, dtype=float)
        p = _METRIC_P[self.metric]
        cand = self._tree.query_ball_point(center, r, p=p)
        idx = np.asarray(cand, dtype=int)
        if idx.size == 0:
            return idx
        d = self.distance(self.points[idx], center)
        return idx[d < r]

    def volume(self, center, r: float) -> int:
        return int(self.ball(center, r).size)


def lattice_box(n: int, side: int, metric: str = "linf") -> MetricModel:
    """The cube ``{0..side-1}^n`` as a metric model."""
    if side <= 0:
        raise ValueError("side must be positive")
    axes = [np.arange(side)] * n
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
    return MetricModel(pts, metric)


@dataclass(frozen=True)
class Partition:
    """Net centres with a verified subordinate partition at scale ``r``."""

    model: MetricModel
    r: float
    center_indices: np.ndarray      # indices into model.points
    cell_of_point: np.ndarray       # cell id per model point
    min_fullness: float             # min_i |Q_i| / |B(x_i, r)|

    @property
    def n_cells(self) -> int:
        return int(self.center_indices.size)

    @property
    def centers(self) -> np.ndarray:
        return self.model.points[self.center_indices]

    def cell_points(self, i: int) -> np.ndarray:
        return np.nonzero(self.cell_of_point == i)[0]

    def eta(self, i: int) -> np.ndarray:
        """Normalized distance weight ``x -> d(x, x_i) / r`` on all points."""
        return self.model.distance(self.model.points, self.centers[i]) / self.r

    def center_tree(self) -> cKDTree:
        return cKDTree(self.centers.astype(float))


def build_net(model: MetricModel, r: float) -> np.ndarray:
    """Greedy maximal ``r/4``-separated subset, scanned in point order.

    Maximality makes it an ``r/4``-covering: any point left out lies
    strictly within ``r/4`` of an earlier centre.
    """
    if r <= 0:
        raise ValueError("net scale r must be positive")
    sep = r / 4.0
    pts = model.points.astype(float)
    p = _METRIC_P[model.metric]
    # bucket grid of edge `sep`: conflicts live in adjacent buckets only
    inv = 1.0 / sep
    buckets: dict[tuple, list[int]] = {}
    chosen: list[int] = []
    offsets = np.stack(
        np.meshgrid(*([np.arange(-1, 2)] * model.n), indexing="ij"), axis=-1
    ).reshape(-1, model.n)
    for i, x in enumerate(pts):
        key = tuple(np.floor(x * inv).astype(int))
        ok = True
        for off in offsets:
            neigh = buckets.get(tuple(key + off))
            if not neigh:
                continue
            diff = np.abs(pts[neigh] - x)
            if p is np.inf:
                d = np.max(diff, axis=-1)
            elif p == 1:
                d = np.sum(diff, axis=-1)
            else:
                d = np.sqrt(np.sum(diff * diff, axis=-1))
            if np.any(d <= sep):
                ok = False
                break
        if ok:
            buckets.setdefault(key, []).append(i)
            chosen.append(i)
    return np.asarray(chosen, dtype=int)


def _validate_net(model: MetricModel, centers: np.ndarray, r: float) -> None:
    """Reject centre sets that are not r/4-separated and r/4-covering."""
    sep = r / 4.0
    p = _METRIC_P[model.metric]
    ctree = cKDTree(centers.astype(float))
    if len(ctree.query_pairs(sep, p=p)):
        raise ValueError("centres are not r/4-separated")
    dist, _ = ctree.query(model.points.astype(float), k=1, p=p)
    if np.max(dist) > sep * (1 + 1e-12):
        raise ValueError("centres do not cover at radius r/4")


def build_partition(model: MetricModel, centers_idx: np.ndarray, r: float) -> Partition:
    """Partition at scale ``r`` subordinate to *centers_idx* (from build_net).

    Assignment is by priority: first every point goes to the first centre
    (in net order) whose ``r/4``-ball contains it, then to the first whose
    ``r/2``-ball does, and any straggler to its nearest centre.  The
    stated properties — cells disjoint, covering, ``Q_i`` inside
    ``B(x_i, r)`` — are then checked outright.
    """
    centers_idx = np.asarray(centers_idx, dtype=int)
    if centers_idx.size == 0:
        raise ValueError("need at least one centre")
    centers = model.points[centers_idx]
    ncell = centers_idx.size
    _validate_net(model, centers, r)

    cell = np.full(model.size, -1, dtype=int)
    for radius in (r / 4.0, r / 2.0):
        for i in range(ncell):
            inside = model.ball(centers[i], radius)
            free = inside[cell[inside] < 0]
            cell[free] = i
        if not np.any(cell < 0):
            break
    leftover = np.nonzero(cell < 0)[0]
    if leftover.size:
        ctree = cKDTree(centers.astype(float))
        _, nearest = ctree.query(
            model.points[leftover].astype(float), k=1, p=_METRIC_P[model.metric]
        )
        cell[leftover] = nearest

    # --- postconditions (construction is not trusted) ---
    if np.any(cell < 0):
        raise AssertionError("partition failed to cover the model")
    own = model.distance(model.points, centers[cell])
    if np.any(own >= r):
        raise AssertionError("a partition cell left its centre's r-ball")
    counts = np.bincount(cell, minlength=ncell)
    fullness = []
    for i in range(ncell):
        vol = model.volume(centers[i], r)
        fullness.append(counts[i] / vol if vol else 0.0)
    return Partition(
        model=model,
        r=float(r),
        center_indices=centers_idx,
        cell_of_point=cell,
        min_fullness=float(min(fullness)),
    )


def doubling_fit(
    model: MetricModel,
    radii,
    sample_points: int = 5,
    rng: np.random.Generator | None = None,
) -> DecayFit:
    """Volume-growth exponent from exact ball counts at interior points.

    Needs at least four radii spanning a factor of eight; sample points
    are kept away from the boundary by the largest radius so counts are
    unclipped.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size < 4 or radii[-1] / radii[0] < 8 - 1e-9:
        raise ValueError("need >= 4 radii spanning a factor of >= 8")
    rmax = radii[-1]
    lo = model.points.min(axis=0)
    hi = model.points.max(axis=0)
    interior = np.all(
        (model.points - lo >= rmax) & (hi - model.points >= rmax), axis=1
    )
    if not np.any(interior):
        raise ValueError("model too small for the largest radius")
    idx = np.nonzero(interior)[0]
    rng = rng or np.random.default_rng(0)
    take = idx if idx.size <= sample_points else rng.choice(idx, sample_points, replace=False)
    vols = np.array([
        [model.volume(model.points[i], r) for r in radii] for i in take
    ], dtype=float)
    mean_vol = vols.mean(axis=0)
    return power_fit(radii, mean_vol, label="volume growth")


def ball_count_check(partition: Partition, kmax: int) -> dict:
    """Dyadic annulus counts of centres against the ``2^{k n}`` law.

    For each centre j and each ``k``, counts centres at distance in
    ``[2^k tau, 2^{k+1} tau)`` and reports the largest ratio to
    ``2^{k n}`` together with the per-k maxima.
    """
    tau = partition.r
    n = partition.model.n
    centers = partition.centers.astype(float)
    tree = cKDTree(centers)
    p = _METRIC_P[partition.model.metric]
    shave = 1.0 - 1e-12  # closed query just under the bound realizes d < bound

    def counts_below(bound: float) -> np.ndarray:
        return np.asarray(
            tree.query_ball_point(centers, bound * shave, p=p, return_length=True)
        )

    per_k = {}
    worst = 0.0
    for k in range(kmax + 1):
        lo, hi = (2.0 ** k) * tau, (2.0 ** (k + 1)) * tau
        counts = counts_below(hi) - counts_below(lo)
        ratio = float(np.max(counts)) / (2.0 ** (k * n))
        per_k[k] = {"max_count": int(np.max(counts)), "ratio": ratio}
        worst = max(worst, ratio)
    return {"constant": worst, "per_k": per_k, "n_centers": partition.n_cells}


def schur_bound(block_norms: np.ndarray, p: float = 2.0, q: float = 2.0) -> float:
    """Operator-norm bound from a matrix of block norms.

    For ``T = sum_{ij} P_i T P_j`` and exponents ``p <= q`` the Schur-type
    test bounds ``||T||_{p->q}`` by the maximal column sum plus the
    maximal row sum of the block-norm matrix.
    """
    if p > q:
        raise ValueError("schur bound needs p <= q")
    m = np.asarray(block_norms, dtype=float)
    if m.ndim != 2 or np.any(m < 0):
        raise ValueError("block norms must form a non-negative matrix")
    return float(np.max(m.sum(axis=0)) + np.max(m.sum(axis=1)))


def partition_to_csv(partition: Partition, path) -> None:
    """Rows ``(x_1..x_n, cell, center_1..center_n, dist_to_center)``."""
    model = partition.model
    centers = partition.centers
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        n = model.n
        writer.writerow(
            [f"x{i+1}" for i in range(n)]
            + ["cell"]
            + [f"center{i+1}" for i in range(n)]
            + ["dist_to_center"]
        )
        for j in range(model.size):
            c = partition.cell_of_point[j]
            d = model.distance(model.points[j], centers[c])
            writer.writerow(
                [*map(int, model.points[j]), int(c), *map(int, centers[c]), repr(float(d))]
            )
