"""Level surfaces of the walk symbol and the spectral measure they carry.

The symbol ``G(theta) = (1/n) sum_j cos theta_j`` foliates the torus into
level sets ``{G = lam}``.  This module discretizes them (marching squares
or cubes plus per-node Newton projection), integrates oscillatory surface
measures over them, and fits every decay law the surface geometry
controls:

  * ``Gamma_lam(d)``: the convolution kernel of the spectral measure
    density, a surface integral of ``e^{i<d, theta>} / |grad G|``, with a
    flat band-average oracle as an independent cross-check,
  * ``N(lam)``: the total weighted measure in rescaled coordinates
    ``theta / sqrt(1 - lam)``, growing like ``(1 - lam)^{-1/2}``,
  * Gaussian curvature of the rescaled surface (bordered Hessian vs the
    closed product form) with its positive lower bound near the top,
  * Fourier decay of the rescaled probability measure and the ball-growth
    hypothesis behind the restriction estimates,
  * ``sup_d |Gamma_lam(d)|`` decay along a ladder toward the spectral
    top, and the restriction-type ``L^1 -> L^2`` rate in the walk power.

Everything n=1 is excluded: the "surface" degenerates to point pairs with
no curvature to speak of.  Coordinates near the spectral endpoints use a
tight box around the extremal point (the surface there has diameter
``~ 2 sqrt(2n(1 - |lam|))``), so resolution follows the feature size.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from skimage.measure import find_contours, marching_cubes

from .fitting import DecayFit, envelope_bins, power_fit
from .lattice import GridSpec, MultiplierFunction, walk_symbol

__all__ = [
    "LevelSurface",
    "SpectralSlice",
    "critical_values",
    "extract_surface",
    "gamma_lambda",
    "band_average",
    "n_lambda",
    "n_lambda_fit",
    "curvature",
    "curvature_closed_form",
    "mu_fourier_decay",
    "ball_growth_check",
    "spectral_norm_decay",
    "restriction_ST_check",
    "density_of_states_check",
    "surface_to_csv",
]

_DEFAULT_RESOLUTION = {2: 1024, 3: 64}
_LEVEL_TOL = 1e-10


def critical_values(n: int) -> list[float]:
    """Values of G at its critical points: (n - 2m)/n for m sign flips."""
    return [(n - 2 * m) / n for m in range(n + 1)]


def _G(points: np.ndarray) -> np.ndarray:
    """Symbol at points of shape (..., n)."""
    return np.cos(points).mean(axis=-1)


def _grad_G(points: np.ndarray) -> np.ndarray:
    return -np.sin(points) / points.shape[-1]


def _newton_project(points: np.ndarray, lam: float, tol: float = 1e-12,
                    max_iter: int = 60) -> np.ndarray:
    """Pull points onto {G = lam} along the gradient flow."""
    pts = np.array(points, dtype=float)
    for _ in range(max_iter):
        res = _G(pts) - lam
        if np.all(np.abs(res) <= tol):
            break
        grad = _grad_G(pts)
        gg = (grad**2).sum(axis=-1)
        gg = np.where(gg > 1e-30, gg, 1.0)
        pts = pts - (res / gg)[..., None] * grad
    return pts


def _domain_axes(n: int, lam: float, resolution: int):
    """Per-axis sample points: full torus, or a tight box near the ends.

    The surface satisfies ``cos theta_j >= n lam - (n - 1)`` coordinatewise
    (for lam > 0; mirrored at pi for lam < 0), so the box is exact up to
    the safety margin.
    """
    reach = abs(lam) * n - (n - 1)
    if reach <= -1.0 + 1e-12:
        half, center = math.pi, 0.0
    else:
        half = min(math.acos(max(reach, -1.0)) * 1.05 + 1e-3, math.pi)
        center = 0.0 if lam >= 0 else math.pi
    axes = [np.linspace(center - half, center + half, resolution + 1)] * n
    return axes, 2 * half / resolution


@dataclass(frozen=True)
class LevelSurface:
    """Discretized level set {G = lam} with per-element quadrature data.

    ``nodes`` are projected element midpoints (or centroids), ``areas``
    the element measures, ``grad_norms`` the |grad G| weights evaluated
    at the *torus-coordinate* image of each node.  In rescaled mode the
    nodes live in ``theta / sqrt(1 - lam)`` coordinates and the areas
    carry the matching ``(1 - lam)^{-(n-1)/2}`` factor, which is exactly
    the measure whose total weighted mass is N(lam).
    """

    n: int
    lam: float
    resolution: int
    rescaled: bool
    nodes: np.ndarray
    areas: np.ndarray
    grad_norms: np.ndarray
    level_residual: float

    def __post_init__(self):
        if self.areas.size == 0:
            raise ValueError("empty surface discretization")
        if self.level_residual > _LEVEL_TOL:
            raise ValueError(
                f"projection left |G - lam| = {self.level_residual:g} "
                f"above tolerance {_LEVEL_TOL:g}"
            )
        if self.total_measure() <= 0:
            raise ValueError("surface has nonpositive total measure")

    @property
    def n_elements(self) -> int:
        return int(self.areas.size)

    @property
    def scale(self) -> float:
        """Rescaling factor sqrt(1 - lam)."""
        return math.sqrt(1.0 - self.lam)

    def torus_nodes(self) -> np.ndarray:
        return self.nodes * self.scale if self.rescaled else self.nodes

    def total_measure(self) -> float:
        return float(self.areas.sum())

    def weighted_measure(self) -> float:
        return float((self.areas / self.grad_norms).sum())

    def max_element_size(self) -> float:
        if self.n == 2:
            return float(self.areas.max())
        return float(math.sqrt(self.areas.max() * 4.0 / math.sqrt(3.0)))

    def refine(self, factor: int = 2) -> "LevelSurface":
        return extract_surface(
            self.n, self.lam, self.resolution * factor, rescaled=self.rescaled
        )


def _extract_2d(lam: float, resolution: int):
    axes, h = _domain_axes(2, lam, resolution)
    t0, t1 = np.meshgrid(axes[0], axes[1], indexing="ij")
    values = (np.cos(t0) + np.cos(t1)) / 2.0
    segments = []
    for contour in find_contours(values, lam):
        pts = np.column_stack(
            [np.interp(contour[:, 0], np.arange(axes[0].size), axes[0]),
             np.interp(contour[:, 1], np.arange(axes[1].size), axes[1])]
        )
        if pts.shape[0] >= 2:
            segments.append(pts)
    if not segments:
        raise ValueError(f"level set {lam} not found in the sampled window")
    nodes, areas = [], []
    for pts in segments:
        proj = _newton_project(pts, lam)
        lengths = np.linalg.norm(np.diff(proj, axis=0), axis=1)
        keep = lengths > 1e-15
        mids = _newton_project((proj[:-1] + proj[1:])[keep] / 2.0, lam)
        nodes.append(mids)
        areas.append(lengths[keep])
    return np.concatenate(nodes), np.concatenate(areas)


def _extract_3d(lam: float, resolution: int):
    axes, h = _domain_axes(3, lam, resolution)
    t = np.meshgrid(*axes, indexing="ij")
    values = (np.cos(t[0]) + np.cos(t[1]) + np.cos(t[2])) / 3.0
    verts, faces, _, _ = marching_cubes(values, level=lam, spacing=(h, h, h))
    verts = verts + np.array([axes[0][0], axes[1][0], axes[2][0]])
    verts = _newton_project(verts, lam)
    tri = verts[faces]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    areas = 0.5 * np.linalg.norm(cross, axis=1)
    keep = areas > 1e-18
    mids = _newton_project(tri[keep].mean(axis=1), lam)
    return mids, areas[keep]


def extract_surface(
    n: int,
    lam: float,
    resolution: int | None = None,
    rescaled: bool = False,
) -> LevelSurface:
    """Discretize {G = lam} with a watertight refinement-stable quadrature.

    Rejects the spectral endpoints (the only critical values where the
    level set degenerates to a point) and anything too close to them for
    the floating-point window to resolve.  Interior critical values are
    saddles: the level set stays one-codimensional and is extracted as
    usual, though 1/|grad G| weights blow up logarithmically there.
    """
    if n not in (2, 3):
        raise ValueError("level surfaces are defined for n in {2, 3}")
    if abs(lam) >= 1.0:
        raise ValueError(
            f"lam={lam} is at or beyond the spectral endpoint "
            f"{'1' if lam > 0 else '-1'} where the surface degenerates"
        )
    if 1.0 - abs(lam) < 1e-9:
        offending = 1.0 if lam > 0 else -1.0
        raise ValueError(
            f"lam={lam} too close to the critical value {offending}: "
            "the surface is below floating-point resolution"
        )
    if resolution is None:
        resolution = _DEFAULT_RESOLUTION[n]
    nodes, areas = (_extract_2d if n == 2 else _extract_3d)(lam, resolution)
    grad_norms = np.linalg.norm(_grad_G(nodes), axis=-1)
    residual = float(np.abs(_G(nodes) - lam).max())
    if rescaled:
        s = math.sqrt(1.0 - lam)
        nodes = nodes / s
        areas = areas / s ** (n - 1)
    return LevelSurface(
        n=n, lam=lam, resolution=resolution, rescaled=rescaled,
        nodes=nodes, areas=areas, grad_norms=grad_norms,
        level_residual=residual,
    )


# ---------------------------------------------------------------------------
# spectral measure density


@dataclass(frozen=True)
class DisplacementWindow:
    """Kernel values on the displacement box |d|_inf <= W, FFT index order."""

    n: int
    W: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (2 * self.W + 1,) * self.n:
            raise ValueError("window values do not match (2W+1)^n")

    def at(self, d) -> float:
        idx = tuple(int(x) % (2 * self.W + 1) for x in d)
        if len(idx) != self.n or any(abs(int(x)) > self.W for x in d):
            raise ValueError(f"displacement {d} outside the |d|_inf <= {self.W} window")
        return float(self.values[idx])

    def sup(self) -> float:
        return float(np.abs(self.values).max())


def _window_displacements(n: int, W: int) -> np.ndarray:
    axis = np.r_[0 : W + 1, -W : 0].astype(float)
    grids = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


@dataclass(frozen=True)
class SpectralSlice:
    """Gamma_lam on a displacement window, with its normalization N(lam)."""

    lam: float
    window: DisplacementWindow
    n_lambda: float
    method: str                 # "surface quadrature" | "band average"
    extras: dict = field(default_factory=dict)

    def at(self, d) -> float:
        return self.window.at(d)

    def sup(self) -> float:
        return self.window.sup()

    def symmetry_defect(self) -> float:
        """Worst deviation under d -> -d and coordinate permutation."""
        vals = self.window.values
        worst = 0.0
        for ax in range(self.window.n):
            flipped = np.take(vals, (-np.arange(vals.shape[ax])) % vals.shape[ax], axis=ax)
            worst = max(worst, float(np.abs(vals - flipped).max()))
        axes = list(range(vals.ndim))
        worst = max(worst, float(np.abs(vals - vals.transpose(axes[::-1])).max()))
        return worst


def _window_values(surface: LevelSurface, W: int) -> np.ndarray:
    """Quadrature of the oscillatory integral on the |d|_inf <= W window."""
    dvecs = _window_displacements(surface.n, W)
    weights = surface.areas / surface.grad_norms
    nodes = surface.torus_nodes()
    out = np.empty(dvecs.shape[0], dtype=complex)
    chunk = max(1, int(2e7) // max(nodes.shape[0], 1))
    for start in range(0, dvecs.shape[0], chunk):
        block = dvecs[start:start + chunk]
        phases = nodes @ block.T
        out[start:start + chunk] = (weights[:, None] * np.exp(1j * phases)).sum(axis=0)
    return out.reshape((2 * W + 1,) * surface.n) / (2.0 * math.pi) ** surface.n


def gamma_lambda(surface: LevelSurface, W: int = 8, cross_check: bool = True) -> SpectralSlice:
    """Spectral-measure kernel Gamma_lam(d) for |d|_inf <= W.

    Midpoint quadrature of ``e^{i<d,theta>}/|grad G|`` over the surface;
    elements must resolve the fastest oscillation (>= 8 nodes per period
    at |d| = W), so the surface is refined as needed.  The same integral
    on a 2x refinement provides the convergence estimate: relative
    disagreement beyond 1% of Gamma(0) sets ``extras["flagged"]``.
    """
    if surface.rescaled:
        raise ValueError("gamma_lambda integrates the torus-coordinate surface")
    target = 2.0 * math.pi / (8 * W + 1)
    while surface.max_element_size() > target:
        surface = surface.refine()
    coarse = _window_values(surface, W)
    extras = {"resolution": surface.resolution, "imag_max": float(np.abs(coarse.imag).max())}
    values = coarse
    if cross_check:
        fine = _window_values(surface.refine(), W)
        scale = float(np.abs(fine[(0,) * surface.n]))
        disagreement = float(np.abs(fine - coarse).max()) / scale
        extras["disagreement"] = disagreement
        extras["flagged"] = disagreement > 0.01
        values = fine
    s = math.sqrt(1.0 - surface.lam)
    n_lam = surface.weighted_measure() / s ** (surface.n - 1)
    window = DisplacementWindow(surface.n, W, values.real)
    return SpectralSlice(
        lam=surface.lam, window=window, n_lambda=n_lam,
        method="surface quadrature", extras=extras,
    )


def band_average(
    n: int,
    lam: float,
    delta: float,
    M: int = 1024,
    W: int = 8,
    min_count: int = 1000,
) -> SpectralSlice:
    """Gamma_lam via the flat average of the band projector E(lam +- delta/2).

    Counts symbol samples in the band and inverse-transforms the sharp
    band indicator; exact on the grid, no surface involved, which makes
    it an independent oracle for :func:`gamma_lambda`.  At d = 0 the
    value is the counting identity (#band samples) / M^n / delta.
    """
    grid = GridSpec(n, M)
    symbol = walk_symbol(grid).values
    mask = (symbol > lam - delta / 2.0) & (symbol <= lam + delta / 2.0)
    count = int(np.count_nonzero(mask))
    if count == 0:
        raise ValueError(f"empty band around lam={lam} with delta={delta}")
    if count < min_count:
        raise ValueError(
            f"only {count} symbol samples in the band (need >= {min_count}); "
            "widen delta or raise M"
        )
    full = np.fft.ifftn(mask.astype(float)) / delta
    take = np.r_[0 : W + 1, M - W : M]
    window = full[np.ix_(*([take] * n))].real
    s = math.sqrt(1.0 - lam)
    val0 = float(window[(0,) * n])
    return SpectralSlice(
        lam=lam, window=DisplacementWindow(n, W, window),
        n_lambda=val0 * (2.0 * math.pi) ** n / s ** (n - 1),
        method="band average",
        extras={"count": count, "M": M, "delta": delta},
    )


def density_of_states_check(n: int, order: int = 32, resolution: int | None = None) -> dict:
    """Integrate lam -> Gamma_lam(0) over the spectrum; the result is 1.

    Gauss-Legendre on (-1, 0) and (0, 1) separately (the integrand has a
    logarithmic van Hove spike at the interior critical values, so the
    panels keep nodes off lam = 0).
    """
    if resolution is None:
        resolution = 512 if n == 2 else 48
    x, w = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for lo, hi in ((-1.0, 0.0), (0.0, 1.0)):
        lams = (hi - lo) / 2.0 * x + (hi + lo) / 2.0
        for lam, weight in zip(lams, (hi - lo) / 2.0 * w):
            surf = extract_surface(n, float(lam), resolution)
            total += weight * surf.weighted_measure() / (2.0 * math.pi) ** n
    return {"integral": total, "deviation": abs(total - 1.0), "order": order}


# ---------------------------------------------------------------------------
# N(lam), curvature and the rescaled measure


def _require_top_window(lam: float, n: int, what: str) -> None:
    if not (1.0 - 1.0 / n < lam < 1.0):
        raise ValueError(f"{what} needs lam in (1 - 1/n, 1); got {lam}")


def n_lambda(surface: LevelSurface) -> float:
    """Total weighted measure of the rescaled surface: N(lam)."""
    _require_top_window(surface.lam, surface.n, "N(lam)")
    if not surface.rescaled:
        surface = extract_surface(surface.n, surface.lam, surface.resolution, rescaled=True)
    return surface.weighted_measure()


def n_lambda_fit(n: int, j_values=range(3, 9), resolution: int | None = None) -> DecayFit:
    """Fit N(lam) against (1 - lam) along lam_j = 1 - 2^-j / n."""
    js = list(j_values)
    if len(js) < 3:
        raise ValueError("need at least 3 ladder points")
    lams = [1.0 - 2.0 ** (-j) / n for j in js]
    if any(not 1.0 - 1.0 / n < lam < 1.0 for lam in lams):
        raise ValueError("ladder leaves the window (1 - 1/n, 1)")
    gaps, values = [], []
    for lam in lams:
        surf = extract_surface(n, lam, resolution, rescaled=True)
        gaps.append(1.0 - lam)
        values.append(surf.weighted_measure())
    fit = power_fit(gaps, values, "N(lam) growth")
    fit = DecayFit(
        exponent=fit.exponent, constant=fit.constant,
        rms_residual=fit.rms_residual, n_points=fit.n_points,
        x_min=fit.x_min, x_max=fit.x_max, label=fit.label,
        extras={"gaps": gaps, "values": values},
    )
    return fit.judged(-0.5, 0.1, "abs")


def _curvature_ingredients(surface: LevelSurface):
    if not surface.rescaled:
        raise ValueError("curvature is defined on the rescaled surface")
    _require_top_window(surface.lam, surface.n, "curvature")
    s = surface.scale
    n = surface.n
    theta = surface.nodes * s          # torus coordinates
    grad = -(s / n) * np.sin(theta)    # gradient of G(s .)
    hess_diag = -(s * s / n) * np.cos(theta)
    gnorm = np.linalg.norm(grad, axis=1)
    if np.any(gnorm < 1e-12):
        raise ValueError("singular node: |grad| below 1e-12 on the rescaled surface")
    return grad, hess_diag, gnorm


def curvature(surface: LevelSurface) -> np.ndarray:
    """Gaussian curvature at every node via the bordered Hessian.

    ``K = -det([[H, g], [g^T, 0]]) / |g|^(n+1)`` assembled and evaluated
    as a literal determinant per node.
    """
    grad, hess_diag, gnorm = _curvature_ingredients(surface)
    K_nodes = grad.shape[0]
    n = surface.n
    bordered = np.zeros((K_nodes, n + 1, n + 1))
    idx = np.arange(n)
    bordered[:, idx, idx] = hess_diag
    bordered[:, :n, n] = grad
    bordered[:, n, :n] = grad
    return -np.linalg.det(bordered) / gnorm ** (n + 1)


def curvature_closed_form(surface: LevelSurface) -> np.ndarray:
    """The same curvature from the explicit cofactor expansion.

    For a diagonal Hessian the bordered determinant collapses to
    ``-sum_j g_j^2 prod_{k != j} H_kk``: products of the remaining
    cosine factors against the squared sine gradient entries.
    """
    grad, hess_diag, gnorm = _curvature_ingredients(surface)
    total = np.zeros(grad.shape[0])
    for j in range(surface.n):
        prod = np.ones(grad.shape[0])
        for k in range(surface.n):
            if k != j:
                prod = prod * hess_diag[:, k]
        total += grad[:, j] ** 2 * prod
    return total / gnorm ** (surface.n + 1)


def mu_fourier_decay(
    surface: LevelSurface,
    xi_max: float = 1000.0,
    n_rays: int = 8,
    per_decade: int = 8,
    drop_tol: float = 0.1,
) -> DecayFit:
    """Decay exponent of the rescaled measure's Fourier transform.

    ``mu_lam`` weights each element by ``area / (|grad G| N(lam))`` so
    ``mu_hat(0) = 1``.  Samples along *n_rays* directions at geometric
    radii up to *xi_max*; each sample is validated against a 2x surface
    refinement and dropped (reported, not failed) when the two quadratures
    disagree by more than *drop_tol* relatively -- the midpoint rule has
    simply run out of nodes per period there.
    """
    _require_top_window(surface.lam, surface.n, "mu_lam decay")
    if not surface.rescaled:
        raise ValueError("mu_lam lives on the rescaled surface")
    fine = surface.refine()

    def mu_hat(surf: LevelSurface, xi: np.ndarray) -> np.ndarray:
        w = surf.areas / surf.grad_norms
        w = w / w.sum()
        return (w[:, None] * np.exp(1j * surf.nodes @ xi.T)).sum(axis=0)

    if surface.n == 2:
        angles = (np.arange(n_rays) + 0.5) * math.pi / n_rays
        dirs = np.column_stack([np.cos(angles), np.sin(angles)])
    else:
        golden = math.pi * (3.0 - math.sqrt(5.0))
        z = np.linspace(1.0 - 0.5 / n_rays, -1.0 + 0.5 / n_rays, n_rays)
        rho = np.sqrt(1.0 - z * z)
        ang = golden * np.arange(n_rays)
        dirs = np.column_stack([rho * np.cos(ang), rho * np.sin(ang), z])
    n_radii = max(4, int(per_decade * math.log10(xi_max)))
    radii = np.geomspace(1.0, xi_max, n_radii)
    xi = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, surface.n)
    coarse_vals = np.abs(mu_hat(surface, xi))
    fine_vals = np.abs(mu_hat(fine, xi))
    rel = np.abs(coarse_vals - fine_vals) / np.maximum(fine_vals, 1e-300)
    usable = rel <= drop_tol
    r_flat = np.repeat(radii, n_rays)
    if usable.sum() < 8:
        raise ValueError("quadrature validated on fewer than 8 samples; refine")
    xb, yb = envelope_bins(r_flat[usable], fine_vals[usable], ratio=2.0, x0=1.0)
    pos = yb > 0
    fit = power_fit(xb[pos], yb[pos], "mu_hat decay along rays")
    dropped = int((~usable).sum())
    fit = DecayFit(
        exponent=fit.exponent, constant=fit.constant,
        rms_residual=fit.rms_residual, n_points=fit.n_points,
        x_min=fit.x_min, x_max=fit.x_max, label=fit.label,
        extras={
            "dropped_samples": dropped,
            "usable_xi_max": float(r_flat[usable].max()),
            "mu_hat_at_zero": float(np.abs(mu_hat(fine, np.zeros((1, surface.n))))[0]),
            "envelope_xi": [float(v) for v in xb[pos]],
            "envelope_value": [float(v) for v in yb[pos]],
        },
    )
    return fit.judged(-(surface.n - 1) / 2.0, 0.1, "le")


def ball_growth_check(
    surface: LevelSurface,
    n_balls: int = 200,
    r_range: tuple[float, float] = (0.1, 1.0),
    seed: int = 0,
) -> dict:
    """Measure of rescaled-surface balls vs r^(n-1) over random centers.

    Returns the sup constant ``M1 = sup mu(B(x, r)) / r^(n-1)`` and the
    pooled log-log growth exponent (short-range dimension of mu).
    """
    _require_top_window(surface.lam, surface.n, "ball growth")
    if not surface.rescaled:
        raise ValueError("ball growth lives on the rescaled surface")
    rng = np.random.default_rng(seed)
    w = surface.areas / surface.grad_norms
    w = w / w.sum()
    centers = surface.nodes[rng.choice(surface.nodes.shape[0], n_balls)]
    radii = np.exp(rng.uniform(math.log(r_range[0]), math.log(r_range[1]), n_balls))
    masses = np.empty(n_balls)
    for i in range(n_balls):
        inside = np.linalg.norm(surface.nodes - centers[i], axis=1) <= radii[i]
        masses[i] = w[inside].sum()
    ratios = masses / radii ** (surface.n - 1)
    keep = masses > 0
    fit = power_fit(radii[keep], masses[keep], "ball mass growth")
    return {
        "M1": float(ratios.max()),
        "exponent": fit.exponent,
        "n_balls": n_balls,
        "r_range": r_range,
    }


# ---------------------------------------------------------------------------
# decay of the spectral measure and the restriction rate


def spectral_norm_decay(
    n: int,
    p: float = 1.0,
    j_values=range(3, 9),
    W: int = 8,
    resolution: int | None = None,
) -> DecayFit:
    """Decay of ||dE(lam)||_{p -> p'} along the ladder lam = 1 - 2^-j/n.

    At p = 1 the norm is exactly ``sup_d |Gamma_lam(d)|`` (convolution
    with a bounded kernel); the fitted exponent in (1 - lam) is graded
    against ``n(1/p - 1/p')/2 - 1``.  Intermediate p reports the
    window-truncated Young bound, tagged as an upper bound only.
    """
    js = list(j_values)
    if len(js) < 5:
        raise ValueError("ladder too short: need at least 5 points")
    max_p = (2.0 * n + 2.0) / (n + 3.0)
    if not (p == 1.0 or 1.0 < p < max_p):
        raise ValueError(f"p must be 1 or inside (1, {max_p:g})")
    gaps, values, sup_at_zero = [], [], []
    for j in js:
        lam = 1.0 - 2.0 ** (-j) / n
        slc = gamma_lambda(extract_surface(n, lam, resolution), W)
        vals = np.abs(slc.window.values)
        if p == 1.0:
            y = float(vals.max())
        else:
            r = 1.0 / (2.0 - 2.0 / p)
            y = float((vals**r).sum() ** (1.0 / r))
        gaps.append(2.0 ** (-j) / n)
        values.append(y)
        sup_at_zero.append(bool(vals.max() == vals[(0,) * n]))
    target = n * (1.0 / p - (1.0 - 1.0 / p)) / 2.0 - 1.0
    fit = power_fit(gaps, values, f"||dE||_{{{p:g}->dual}} decay")
    fit = DecayFit(
        exponent=fit.exponent, constant=fit.constant,
        rms_residual=fit.rms_residual, n_points=fit.n_points,
        x_min=fit.x_min, x_max=fit.x_max, label=fit.label,
        extras={
            "sup_attained_at_origin": sup_at_zero,
            "exact": p == 1.0,
            "bound_type": "exact sup|Gamma|" if p == 1.0 else "window Young upper bound",
            "gaps": gaps,
            "norms": values,
        },
    )
    if p == 1.0:
        return fit.judged(target, 0.15, "abs")
    return fit.judged(target, 0.15, "ge")


def restriction_ST_check(
    n: int,
    F: MultiplierFunction,
    k_values=(8, 16, 32, 64, 128, 256, 512),
    M: int | None = None,
    slack: float = 0.15,
) -> DecayFit:
    """Decay rate of ``||F(A^k) A^k||_{1->2}^2`` in the walk power k.

    The operator is a Fourier multiplier with symbol ``F(G^k) G^k``, so
    the squared norm is the Parseval mean of the squared symbol -- exact
    on the grid.  F must live strictly inside (1 - 1/n, 1): the symbol
    then localizes to a shell of measure ~ k^{-n/2} near the spectral
    top, which is the rate being fitted.  ``extras["st_normalized"]``
    carries the k^{n/4}-weighted norms whose flatness is the ST
    condition itself.
    """
    if n < 2:
        raise ValueError("restriction checks need n >= 2")
    lo, hi = F.support
    if not (1.0 - 1.0 / n <= lo < hi <= 1.0):
        raise ValueError(
            f"multiplier support {F.support} must sit inside (1 - 1/{n}, 1)"
        )
    ks = sorted(int(k) for k in k_values)
    if len(ks) < 4 or ks[0] < 1 or ks[-1] < 8 * ks[0]:
        raise ValueError("need >= 4 walk powers spanning a factor of 8")
    if M is None:
        M = 1024 if n == 2 else 128
    grid = GridSpec(n, M)
    symbol = walk_symbol(grid).values
    norms_sq = []
    for k in ks:
        powered = symbol**k
        op_symbol = F(powered) * powered
        norms_sq.append(float(np.mean(np.abs(op_symbol) ** 2)))
    if not any(v > 0 for v in norms_sq):
        return DecayFit(
            exponent=-math.inf, constant=0.0, rms_residual=0.0,
            n_points=0, x_min=float(ks[0]), x_max=float(ks[-1]),
            target=-n / 2.0, slack=slack, passed=True,
            label="restriction rate (zero operator)", extras={"zero": True},
        )
    fit = power_fit(ks, norms_sq, "restriction L1->L2 squared rate")
    st_normalized = [
        math.sqrt(v) * k ** (n / 4.0) for k, v in zip(ks, norms_sq)
    ]
    fit = DecayFit(
        exponent=fit.exponent, constant=fit.constant,
        rms_residual=fit.rms_residual, n_points=fit.n_points,
        x_min=fit.x_min, x_max=fit.x_max, label=fit.label,
        extras={
            "st_normalized": st_normalized,
            "st_max_over_median": float(max(st_normalized) / np.median(st_normalized)),
            "k_values": [float(k) for k in ks],
            "norms_sq": [float(v) for v in norms_sq],
        },
    )
    return fit.judged(-n / 2.0, slack, "le")


def surface_to_csv(surface: LevelSurface, path) -> None:
    """Rows (element, node coordinates, area, grad norm, curvature)."""
    K = None
    if surface.rescaled and 1.0 - 1.0 / surface.n < surface.lam < 1.0:
        K = curvature(surface)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = ["element"]
        header += [f"theta_{ax}" for ax in range(surface.n)]
        header += ["area", "grad_norm", "curvature"]
        writer.writerow(header)
        for i in range(surface.n_elements):
            row = [i]
            row += [repr(float(c)) for c in surface.nodes[i]]
            row += [repr(float(surface.areas[i])), repr(float(surface.grad_norms[i]))]
            row.append(repr(float(K[i])) if K is not None else "")
            writer.writerow(row)
