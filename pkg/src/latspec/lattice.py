"""Periodized lattice model of the nearest-neighbour walk on Z^n.

The averaging operator

    (A f)(d) = (1/2n) sum_{i=1..n} [f(d + e_i) + f(d - e_i)]

is diagonalized by the discrete Fourier transform: on the torus grid
``theta_m = 2 pi m / M`` its symbol is ``g(theta) = (1/n) sum_j cos theta_j``
with values in ``[-1, 1]``.  Every bounded function of the operator is the
convolution against the inverse DFT of the composed symbol, so kernels of
``F(A)``, walk powers ``A^k`` and wave factors ``exp(itA) A`` are all exact
on the periodic grid and approximate the infinite lattice up to the L^1
mass that leaks past the fundamental window (tracked as ``tail_mass``).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

__all__ = [
    "DEFAULT_TAIL_TOL",
    "GridSpec",
    "MultiplierFunction",
    "TorusSymbol",
    "LatticeKernel",
    "TruncationError",
    "default_grid",
    "kernel_from_values",
    "kernel_from_symbol",
    "walk_symbol",
    "apply_walk",
    "walk_power_kernel",
    "functional_calculus",
    "wave_kernel",
    "convolve",
    "bump",
    "gaussian_multiplier",
    "bochner_riesz_multiplier",
    "indicator_multiplier",
    "kernel_to_csv",
    "symbol_to_csv",
]

# Truncation certificate: the periodic kernel stands in for the Z^n one
# only while the mass in the outer half of the window stays below this.
DEFAULT_TAIL_TOL = 1e-8

# Default grid edge per dimension, sized so module-level experiments fit
# comfortably in memory while leaving decades of dynamic range.
_DEFAULT_M = {1: 4096, 2: 512, 3: 64}

_MAX_POINTS = 1 << 25


class TruncationError(RuntimeError):
    """The requested kernel does not fit in the periodic window."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform torus grid ``theta_m = 2 pi m / M`` in each of n axes."""

    n: int
    M: int

    def __post_init__(self):
        if self.n not in (1, 2, 3):
            raise ValueError(f"dimension n={self.n} not supported (want 1, 2 or 3)")
        if self.M < 8 or self.M % 2:
            raise ValueError(f"grid edge M={self.M} must be even and >= 8")
        if self.M ** self.n > _MAX_POINTS:
            raise ValueError(
                f"grid M={self.M}, n={self.n} exceeds the point budget {_MAX_POINTS}"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.n

    @property
    def size(self) -> int:
        return self.M ** self.n

    def theta_axis(self) -> np.ndarray:
        """Grid angles ``2 pi m / M`` for ``m = 0..M-1``."""
        return 2.0 * np.pi * np.arange(self.M) / self.M

    def coord_axis(self) -> np.ndarray:
        """Lattice displacements in FFT order: ``0..M/2-1, -M/2..-1``."""
        half = self.M // 2
        ax = np.arange(self.M)
        ax[half:] -= self.M
        return ax

    def coord_grids(self) -> list[np.ndarray]:
        return list(np.meshgrid(*([self.coord_axis()] * self.n), indexing="ij"))


def default_grid(n: int) -> GridSpec:
    """Per-dimension default grid used throughout the experiments."""
    if n not in _DEFAULT_M:
        raise ValueError(f"no default grid for n={n}")
    return GridSpec(n, _DEFAULT_M[n])


@dataclass(frozen=True)
class MultiplierFunction:
    """Scalar multiplier with a declared support interval.

    Evaluation is clamped to zero outside ``support`` so the declared
    support is authoritative even for tails that are merely tiny (for
    example a Gaussian window cut at eight standard deviations).
    """

    fn: Callable[[np.ndarray], np.ndarray]
    support: tuple[float, float]
    label: str = "multiplier"
    smoothness: float | None = None
    lebesgue_q: float | None = None

    def __post_init__(self):
        lo, hi = self.support
        if not (lo < hi):
            raise ValueError(f"empty support interval {self.support}")

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        lo, hi = self.support
        inside = (lam > lo) & (lam < hi)
        out = np.zeros(lam.shape, dtype=complex)
        if np.any(inside):
            out[inside] = np.asarray(self.fn(lam[inside]))
        if np.all(out.imag == 0):
            return out.real
        return out

    def dilate(self, t: float) -> "MultiplierFunction":
        """The multiplier ``lam -> F(t * lam)`` with rescaled support."""
        if t <= 0:
            raise ValueError("dilation factor must be positive")
        lo, hi = self.support
        return MultiplierFunction(
            fn=lambda lam, _t=t: self.fn(_t * lam),
            support=(lo / t, hi / t),
            label=f"{self.label}(t={t:g})",
            smoothness=self.smoothness,
            lebesgue_q=self.lebesgue_q,
        )


@dataclass(frozen=True)
class TorusSymbol:
    """Samples of a multiplier on the torus grid, FFT index order."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("symbol samples do not match the grid shape")

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def kernel(self) -> "LatticeKernel":
        return kernel_from_symbol(self.grid, self.values)


@dataclass(frozen=True)
class LatticeKernel:
    """Convolution kernel on the periodic window, FFT index order.

    ``values[d]`` is the kernel at displacement ``d`` (negative entries
    wrap, as in :meth:`GridSpec.coord_axis`).  ``tail_mass`` estimates the
    L^1 mass sitting in the outer half of the window — the truncation
    certificate for reading the kernel as one on all of Z^n.
    """

    grid: GridSpec
    values: np.ndarray
    tail_mass: float = field(default=0.0)

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise ValueError("kernel samples do not match the grid shape")

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values)))

    def l2(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2)))

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def symbol(self) -> TorusSymbol:
        return TorusSymbol(self.grid, np.fft.fftn(self.values))

    def centered(self) -> np.ndarray:
        """Values re-ordered so index ``M/2`` is displacement zero."""
        return np.fft.fftshift(self.values)

    def at(self, d: Iterable[int]) -> complex:
        idx = tuple(int(dd) % self.grid.M for dd in d)
        if len(idx) != self.grid.n:
            raise ValueError("displacement has wrong dimension")
        return complex(self.values[idx])


def _tail_mass(grid: GridSpec, values: np.ndarray) -> float:
    """L^1 mass beyond half the window radius in any axis."""
    quarter = grid.M // 4
    ax = np.abs(grid.coord_axis())
    outer = ax > quarter
    mask = np.zeros(grid.shape, dtype=bool)
    for axis in range(grid.n):
        shape = [1] * grid.n
        shape[axis] = grid.M
        mask |= outer.reshape(shape)
    return float(np.sum(np.abs(values[mask])))


def kernel_from_values(grid: GridSpec, values: np.ndarray) -> LatticeKernel:
    """Wrap raw kernel samples (FFT index order) with their tail certificate."""
    values = np.asarray(values)
    return LatticeKernel(grid, values, tail_mass=_tail_mass(grid, values))


def kernel_from_symbol(grid: GridSpec, symbol_values: np.ndarray) -> LatticeKernel:
    values = np.fft.ifftn(symbol_values)
    # real even symbols have real kernels; discard pure rounding dust only
    if np.isrealobj(symbol_values):
        scale = max(1.0, float(np.max(np.abs(values.real))))
        if float(np.max(np.abs(values.imag))) <= 1e-13 * scale:
            values = values.real
    return LatticeKernel(grid, values, tail_mass=_tail_mass(grid, values))


def walk_symbol(grid: GridSpec) -> TorusSymbol:
    """Symbol ``(1/n) sum_j cos theta_j`` of the averaging operator."""
    cos_axis = np.cos(grid.theta_axis())
    acc = np.zeros(grid.shape)
    for axis in range(grid.n):
        shape = [1] * grid.n
        shape[axis] = grid.M
        acc = acc + cos_axis.reshape(shape)
    return TorusSymbol(grid, acc / grid.n)


def apply_walk(values: np.ndarray) -> np.ndarray:
    """One step of the neighbour average, by explicit shifts (no FFT)."""
    values = np.asarray(values)
    n = values.ndim
    out = np.zeros_like(values, dtype=values.dtype)
    for axis in range(n):
        out = out + np.roll(values, 1, axis=axis) + np.roll(values, -1, axis=axis)
    return out / (2 * n)


def walk_power_kernel(grid: GridSpec, k: int, tol: float = DEFAULT_TAIL_TOL) -> LatticeKernel:
    """Kernel of the k-step walk ``A^k`` via the symbol power."""
    if k < 0:
        raise ValueError("walk power k must be >= 0")
    sym = walk_symbol(grid).values ** k
    ker = kernel_from_symbol(grid, sym)
    if ker.tail_mass > tol:
        raise TruncationError(
            f"walk power k={k} does not fit the window: tail mass "
            f"{ker.tail_mass:.3e} exceeds {tol:.1e}"
        )
    return ker


def functional_calculus(
    grid: GridSpec,
    F: Callable[[np.ndarray], np.ndarray],
    of: str = "walk",
    tol: float | None = None,
) -> LatticeKernel:
    """Kernel of ``F(A)`` (``of="walk"``) or ``F(I - A)`` (``of="one_minus_walk"``).

    ``F`` must be bounded on the sampled spectrum; non-finite samples are
    rejected.  When *tol* is given, a tail mass above it raises
    :class:`TruncationError`.
    """
    g = walk_symbol(grid).values
    if of == "walk":
        lam = g
    elif of == "one_minus_walk":
        lam = 1.0 - g
    else:
        raise ValueError(f"unknown operator selector {of!r}")
    sym = np.asarray(F(lam))
    if sym.shape != grid.shape:
        raise ValueError("multiplier evaluation changed the sample shape")
    if not np.all(np.isfinite(sym)):
        raise ValueError("multiplier is unbounded (non-finite) on the sampled spectrum")
    ker = kernel_from_symbol(grid, sym)
    if tol is not None and ker.tail_mass > tol:
        raise TruncationError(
            f"kernel tail mass {ker.tail_mass:.3e} exceeds {tol:.1e}; enlarge M"
        )
    return ker


def wave_kernel(grid: GridSpec, t: float, tol: float | None = None) -> LatticeKernel:
    """Kernel of ``exp(itA) A``; at ``t=0`` this is the walk itself."""
    g = walk_symbol(grid).values
    sym = np.exp(1j * t * g) * g
    ker = kernel_from_symbol(grid, sym)
    if tol is not None and ker.tail_mass > tol:
        raise TruncationError(
            f"wave kernel at t={t:g} leaks {ker.tail_mass:.3e} past the window"
        )
    return ker


def convolve(a: LatticeKernel, b: LatticeKernel) -> LatticeKernel:
    """Periodic convolution; composes the underlying operators."""
    if a.grid != b.grid:
        raise ValueError("kernels live on different grids")
    sym = np.fft.fftn(a.values) * np.fft.fftn(b.values)
    real = np.isrealobj(a.values) and np.isrealobj(b.values)
    vals = np.fft.ifftn(sym)
    if real:
        vals = vals.real
    return LatticeKernel(a.grid, vals, tail_mass=_tail_mass(a.grid, vals))


# --------------------------------------------------------------------------
# Stock multiplier profiles


def bump(lo: float, hi: float, label: str | None = None) -> MultiplierFunction:
    """Smooth compactly supported bump on ``(lo, hi)`` with peak value 1."""
    if not lo < hi:
        raise ValueError("bump needs lo < hi")
    mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0

    def fn(lam):
        u = (np.asarray(lam, dtype=float) - mid) / half
        out = np.zeros_like(u)
        inside = np.abs(u) < 1
        ui = u[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
        return out

    return MultiplierFunction(fn, (lo, hi), label or f"bump({lo:g},{hi:g})")


def gaussian_multiplier(center: float = 0.0, width: float = 1.0) -> MultiplierFunction:
    """Gaussian profile, support declared at eight widths."""
    if width <= 0:
        raise ValueError("width must be positive")

    def fn(lam):
        u = (np.asarray(lam, dtype=float) - center) / width
        return np.exp(-0.5 * u * u)

    return MultiplierFunction(
        fn, (center - 8.0 * width, center + 8.0 * width),
        f"gaussian({center:g},{width:g})",
    )


def bochner_riesz_multiplier(R: float, alpha: float) -> MultiplierFunction:
    """Riesz mean profile ``(1 - lam/R)_+^alpha``.

    ``alpha = 0`` is the sharp cutoff ``1_{lam < R}`` (the ``0**0`` corner
    is resolved to zero at ``lam >= R``).
    """
    if R <= 0:
        raise ValueError("R must be positive")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")

    def fn(lam):
        u = 1.0 - np.asarray(lam, dtype=float) / R
        if alpha == 0:
            return (u > 0).astype(float)
        return np.where(u > 0, u, 0.0) ** alpha

    # support in lam: everything below R (clip far left for the record)
    return MultiplierFunction(fn, (-64.0, R), f"riesz(R={R:g},a={alpha:g})")


def indicator_multiplier(lo: float, hi: float) -> MultiplierFunction:
    return MultiplierFunction(
        lambda lam: np.ones_like(np.asarray(lam, dtype=float)),
        (lo, hi), f"indicator({lo:g},{hi:g})",
    )


# --------------------------------------------------------------------------
# CSV export


def kernel_to_csv(kernel: LatticeKernel, path) -> None:
    """Write ``(d_1..d_n, re, im)`` rows, displacements in centered order."""
    grid = kernel.grid
    ax = np.sort(grid.coord_axis())
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"d{i + 1}" for i in range(grid.n)] + ["re", "im"])
        for d in _iter_tuples(ax, grid.n):
            val = kernel.at(d)
            writer.writerow([*map(int, d), repr(val.real), repr(val.imag)])


def symbol_to_csv(symbol: TorusSymbol, path) -> None:
    """Write ``(m_1..m_n, re, im)`` rows of symbol samples."""
    grid = symbol.grid
    ms = np.arange(grid.M)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"m{i + 1}" for i in range(grid.n)] + ["re", "im"])
        for m in _iter_tuples(ms, grid.n):
            val = complex(symbol.values[tuple(int(x) for x in m)])
            writer.writerow([*map(int, m), repr(val.real), repr(val.imag)])


def _iter_tuples(axis_values: np.ndarray, n: int):
    if n == 1:
        for a in axis_values:
            yield (a,)
    elif n == 2:
        for a in axis_values:
            for b in axis_values:
                yield (a, b)
    else:
        for a in axis_values:
            for b in axis_values:
                for c in axis_values:
                    yield (a, b, c)
