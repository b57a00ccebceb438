"""Function-side calculus for multipliers on the real line plus the
operator-side commutator machinery.

Contents:

  * Sobolev norms ``H^s`` and ``W^{s,q}`` via the Bessel multiplier
    ``(1 + xi^2)^{s/2}`` on an oversampled DFT grid,
  * smooth dyadic (Littlewood-Paley style) decomposition of a multiplier
    into frequency-band pieces that telescope back to the original,
  * amalgam norms over a partition,
  * near/far diagonal splitting of a dense operator at a given scale,
  * iterated commutators with distance weights, the integer coefficient
    table Gamma(kappa, m) with its exchange identity, and the Duhamel
    integral formula for ``[eta, exp(itT)]``.

All dense-matrix checks are validation-sized (dimension <= 64 or so);
they exist to certify identities, not to scale.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Partition
from .lattice import MultiplierFunction

__all__ = [
    "AliasingWarning",
    "AmalgamParams",
    "DyadicDecomposition",
    "sobolev_H",
    "sobolev_W",
    "dyadic_pieces",
    "phi_bump",
    "amalgam_norm",
    "diag_split",
    "multi_commutator",
    "gamma_table",
    "commutator_identity_check",
    "duhamel_check",
    "decomposition_to_csv",
]


class AliasingWarning(UserWarning):
    """Spectral tail of a sampled multiplier is not negligible."""


# --------------------------------------------------------------------------
# sampling helpers


def _sample_window(F: MultiplierFunction, oversample: int = 1):
    """Sample F on a symmetric grid extending 8x beyond its support.

    Returns ``(x, values, xi)`` where ``xi`` are the DFT angular
    frequencies.  The window is wide enough that periodization error is
    negligible for profiles that actually live on their declared support,
    and fine enough (>= 512 samples across the support) that the spectral
    tail of a smooth profile sits below the aliasing threshold.
    """
    lo, hi = F.support
    center = 0.5 * (lo + hi)
    half = max(0.5 * (hi - lo), 1e-3)
    span = 8.0 * half
    width = hi - lo
    n = 1 << 12
    while (2.0 * span) / n > width / 512 and n < (1 << 22):
        n <<= 1
    n = min(n << max(0, oversample - 1), 1 << 22)
    x = center + np.linspace(-span, span, n, endpoint=False)
    vals = np.asarray(F(x), dtype=complex)
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=(2.0 * span) / n)
    return x, vals, xi


def _check_aliasing(spectrum: np.ndarray, what: str) -> None:
    """Warn when the top decade of frequencies carries over 1% of the norm."""
    power = np.abs(spectrum) ** 2
    total = power.sum()
    if total == 0:
        return
    n = power.size
    # FFT order: the largest |frequency| entries sit around index n/2
    hi_band = power[int(0.45 * n): int(0.55 * n)].sum()
    if hi_band > 1e-4 * total:
        warnings.warn(
            f"{what}: spectral tail holds {np.sqrt(hi_band / total):.2%} of the "
            "norm; samples may be aliased",
            AliasingWarning,
            stacklevel=3,
        )


# --------------------------------------------------------------------------
# Sobolev norms


def sobolev_H(F: MultiplierFunction, s: float) -> float:
    """Sobolev norm ``|| (I - d^2/dx^2)^{s/2} F ||_2``.

    Realized through the weight ``(1 + xi^2)^s`` on the DFT grid; ``s = 0``
    reduces to the plain L^2 norm.
    """
    if s < 0:
        raise ValueError("smoothness s must be >= 0")
    x, vals, xi = _sample_window(F)
    h = x[1] - x[0]
    spec = np.fft.fft(vals) * h
    _check_aliasing(spec, "sobolev_H")
    weight = (1.0 + xi * xi) ** s
    dxi = 2.0 * np.pi / (h * vals.size)
    total = np.sum(weight * np.abs(spec) ** 2) * dxi / (2.0 * np.pi)
    return float(np.sqrt(total.real))


def sobolev_W(F: MultiplierFunction, s: float, q: float) -> float:
    """``L^q`` norm of the Bessel-potential derivative of order *s*."""
    if s < 0:
        raise ValueError("smoothness s must be >= 0")
    if q < 1:
        raise ValueError("q must be >= 1")
    x, vals, xi = _sample_window(F)
    h = x[1] - x[0]
    spec = np.fft.fft(vals)
    _check_aliasing(spec, "sobolev_W")
    deriv = np.fft.ifft(spec * (1.0 + xi * xi) ** (s / 2.0))
    mags = np.abs(deriv)
    if np.isinf(q):
        return float(mags.max())
    return float((np.sum(mags ** q) * h) ** (1.0 / q))


# --------------------------------------------------------------------------
# dyadic decomposition


def _mollifier(u: np.ndarray) -> np.ndarray:
    """exp(-1/u) for u > 0, zero otherwise; the C^infinity cutoff seed."""
    out = np.zeros_like(u)
    pos = u > 0
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def phi_bump(xi) -> np.ndarray:
    """Smooth bump supported in ``{1/4 <= |xi| <= 1}`` normalized so the
    dyadic dilates ``phi(2^{-l} xi)`` sum to 1 for every ``xi != 0``.

    Built from ``exp(-1/u)`` mollifiers; the normalizing denominator is
    the dilation-invariant sum over the (at most two) dyadic levels whose
    band contains ``xi``, and is bounded below by about ``e^-6.2``.
    """
    axi = np.abs(np.asarray(xi, dtype=float))
    out = np.zeros_like(axi)
    pos = axi > 0
    if not np.any(pos):
        return out

    def h(u):
        return _mollifier(u - 0.25) * _mollifier(1.0 - u)

    a = axi[pos]
    num = h(a)
    den = np.zeros_like(a)
    base = np.floor(np.log2(a))
    for off in (0.0, 1.0, 2.0):
        den += h(a / np.exp2(base + off))
    out[pos] = num / den
    return out


@dataclass(frozen=True)
class DyadicDecomposition:
    """Frequency-band pieces of a multiplier on a shared sample grid.

    Row 0 of ``pieces`` is the low band (the complement of the dilated
    bumps, DFT support ``|xi| <= 1``); row ``l >= 1`` carries the band
    ``2^{l-2} <= |xi| <= 2^l``.  ``bump_fn`` records which bump built the
    decomposition so alternates can be swapped in.
    """

    x: np.ndarray
    original: np.ndarray
    pieces: np.ndarray          # shape (L+1, len(x)); row 0 is the low band
    level: int
    residual: float             # sup |F - sum of pieces| on the grid
    bump_fn: Callable = field(default=None, repr=False, compare=False)

    def reconstruction(self) -> np.ndarray:
        return self.pieces.sum(axis=0)


def dyadic_pieces(
    F: MultiplierFunction,
    L: int,
    residual_tol: float = 1e-6,
    bump_fn: Callable = phi_bump,
) -> DyadicDecomposition:
    """Split F into a low-frequency piece and L dyadic band pieces.

    Piece ``l >= 1`` carries the frequency band ``2^{l-2} <= |xi| <= 2^l``;
    piece 0 carries everything below 1/2.  A reconstruction residual above
    *residual_tol* is flagged with a warning (L too small), not an error.
    """
    if L < 1:
        raise ValueError("need at least one dyadic level")
    x, vals, xi = _sample_window(F, oversample=3)
    spec = np.fft.fft(vals)
    low = np.ones_like(xi)
    rows = []
    for ell in range(1, L + 1):
        w = bump_fn(xi / 2.0 ** ell)
        low = low - w
        rows.append(np.fft.ifft(spec * w))
    rows.insert(0, np.fft.ifft(spec * low))
    pieces = np.asarray(rows)
    recon = pieces.sum(axis=0)
    residual = float(np.max(np.abs(recon - vals)))
    if residual > residual_tol:
        warnings.warn(
            f"dyadic truncation level L={L} leaves residual {residual:.2e}",
            stacklevel=2,
        )
    return DyadicDecomposition(
        x=x, original=vals, pieces=pieces, level=L, residual=residual,
        bump_fn=bump_fn,
    )


def decomposition_to_csv(dec: DyadicDecomposition, path) -> None:
    """Rows ``(level, lambda, piece_re, piece_im)``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "lambda", "piece_re", "piece_im"])
        for ell in range(dec.pieces.shape[0]):
            for xval, pval in zip(dec.x, dec.pieces[ell]):
                writer.writerow(
                    [ell, repr(float(xval)), repr(float(pval.real)), repr(float(pval.imag))]
                )


# --------------------------------------------------------------------------
# amalgam norms


@dataclass(frozen=True)
class AmalgamParams:
    """Exponent pair and partition scale for an amalgam norm."""

    p: float
    q: float
    partition: Partition
    tau: float | None = None

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ValueError("amalgam exponents must satisfy 1 <= p, q <= inf")
        if self.tau is None:
            object.__setattr__(self, "tau", float(self.partition.r))
        elif self.tau != self.partition.r:
            raise ValueError(
                f"scale tau={self.tau} does not match the partition scale "
                f"{self.partition.r}"
            )


def amalgam_norm(f: np.ndarray, params: AmalgamParams) -> float:
    """Amalgam norm: ell^p over cells of the L^q norms of restrictions."""
    f = np.asarray(f)
    partition = params.partition
    if f.shape[0] != partition.model.size:
        raise ValueError("function does not match the partition's model")
    p, q = params.p, params.q
    cell_norms = np.empty(partition.n_cells)
    for i in range(partition.n_cells):
        piece = np.abs(f[partition.cell_points(i)])
        if piece.size == 0:
            cell_norms[i] = 0.0
        elif np.isinf(q):
            cell_norms[i] = piece.max()
        else:
            cell_norms[i] = np.sum(piece ** q) ** (1.0 / q)
    if np.isinf(p):
        return float(cell_norms.max())
    return float(np.sum(cell_norms ** p) ** (1.0 / p))


# --------------------------------------------------------------------------
# diagonal splitting


def diag_split(T: np.ndarray, partition: Partition, r: float | None = None):
    """Split T into block-near and block-far parts at scale r.

    The near part keeps blocks ``P_i T P_j`` whose centres are within
    ``5r``; with every cell inside ``B(center, r)`` its kernel then lives
    within ``7r`` of the diagonal.  The two parts sum to T entrywise
    exactly (complementary block masks).
    """
    T = np.asarray(T)
    if T.shape != (partition.model.size,) * 2:
        raise ValueError("operator does not match the partition's model")
    r = partition.r if r is None else float(r)
    centers = partition.centers
    model = partition.model
    ncell = partition.n_cells
    cdist = np.empty((ncell, ncell))
    for i in range(ncell):
        cdist[i] = model.distance(centers, centers[i])
    near_cells = cdist <= 5.0 * r
    cell = partition.cell_of_point
    mask = near_cells[np.ix_(cell, cell)]
    near = np.where(mask, T, 0.0)
    far = T - near
    return near, far


# --------------------------------------------------------------------------
# commutators


def multi_commutator(T: np.ndarray, eta: np.ndarray, order: int) -> np.ndarray:
    """Iterated commutator of T with the diagonal weight *eta*.

    Order 0 returns T; each further order replaces T by ``eta T - T eta``.
    The weight vector for cell ``l`` of a partition is ``partition.eta(l)``.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    out = np.asarray(T, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    for _ in range(order):
        out = eta[:, None] * out - out * eta[None, :]
    return out


def gamma_table(kappa: int) -> np.ndarray:
    """Integer coefficients Gamma(k, m) of the weight-exchange identity.

    ``Gamma(k, 0) = 1`` and ``Gamma(k, m+1) = sum_{l=m}^{k-1} Gamma(l, m)``,
    in exact integer arithmetic; returned as shape ``(kappa+1, kappa+1)``
    with entry ``[k, m]`` (object dtype so large values never overflow).
    """
    if kappa < 1:
        raise ValueError("kappa must be >= 1")
    tbl = np.zeros((kappa + 1, kappa + 1), dtype=object)
    for k in range(kappa + 1):
        tbl[k, 0] = 1
    for m in range(kappa):
        for k in range(kappa + 1):
            tbl[k, m + 1] = sum(tbl[l, m] for l in range(m, k))
    return tbl


def commutator_identity_check(T: np.ndarray, eta: np.ndarray, kappa: int) -> float:
    """Frobenius residual of the weight-exchange identity at order kappa.

    Checks that ``eta^k T`` equals ``sum_m Gamma(k, m) ad^m(T) eta^{k-m}``
    where ``ad`` is the commutator with the diagonal weight.
    """
    if kappa < 1 or kappa > 6:
        raise ValueError("kappa must be in 1..6 (combinatorial growth)")
    T = np.asarray(T, dtype=complex)
    eta = np.asarray(eta, dtype=float)
    tbl = gamma_table(kappa)
    lhs = (eta ** kappa)[:, None] * T
    rhs = np.zeros_like(lhs)
    for m in range(kappa + 1):
        rhs = rhs + float(tbl[kappa, m]) * (
            multi_commutator(T, eta, m) * (eta ** (kappa - m))[None, :]
        )
    return float(np.linalg.norm(lhs - rhs))


def duhamel_check(T: np.ndarray, eta: np.ndarray, t: float, order: int = 32) -> float:
    """Operator-norm residual of the commutator integral formula.

    Compares ``[eta, exp(itT)]`` against the Gauss-Legendre quadrature of
    ``it * integral_0^1 exp(istT) [eta, T] exp(i(1-s)tT) ds`` for
    Hermitian T (propagators via eigendecomposition).
    """
    T = np.asarray(T, dtype=complex)
    if np.linalg.norm(T - T.conj().T) > 1e-12 * max(1.0, np.linalg.norm(T)):
        raise ValueError("T must be Hermitian")
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    eta = np.asarray(eta, dtype=float)
    w, V = np.linalg.eigh(T)

    def propagator(s: float) -> np.ndarray:
        return (V * np.exp(1j * s * t * w)) @ V.conj().T

    E = np.diag(eta)
    U = propagator(1.0)
    lhs = E @ U - U @ E
    bracket = E @ T - T @ E
    nodes, weights = np.polynomial.legendre.leggauss(order)
    integral = np.zeros_like(T)
    for s, wt in zip(0.5 * (nodes + 1.0), 0.5 * weights):
        integral = integral + wt * (propagator(s) @ bracket @ propagator(1.0 - s))
    rhs = 1j * t * integral
    return float(np.linalg.norm(lhs - rhs, 2))
