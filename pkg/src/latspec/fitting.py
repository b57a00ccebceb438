"""Log-log regression helpers shared by the decay-certification routines.

Everything that "fits an exponent" in this package funnels through
:func:`power_fit`: a least-squares line through ``(log x, log y)`` whose
slope is the estimated exponent.  Results travel in a :class:`DecayFit`
record carrying the exponent, the constant, the residual scatter and an
optional pass/fail verdict against a target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

__all__ = ["DecayFit", "power_fit", "envelope_bins", "geometric_ladder"]


@dataclass(frozen=True)
class DecayFit:
    """Outcome of a power-law fit ``y ~ constant * x**exponent``."""

    exponent: float
    constant: float
    rms_residual: float
    n_points: int
    x_min: float
    x_max: float
    target: float | None = None
    slack: float | None = None
    passed: bool | None = None
    label: str = ""
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        if not d["extras"]:
            d.pop("extras")
        return d

    def judged(self, target: float, slack: float, mode: str = "abs") -> "DecayFit":
        """Return a copy graded against *target*.

        ``mode="abs"`` demands ``|exponent - target| <= slack``; ``"le"``
        demands ``exponent <= target + slack``; ``"ge"`` the reverse.
        """
        if mode == "abs":
            ok = abs(self.exponent - target) <= slack
        elif mode == "le":
            ok = self.exponent <= target + slack
        elif mode == "ge":
            ok = self.exponent >= target - slack
        else:
            raise ValueError(f"unknown judging mode {mode!r}")
        return DecayFit(
            self.exponent, self.constant, self.rms_residual, self.n_points,
            self.x_min, self.x_max, target, slack, bool(ok), self.label,
            dict(self.extras),
        )


def power_fit(x, y, label: str = "") -> DecayFit:
    """Least-squares power-law fit through the points ``(x, y)``.

    Points with non-positive ``y`` are dropped (they carry no log); at
    least two surviving points are required.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("power_fit expects two 1-d arrays of equal length")
    keep = (y > 0) & np.isfinite(y) & (x > 0)
    x, y = x[keep], y[keep]
    if x.size < 2:
        raise ValueError("power_fit needs at least two positive samples")
    lx, ly = np.log(x), np.log(y)
    design = np.column_stack([np.ones_like(lx), lx])
    (intercept, slope), *_ = np.linalg.lstsq(design, ly, rcond=None)
    fitted = intercept + slope * lx
    rms = float(np.sqrt(np.mean((ly - fitted) ** 2)))
    return DecayFit(
        exponent=float(slope),
        constant=float(math.exp(intercept)),
        rms_residual=rms,
        n_points=int(x.size),
        x_min=float(x.min()),
        x_max=float(x.max()),
        label=label,
    )


def envelope_bins(x, y, ratio: float = 2.0, x0: float | None = None):
    """Reduce scattered ``(x, y)`` samples to a geometric upper envelope.

    Bins are ``[x0 * ratio**k, x0 * ratio**(k+1))``; each non-empty bin is
    represented by its smallest sampled ``x`` and the largest ``y`` seen in
    it.  Taking the max makes the reduction a certificate for upper decay
    bounds: an exact power law is reproduced with zero bias.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(y) & (x > 0)
    x, y = x[keep], y[keep]
    if x.size == 0:
        return np.empty(0), np.empty(0)
    if x0 is None:
        x0 = float(x.min())
    k = np.floor(np.log(x / x0) / np.log(ratio) + 1e-12).astype(int)
    xs, ys = [], []
    for kk in np.unique(k):
        sel = k == kk
        xs.append(x[sel].min())
        ys.append(y[sel].max())
    return np.asarray(xs), np.asarray(ys)


def geometric_ladder(start: float, stop: float, ratio: float = 2.0):
    """Geometric sequence from *start* up to and including ~*stop*."""
    if start <= 0 or stop < start or ratio <= 1:
        raise ValueError("need 0 < start <= stop and ratio > 1")
    out = [start]
    while out[-1] * ratio <= stop * (1 + 1e-12):
        out.append(out[-1] * ratio)
    return np.asarray(out)
