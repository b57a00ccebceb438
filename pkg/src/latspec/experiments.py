"""Registry of named batch experiments for the decay-law toolkit.

Each experiment binds one quantitative claim (a decay or boundedness
law checked elsewhere in the package) to a runnable recipe: default
parameters, pass/fail gates, CSV tables and optional log-log plots.
The registry is what the command-line runner dispatches on.

Results are deterministic for a fixed seed: all randomness flows from
one ``numpy`` ``SeedSequence``, workers only parallelize pure ladder
evaluations, and table rows are emitted in sorted order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .decay import PveParams, block_norm_matrix, fit_pve, pve_constant_ratio
from .decay import gaussian_bound_check
from .fitting import DecayFit
from .geometry import ball_count_check, build_net, build_partition, lattice_box
from .lattice import GridSpec, apply_walk, bump, gaussian_multiplier, kernel_from_values
from .multipliers import commutator_identity_check, duhamel_check, dyadic_pieces
from .norms import bochner_riesz_sweep, uniform_multiplier_sweep, wave_growth_fit
from .surfaces import (
    ball_growth_check,
    band_average,
    curvature,
    curvature_closed_form,
    extract_surface,
    gamma_lambda,
    mu_fourier_decay,
    n_lambda_fit,
    restriction_ST_check,
    spectral_norm_decay,
)

__all__ = [
    "ConfigError",
    "Experiment",
    "ExperimentResult",
    "REGISTRY",
    "experiment_names",
    "resolve_workers",
    "validate_params",
]


class ConfigError(ValueError):
    """A config value that cannot be run; carries the offending key."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(message)


@dataclass
class ExperimentResult:
    """Everything a run emits: verdicts, fit records, tables, plots."""

    gates: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(g["passed"] for g in self.gates)

    def failing_gate(self) -> str | None:
        for g in self.gates:
            if not g["passed"]:
                return g["name"]
        return None


@dataclass(frozen=True)
class Experiment:
    name: str
    claim: str
    defaults: dict
    runner: Callable[[dict, np.random.SeedSequence, int], ExperimentResult]


def resolve_workers(requested: int | None) -> int:
    if requested is None:
        return max(1, os.cpu_count() or 1)
    return int(requested)


def _parallel_map(fn, items, workers: int):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))


def _gate(name: str, passed, detail: str) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _fit_gate(name: str, fit: DecayFit) -> dict:
    detail = (
        f"exponent {fit.exponent:.6g} vs target {fit.target:g} "
        f"(slack {fit.slack:g})"
    )
    return _gate(name, fit.passed, detail)


def _exact_walk_kernel(M: int, k: int, n: int = 1):
    """Walk power by repeated averaging: exact dyadic values, no FFT dust."""
    values = np.zeros((M,) * n)
    values[(0,) * n] = 1.0
    for _ in range(k):
        values = apply_walk(values)
    return kernel_from_values(GridSpec(n, M), values)


# ---------------------------------------------------------------------------
# runners


def _run_heat_kernel(params, seeds, workers) -> ExperimentResult:
    n = int(params["n"])
    diag, tail = gaussian_bound_check(n, params["k_values"], M=params["M"])
    if params["slope_target"] is not None:
        slack = params["slope_slack"]
        if slack is None:
            slack = 0.05 if n == 1 else 0.1
        diag = diag.judged(float(params["slope_target"]), float(slack), "abs")
    res = ExperimentResult(fits={"diagonal": diag, "tail": tail})
    res.gates.append(_fit_gate("diagonal-slope", diag))
    res.gates.append(
        _gate("tail-negative", tail.passed,
              f"semi-log tail slope {tail.exponent:.6g} <= 0")
    )
    ks, values = diag.extras["k"], diag.extras["values"]
    res.tables["diagonal"] = (
        ["k", "value"], [[k, v] for k, v in zip(ks, values)]
    )
    res.tables["tail-slopes"] = (
        ["k", "slope"],
        [[float(k), v] for k, v in sorted(tail.extras["per_k_slopes"].items())],
    )
    res.plots["diagonal"] = {
        "series": [("A^k at 0", ks, values)],
        "xlabel": "k", "ylabel": "kernel value",
        "title": f"on-diagonal decay, n={n}",
    }
    return res


def _run_pve_certify(params, seeds, workers) -> ExperimentResult:
    n, k, M = int(params["n"]), int(params["k"]), int(params["M"])
    tau, a = float(params["tau"]), float(params["a"])
    side = int(params["side"])
    op = _exact_walk_kernel(M, k, n)
    model = lattice_box(n, side)

    def certify(scale: float):
        part = build_partition(model, build_net(model, scale), scale)
        block = block_norm_matrix(
            op, part, PveParams(p=float(params["p"]), tau=scale, a=a)
        )
        return block, fit_pve(block, min_bins=3, min_span=4.0)

    (block, fit), (_, fit2) = _parallel_map(certify, [tau, 2.0 * tau], workers)
    ratio = pve_constant_ratio(fit, fit2)
    res = ExperimentResult(
        fits={"block-decay": fit, "block-decay-2tau": fit2},
        reports={"two-scale": ratio},
    )
    res.gates.append(_fit_gate("pve-exponent", fit))
    off = ~np.eye(block.n_cells, dtype=bool)
    rows = sorted(
        [float(d), float(v)]
        for d, v in zip(block.distances[off], block.norms[off])
    )
    res.tables["blocks"] = (["distance", "norm"], rows)
    pos = [(d, v) for d, v in rows if d > 0 and v > 0]
    res.plots["blocks"] = {
        "series": [("block norms", [d for d, _ in pos], [v for _, v in pos])],
        "xlabel": "center distance", "ylabel": "block norm",
        "title": f"localized decay of A^{k}",
    }
    return res


def _run_partition_audit(params, seeds, workers) -> ExperimentResult:
    n, side = int(params["n"]), int(params["side"])
    r, kmax = float(params["r"]), int(params["kmax"])
    model = lattice_box(n, side, params["metric"])
    # build_partition audits disjointness, covering and r-ball
    # subordination outright; reaching this line means all three hold
    part = build_partition(model, build_net(model, r), r)
    counts = ball_count_check(part, kmax)
    res = ExperimentResult(reports={"annulus-counts": counts})
    res.gates.append(
        _gate("partition-postconditions", True,
              f"{part.n_cells} cells cover {model.size} points, "
              f"each inside its center's r-ball")
    )
    res.gates.append(
        _gate("annulus-count-bound",
              counts["constant"] <= float(params["count_gate"]),
              f"sup count / 2^(kn) = {counts['constant']:.6g} "
              f"<= {params['count_gate']:g}")
    )
    res.gates.append(
        _gate("cells-not-degenerate", part.min_fullness > 0.0,
              f"min cell fullness {part.min_fullness:.6g}")
    )
    rows = [
        [k, entry["max_count"], entry["ratio"]]
        for k, entry in sorted(counts["per_k"].items())
    ]
    res.tables["annulus"] = (["k", "max_count", "ratio"], rows)
    return res


def _run_dyadic_reconstruct(params, seeds, workers) -> ExperimentResult:
    L = int(params["L"])
    F = gaussian_multiplier(float(params["center"]), float(params["width"]))
    dec = dyadic_pieces(F, L, residual_tol=float(params["residual_tol"]))
    res = ExperimentResult(
        reports={"decomposition": {"level": dec.level, "residual": dec.residual}}
    )
    res.gates.append(
        _gate("reconstruction-residual",
              dec.residual <= float(params["residual_tol"]),
              f"sup |F - sum of pieces| = {dec.residual:.3e} "
              f"<= {params['residual_tol']:g}")
    )
    sups = np.abs(dec.pieces).max(axis=1)
    rows = [[ell, float(s)] for ell, s in enumerate(sups)]
    res.tables["piece-sups"] = (["level", "sup"], rows)
    pos = [(2.0 ** ell, s) for ell, s in rows[1:] if s > 0]
    res.plots["piece-sups"] = {
        "series": [("piece sup", [x for x, _ in pos], [y for _, y in pos])],
        "xlabel": "band frequency 2^l", "ylabel": "sup of piece",
        "title": "dyadic piece magnitudes",
    }
    return res


def _run_commutator_suite(params, seeds, workers) -> ExperimentResult:
    dim = int(params["dim"])
    kappa_max = int(params["kappa_max"])
    n_mat = int(params["n_matrices"])
    t, order = float(params["t"]), int(params["order"])
    rng = np.random.default_rng(seeds.spawn(1)[0])
    identity_rows, duhamel_rows = [], []
    for i in range(n_mat):
        T = rng.normal(size=(dim, dim))
        eta = rng.uniform(0.0, 2.0, size=dim)
        for kappa in range(1, kappa_max + 1):
            identity_rows.append(
                [i, kappa, commutator_identity_check(T, eta, kappa)]
            )
        raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        H = 0.5 * (raw + raw.conj().T)
        H = H * (2.0 / np.linalg.norm(H, 2))
        duhamel_rows.append([i, duhamel_check(H, eta, t, order=order)])
    worst_identity = max(r[2] for r in identity_rows)
    worst_duhamel = max(r[1] for r in duhamel_rows)
    res = ExperimentResult(
        reports={
            "worst_identity_residual": worst_identity,
            "worst_duhamel_residual": worst_duhamel,
        }
    )
    res.gates.append(
        _gate("weight-exchange-identity",
              worst_identity <= float(params["identity_tol"]),
              f"max residual {worst_identity:.3e} over {n_mat} matrices, "
              f"orders 1..{kappa_max}")
    )
    res.gates.append(
        _gate("propagator-commutator-integral",
              worst_duhamel <= float(params["duhamel_tol"]),
              f"max residual {worst_duhamel:.3e} at quadrature order {order}")
    )
    res.tables["identity-residuals"] = (
        ["matrix", "order", "residual"], identity_rows
    )
    res.tables["duhamel-residuals"] = (["matrix", "residual"], duhamel_rows)
    return res


def _run_wave_growth(params, seeds, workers) -> ExperimentResult:
    fit = wave_growth_fit(
        int(params["n"]), params["t_values"], M=params["M"],
        slack=float(params["slack"]),
    )
    res = ExperimentResult(fits={"growth": fit})
    res.gates.append(_fit_gate("wave-growth-rate", fit))
    ts, norms = fit.extras["t"], fit.extras["norms"]
    res.tables["sweep"] = (["t", "norm"], [[t, v] for t, v in zip(ts, norms)])
    res.plots["sweep"] = {
        "series": [("propagator mass", ts, norms)],
        "xlabel": "t", "ylabel": "convolution L1 norm",
        "title": f"wave propagator growth, n={params['n']}",
    }
    return res


def _run_multiplier_uniform(params, seeds, workers) -> ExperimentResult:
    lo, hi = (float(v) for v in params["support"])
    report = uniform_multiplier_sweep(
        bump(lo, hi), int(params["n"]), t_values=params["t_values"],
        M=params["M"], max_over_median=float(params["max_over_median"]),
        slope_tol=float(params["slope_tol"]),
    )
    res = ExperimentResult(reports={"sweep": report})
    res.gates.append(
        _gate("uniformly-bounded", report["bounded"],
              f"max/median {report['max_over_median']:.4g} "
              f"(gate {params['max_over_median']:g}), "
              f"slope {report['slope']:.4g} (gate {params['slope_tol']:g})")
    )
    rows = [[t, v] for t, v in zip(report["t"], report["norms"])]
    res.tables["sweep"] = (["t", "norm"], rows)
    if not report["zero"]:
        res.plots["sweep"] = {
            "series": [("dilate norm", report["t"], report["norms"])],
            "xlabel": "t", "ylabel": "convolution L1 norm",
            "title": f"uniform multiplier sweep, n={params['n']}",
        }
    return res


def _run_bochner_riesz(params, seeds, workers) -> ExperimentResult:
    n = int(params["n"])
    alphas = [float(a) for a in params["alphas"]]
    report = bochner_riesz_sweep(n, alphas, params["R_values"], M=params["M"])
    res = ExperimentResult(
        reports={"sweep": {**report, "per_alpha": {
            f"{a:g}": report["per_alpha"][a] for a in alphas
        }}}
    )
    series = []
    for a in alphas:
        entry = report["per_alpha"][a]
        series.append((f"alpha={a:g}", [1.0 / R for R in report["R"]],
                       entry["norms"]))
        if a > n / 2.0:
            res.gates.append(
                _gate(f"smooth-riesz-bounded-alpha-{a:g}", entry["bounded"],
                      f"window growth slope {entry['window_growth_slope']:.4g}"
                      " <= 0.05")
            )
        if a == 0.0:
            res.gates.append(
                _gate("sharp-projector-window-growth",
                      entry["window_growth_slope"] > 0.05,
                      f"window mass slope {entry['window_growth_slope']:.4g}"
                      " > 0.05: sharp cutoff is not uniformly summable")
            )
    rows = sorted(
        [a, R, v]
        for a in alphas
        for R, v in zip(report["R"], report["per_alpha"][a]["norms"])
    )
    res.tables["sweep"] = (["alpha", "R", "norm"], rows)
    window_rows = sorted(
        [a, M_w, v]
        for a in alphas
        for M_w, v in zip(
            [report["M"], 2 * report["M"], 4 * report["M"], 8 * report["M"]],
            report["per_alpha"][a]["window_norms"],
        )
    )
    res.tables["window"] = (["alpha", "window", "norm"], window_rows)
    res.plots["sweep"] = {
        "series": series, "xlabel": "1/R", "ylabel": "convolution L1 norm",
        "title": f"Riesz mean norms, n={n}",
    }
    return res


def _run_surface_curvature(params, seeds, workers) -> ExperimentResult:
    n = int(params["n"])
    js = [int(j) for j in params["j_values"]]
    lams = [1.0 - 2.0 ** (-j) / n for j in js]

    def survey(lam: float):
        surf = extract_surface(n, lam, rescaled=True)
        k_abs = np.abs(curvature(surf))
        disagreement = float(
            np.abs(curvature(surf) - curvature_closed_form(surf)).max()
        )
        return float(k_abs.min()), float(k_abs.mean()), disagreement

    surveyed = _parallel_map(survey, lams, workers)
    mins = [row[0] for row in surveyed]
    worst_disagreement = max(row[2] for row in surveyed)

    check_lam = lams[0]
    coarse = extract_surface(n, check_lam, rescaled=True)
    fine = coarse.refine()
    k0 = float(np.abs(curvature(coarse)).min())
    k1 = float(np.abs(curvature(fine)).min())
    shift = abs(k1 - k0) / k0

    res = ExperimentResult(
        reports={
            "min_curvature": min(mins),
            "evaluation_disagreement": worst_disagreement,
            "refinement_shift": shift,
        }
    )
    res.gates.append(
        _gate("curvature-positive", min(mins) > 0.0,
              f"min |K| over the ladder = {min(mins):.6g}")
    )
    res.gates.append(
        _gate("two-evaluations-agree",
              worst_disagreement <= float(params["agreement_tol"]),
              f"bordered vs cofactor max diff {worst_disagreement:.3e}")
    )
    res.gates.append(
        _gate("refinement-stable", shift <= float(params["stability_tol"]),
              f"min |K| moves {shift:.3e} under 2x refinement")
    )
    rows = [
        [lam, row[0], row[1], row[2]] for lam, row in zip(lams, surveyed)
    ]
    res.tables["curvature"] = (
        ["lam", "min_abs_k", "mean_abs_k", "eval_disagreement"], rows
    )
    res.plots["curvature"] = {
        "series": [("min |K|", [1.0 - lam for lam in lams], mins)],
        "xlabel": "1 - lam", "ylabel": "min |K|",
        "title": f"curvature floor along the ladder, n={n}",
    }
    return res


def _run_mu_decay(params, seeds, workers) -> ExperimentResult:
    n = int(params["n"])
    lams = [float(v) for v in params["lam_values"]]

    def survey(lam: float):
        surf = extract_surface(n, lam, rescaled=True)
        fit = mu_fourier_decay(surf, xi_max=float(params["xi_max"]))
        balls = ball_growth_check(surf, n_balls=int(params["n_balls"]))
        return fit, balls

    surveyed = _parallel_map(survey, lams, workers)
    res = ExperimentResult()
    env_rows, ball_rows, series = [], [], []
    m1s = []
    for lam, (fit, balls) in zip(lams, surveyed):
        res.fits[f"mu-decay-lam-{lam:g}"] = fit
        m1s.append(balls["M1"])
        ball_rows.append([lam, balls["M1"], balls["exponent"]])
        xi = fit.extras["envelope_xi"]
        vals = fit.extras["envelope_value"]
        env_rows.extend([lam, x, v] for x, v in zip(xi, vals))
        series.append((f"lam={lam:g}", xi, vals))
        res.gates.append(_fit_gate(f"transform-decay-lam-{lam:g}", fit))
        res.gates.append(
            _gate(f"ball-growth-lam-{lam:g}",
                  abs(balls["exponent"] - (n - 1)) <= 0.15,
                  f"growth exponent {balls['exponent']:.4g} vs {n - 1} "
                  "(slack 0.15)")
        )
    spread = (max(m1s) - min(m1s)) / max(m1s)
    res.gates.append(
        _gate("ball-constant-stable",
              spread <= float(params["m1_stability"]),
              f"M1 spread {spread:.4g} over the ladder "
              f"(gate {params['m1_stability']:g})")
    )
    res.reports["ball-growth"] = {
        f"{lam:g}": {"M1": balls["M1"], "exponent": balls["exponent"]}
        for lam, (_, balls) in zip(lams, surveyed)
    }
    res.tables["envelope"] = (["lam", "xi", "value"], env_rows)
    res.tables["balls"] = (["lam", "M1", "exponent"], ball_rows)
    res.plots["envelope"] = {
        "series": series, "xlabel": "|xi|", "ylabel": "transform envelope",
        "title": f"surface measure transform decay, n={n}",
    }
    return res


def _run_spectral_measure_decay(params, seeds, workers) -> ExperimentResult:
    n = int(params["n"])
    js = [int(j) for j in params["j_values"]]
    fit = spectral_norm_decay(
        n, p=float(params["p"]), j_values=js, resolution=params["resolution"]
    )
    nfit = n_lambda_fit(n, j_values=js, resolution=params["resolution"])
    lam = float(params["band_lam"])
    slc = gamma_lambda(extract_surface(n, lam))
    band = band_average(
        n, lam, float(params["band_delta"]), M=int(params["band_M"])
    )
    g0 = slc.at((0,) * n)
    agreement_rows, worst = [], 0.0
    for d in params["displacements"]:
        d = tuple(int(x) for x in d)
        a, b = slc.at(d), band.at(d)
        rel = abs(a - b) / g0
        worst = max(worst, rel)
        agreement_rows.append([*d, a, b, rel])
    res = ExperimentResult(fits={"window-sup-decay": fit, "count-growth": nfit})
    res.gates.append(_fit_gate("window-sup-exponent", fit))
    res.gates.append(_fit_gate("count-growth-exponent", nfit))
    res.gates.append(
        _gate("two-route-agreement",
              worst <= float(params["agreement_tol"]),
              f"surface vs band-average max rel diff {worst:.4g} at "
              f"lam={lam:g} (gate {params['agreement_tol']:g})")
    )
    gaps = fit.extras["gaps"]
    res.tables["ladder"] = (
        ["gap", "window_sup", "n_lambda"],
        [[g, v, w] for g, v, w in
         zip(gaps, fit.extras["norms"], nfit.extras["values"])],
    )
    header = [f"d_{ax}" for ax in range(n)]
    res.tables["agreement"] = (
        header + ["surface_quadrature", "band_average", "rel_diff"],
        agreement_rows,
    )
    res.plots["ladder"] = {
        "series": [
            ("window sup", gaps, fit.extras["norms"]),
            ("N(lam)", gaps, nfit.extras["values"]),
        ],
        "xlabel": "1 - lam", "ylabel": "value",
        "title": f"spectral density ladder, n={n}",
    }
    return res


def _run_restriction_st(params, seeds, workers) -> ExperimentResult:
    n = int(params["n"])
    lo, hi = (float(v) for v in params["support"])
    fit = restriction_ST_check(
        n, bump(lo, hi), k_values=params["k_values"],
        slack=float(params["slack"]),
    )
    res = ExperimentResult(fits={"restriction-rate": fit})
    res.gates.append(_fit_gate("restriction-rate", fit))
    if not fit.extras.get("zero"):
        ratio = fit.extras["st_max_over_median"]
        res.gates.append(
            _gate("volume-normalized-bounded", ratio <= 3.0,
                  f"normalized max/median {ratio:.4g} <= 3")
        )
        ks = fit.extras["k_values"]
        rows = [
            [k, v, s] for k, v, s in
            zip(ks, fit.extras["norms_sq"], fit.extras["st_normalized"])
        ]
        res.tables["sweep"] = (["k", "norm_sq", "st_normalized"], rows)
        res.plots["sweep"] = {
            "series": [("squared norm", ks, fit.extras["norms_sq"])],
            "xlabel": "k", "ylabel": "squared L1->L2 norm",
            "title": f"band-limited restriction rate, n={n}",
        }
    return res


# ---------------------------------------------------------------------------
# registry


REGISTRY: dict[str, Experiment] = {}


def _register(name, claim, defaults, runner):
    REGISTRY[name] = Experiment(name, claim, defaults, runner)


_register(
    "heat-kernel",
    "on-diagonal walk powers decay like k^(-n/2) with a Gaussian profile",
    {"n": 1, "k_values": [16, 32, 64, 128, 256], "M": None,
     "slope_target": None, "slope_slack": None},
    _run_heat_kernel,
)
_register(
    "pve-certify",
    "ball-localized block norms of exact walk powers decay past order n+a",
    {"n": 1, "k": 64, "M": 512, "side": 200, "tau": 4.0, "a": 6.0, "p": 1.0},
    _run_pve_certify,
)
_register(
    "partition-audit",
    "net partitions are disjoint, covering, ball-subordinate, with dyadic "
    "annulus counts O(2^(kn))",
    {"n": 2, "side": 256, "r": 4.0, "metric": "linf", "kmax": 4,
     "count_gate": 48.0},
    _run_partition_audit,
)
_register(
    "dyadic-reconstruct",
    "smooth multipliers reconstruct from dyadic frequency pieces to "
    "truncation accuracy",
    {"L": 12, "center": 0.0, "width": 1.0, "residual_tol": 1e-8},
    _run_dyadic_reconstruct,
)
_register(
    "commutator-suite",
    "the weight-exchange identity and the propagator commutator integral "
    "hold to quadrature accuracy",
    {"dim": 8, "kappa_max": 5, "n_matrices": 20, "t": 2.0, "order": 32,
     "identity_tol": 1e-10, "duhamel_tol": 1e-8},
    _run_commutator_suite,
)
_register(
    "wave-growth",
    "the wave propagator's convolution L1 norm grows no faster than t^(n/2)",
    {"n": 1, "t_values": [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0], "M": None,
     "slack": 0.2},
    _run_wave_growth,
)
_register(
    "multiplier-uniform",
    "smooth multipliers of t(I-A) are uniformly L1-bounded over the "
    "dilation ladder",
    {"n": 1, "support": [0.125, 0.375], "t_values": None, "M": None,
     "max_over_median": 3.0, "slope_tol": 0.05},
    _run_multiplier_uniform,
)
_register(
    "bochner-riesz",
    "smooth Riesz means are uniformly summable; the sharp spectral "
    "projector's window mass keeps growing",
    {"n": 2, "alphas": [0.0, 10.0], "R_values": None, "M": None},
    _run_bochner_riesz,
)
_register(
    "surface-curvature",
    "level surfaces near the spectral top have curvature bounded away "
    "from zero",
    {"n": 2, "j_values": [3, 4, 5, 6, 7, 8], "stability_tol": 0.05,
     "agreement_tol": 1e-10},
    _run_surface_curvature,
)
_register(
    "mu-decay",
    "the rescaled surface measure has transform decay |xi|^(-(n-1)/2) and "
    "(n-1)-dimensional ball growth",
    {"n": 2, "lam_values": [0.875, 0.9375], "xi_max": 1000.0, "n_balls": 200,
     "m1_stability": 0.2},
    _run_mu_decay,
)
_register(
    "spectral-measure-decay",
    "the spectral density window sup scales like (1-lam)^(n/2-1) and "
    "N(lam) like (1-lam)^(-1/2)",
    {"n": 2, "p": 1.0, "j_values": [3, 4, 5, 6, 7, 8], "resolution": None,
     "band_lam": 0.75, "band_delta": 0.01, "band_M": 2048,
     "agreement_tol": 0.02,
     "displacements": [[0, 0], [1, 0], [1, 1], [3, 2]]},
    _run_spectral_measure_decay,
)
_register(
    "restriction-st",
    "band-limited walk powers lose L1->L2 mass at rate k^(-n/2)",
    {"n": 2, "support": [0.75, 0.875],
     "k_values": [8, 16, 32, 64, 128, 256, 512], "slack": 0.15},
    _run_restriction_st,
)


def experiment_names() -> list[str]:
    return list(REGISTRY)


_LADDER_KEYS = {"k_values", "t_values", "j_values", "lam_values", "alphas",
                "R_values", "displacements"}
_POSITIVE_KEYS = {"residual_tol", "identity_tol", "duhamel_tol",
                  "stability_tol", "agreement_tol", "m1_stability", "slack",
                  "slope_tol", "max_over_median", "count_gate", "xi_max"}


def validate_params(experiment: Experiment, overrides: dict) -> dict:
    """Merge config params over the experiment defaults and sanity-check.

    Ladder parameters must be non-empty lists; tolerance-like parameters
    must be positive.  Unknown keys are rejected so typos fail loudly.
    """
    params = dict(experiment.defaults)
    for key, value in overrides.items():
        if key not in params:
            raise ConfigError(
                key, f"params.{key}: unknown parameter for "
                f"'{experiment.name}'"
            )
        params[key] = value
    for key, value in params.items():
        if key in _LADDER_KEYS and value is not None:
            if not isinstance(value, (list, tuple)) or len(value) == 0:
                raise ConfigError(key, f"params.{key}: empty ladder")
        if key in _POSITIVE_KEYS:
            if not isinstance(value, (int, float)) or not value > 0:
                raise ConfigError(
                    key, f"params.{key}: must be a positive number"
                )
    return params
