"""Desk-scale verification suites for the comparability inequalities.

Each suite walks a deterministic ball grid (farthest-point centers, dyadic
scales), computes both sides of its inequality per ball, and reports
per-row ratios plus the empirical constant (the extremes of the bounded
direction). Rows where both sides vanish are skipped with a reason, never
coerced; NaN is never emitted. Integrals run exactly when the tuple count
is small and switch to Monte Carlo otherwise, with per-row derived seeds
so reports are reproducible for a fixed (dataset, config, seed).
"""

import csv
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .integrals import (
    DEFAULT_BUDGET,
    MonteCarlo,
    ball_curvature_sq,
    leger_integral,
    local_curvature_sq,
    psin_power_integral,
)
from .measure import Ball, EmpiricalMeasure, farthest_point_indices
from .planefit import beta_p, jones_flatness
from .simplex import CurvatureSpec

SCHEMA_VERSION = 1
ZERO_EPS = 1e-10  # both-sides-below means a 0/0 row

SUITES = ("prop11", "thm12", "thm13", "thm14", "thm62", "leger")


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    mc_samples: int = 200_000
    exact_budget: int = DEFAULT_BUDGET
    lam: float = 0.25
    n_centers: int = 16
    n_scales: int = 5
    levels: int = 4
    p: float = 3.0

    def to_dict(self):
        return {
            "seed": self.seed,
            "mc_samples": self.mc_samples,
            "exact_budget": self.exact_budget,
            "lam": self.lam,
            "n_centers": self.n_centers,
            "n_scales": self.n_scales,
            "levels": self.levels,
            "p": self.p,
        }


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    rows: list
    empirical: dict
    runtime_seconds: float
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "config": self.config,
            "rows": self.rows,
            "empirical": self.empirical,
            "runtime_seconds": self.runtime_seconds,
        }
        return json.dumps(payload, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = []
        for row in self.rows:
            for key in row:
                if key not in cols:
                    cols.append(key)
        writer = csv.DictWriter(buf, fieldnames=cols)
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row)
        return buf.getvalue()


def _ball_grid(mu: EmpiricalMeasure, config: VerifyConfig):
    diam = mu.support_diameter()
    if diam <= 0:
        raise InvalidInputError("dataset has zero diameter")
    centers = mu.points[farthest_point_indices(mu.points, config.n_centers)]
    scales = [diam / 2.0**j for j in range(1, config.n_scales + 1)]
    return centers, scales, diam


def _auto_mode(mu, center, radius, config, row_seed):
    m = mu.indices_in_ball(center, radius).size
    tuples = m ** (mu.d + 2)
    if tuples <= max(2 * config.mc_samples, 200_000):
        return "exact"
    return MonteCarlo(config.mc_samples, seed=row_seed)


def _row_seed(config, i):
    return (config.seed * 1_000_003 + i) % 2**63


def _finish(name, config, rows, ratio_key, t0):
    used = [r[ratio_key] for r in rows if r.get("reason", "") == ""]
    empirical = {
        "rows": len(rows),
        "rows_used": len(used),
        "max_ratio": max(used) if used else None,
        "min_ratio": min(used) if used else None,
    }
    return ExperimentReport(
        experiment=name,
        config=config.to_dict(),
        rows=rows,
        empirical=empirical,
        runtime_seconds=round(time.perf_counter() - t0, 3),
    )


def _base_row(x, t, lam):
    return {
        "center": ",".join(f"{v:.17g}" for v in np.asarray(x)),
        "t": float(t),
        "lambda": lam,
    }


def _ratio_fields(row, lhs, rhs, lhs_name, rhs_name):
    row[lhs_name] = lhs
    row[rhs_name] = rhs
    if lhs < ZERO_EPS and rhs < ZERO_EPS:
        row["ratio"] = None
        row["reason"] = "0/0 skipped"
    elif rhs == 0.0:
        row["ratio"] = None
        row["reason"] = "zero denominator"
    else:
        row["ratio"] = lhs / rhs
        row["reason"] = ""
    return row


def _suite_prop11(mu, config):
    t0 = time.perf_counter()
    centers, scales, _ = _ball_grid(mu, config)
    spec = CurvatureSpec("mt", d=mu.d)
    rows = []
    for i, (x, t) in enumerate((x, t) for x in centers for t in scales):
        mode = _auto_mode(mu, x, t, config, _row_seed(config, i))
        cur = local_curvature_sq(mu, x, t, config.lam, spec, mode=mode, budget=config.exact_budget)
        b = beta_p(mu, x, t, 2.0)
        rhs = b.beta**2 * b.mass
        row = _base_row(x, t, config.lam)
        row["mc_std_error"] = cur.std_error
        _ratio_fields(row, cur.value, rhs, "curvature_sq", "beta2_sq_mass")
        rows.append(row)
    return _finish("prop11", config, rows, "ratio", t0)


def _suite_thm12(mu, config):
    t0 = time.perf_counter()
    centers, scales, _ = _ball_grid(mu, config)
    spec = CurvatureSpec("mt", d=mu.d)
    rows = []
    for i, (x, t) in enumerate((x, t) for x in centers for t in scales):
        mode = _auto_mode(mu, x, t, config, _row_seed(config, i))
        cur = local_curvature_sq(mu, x, t, config.lam, spec, mode=mode, budget=config.exact_budget)
        b = beta_p(mu, x, t, 2.0)
        lhs = b.beta**2 * b.mass
        row = _base_row(x, t, config.lam)
        row["mc_std_error"] = cur.std_error
        _ratio_fields(row, lhs, cur.value, "beta2_sq_mass", "curvature_sq")
        rows.append(row)
    return _finish("thm12", config, rows, "ratio", t0)


def _suite_thm13(mu, config):
    t0 = time.perf_counter()
    centers, scales, diam = _ball_grid(mu, config)
    spec = CurvatureSpec("mt", d=mu.d)
    rows = []
    for i, (x, t) in enumerate((x, t) for x in centers for t in scales):
        mode = _auto_mode(mu, x, t, config, _row_seed(config, i))
        cur = ball_curvature_sq(mu, Ball(x, t), spec=spec, mode=mode, budget=config.exact_budget)
        jf = jones_flatness(mu, Ball(x, 6.0 * t), p=2.0, levels=config.levels)
        row = _base_row(x, t, None)
        row["mc_std_error"] = cur.std_error
        row["blowup_clamped"] = bool(6.0 * t > diam)
        _ratio_fields(row, cur.value, jf.value, "curvature_sq", "jones_6B")
        rows.append(row)
    return _finish("thm13", config, rows, "ratio", t0)


def _suite_thm14(mu, config):
    t0 = time.perf_counter()
    centers, scales, diam = _ball_grid(mu, config)
    spec = CurvatureSpec("mt", d=mu.d)
    rows = []
    for i, (x, t) in enumerate((x, t) for x in centers for t in scales):
        jf = jones_flatness(mu, Ball(x, t), p=2.0, levels=config.levels)
        mode = _auto_mode(mu, x, 3.0 * t, config, _row_seed(config, i))
        cur = ball_curvature_sq(
            mu, Ball(x, 3.0 * t), lam=config.lam / 2.0, spec=spec,
            mode=mode, budget=config.exact_budget,
        )
        row = _base_row(x, t, config.lam / 2.0)
        row["mc_std_error"] = cur.std_error
        row["blowup_clamped"] = bool(3.0 * t > diam)
        _ratio_fields(row, jf.value, cur.value, "jones_B", "curvature_sq_3B")
        rows.append(row)
    return _finish("thm14", config, rows, "ratio", t0)


def _suite_thm62(mu, config):
    t0 = time.perf_counter()
    centers, scales, diam = _ball_grid(mu, config)
    p = config.p
    rows = []
    for i, (x, t) in enumerate((x, t) for x in centers for t in scales):
        mode = _auto_mode(mu, x, t, config, _row_seed(config, i))
        mid = psin_power_integral(mu, Ball(x, t), p, mode=mode, budget=config.exact_budget)
        lo = jones_flatness(mu, Ball(x, t / 3.0), p=p, flavor="J_tilde", levels=config.levels)
        hi = jones_flatness(mu, Ball(x, 6.0 * t), p=p, flavor="J_tilde", levels=config.levels)
        row = _base_row(x, t, None)
        row["p"] = p
        row["mc_std_error"] = mid.std_error
        row["psin_power_integral"] = mid.value
        row["jones_third_B"] = lo.value
        row["jones_6B"] = hi.value
        row["blowup_clamped"] = bool(6.0 * t > diam)
        if lo.value < ZERO_EPS and mid.value < ZERO_EPS:
            row["ratio_lower"] = None
            row["ratio_upper"] = None
            row["ratio"] = None
            row["reason"] = "0/0 skipped"
        elif mid.value == 0.0 or hi.value == 0.0:
            row["ratio_lower"] = None
            row["ratio_upper"] = None
            row["ratio"] = None
            row["reason"] = "zero denominator"
        else:
            row["ratio_lower"] = lo.value / mid.value
            row["ratio_upper"] = mid.value / hi.value
            row["ratio"] = max(row["ratio_lower"], row["ratio_upper"])
            row["reason"] = ""
        rows.append(row)
    return _finish("thm62", config, rows, "ratio", t0)


def _suite_leger(mu, config):
    t0 = time.perf_counter()
    centers, scales, _ = _ball_grid(mu, config)
    p = mu.d + 1.0
    rows = []
    for i, (x, t) in enumerate((x, t) for x in centers for t in scales):
        mode = _auto_mode(mu, x, t, config, _row_seed(config, i))
        cl = leger_integral(mu, Ball(x, t), mode=mode, budget=config.exact_budget)
        jt = jones_flatness(mu, Ball(x, t / 3.0), p=p, flavor="J_tilde", levels=config.levels)
        row = _base_row(x, t, None)
        row["p"] = p
        row["mc_std_error"] = cl.std_error
        _ratio_fields(row, jt.value, cl.value, "jones_tilde_third_B", "leger_integral")
        rows.append(row)
    return _finish("leger", config, rows, "ratio", t0)


_SUITES = {
    "prop11": _suite_prop11,
    "thm12": _suite_thm12,
    "thm13": _suite_thm13,
    "thm14": _suite_thm14,
    "thm62": _suite_thm62,
    "leger": _suite_leger,
}


def verify_suite(name: str, mu: EmpiricalMeasure, config: VerifyConfig = None) -> ExperimentReport:
    """Run one named inequality suite over the deterministic ball grid."""
    if name not in _SUITES:
        raise InvalidInputError(f"unknown suite {name!r}; choose from {SUITES}")
    config = VerifyConfig() if config is None else config
    return _SUITES[name](mu, config)
