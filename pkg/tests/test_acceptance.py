"""Acceptance suite: one test per criterion, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines. Criteria
with stated runtime limits assert them (wall clock, compiled kernels).
"""

import time
from fractions import Fraction

import numpy as np
import pytest
from util import random_simplex, sin_angle_kahan

from flatcurv import _kernels
from flatcurv.datasets import GeneratorSpec, generate
from flatcurv.errors import SeparationError
from flatcurv.integrals import (
    MonteCarlo,
    ball_curvature_sq,
    leger_integral,
    local_curvature_sq,
    psin_power_integral,
)
from flatcurv.measure import Ball, EmpiricalMeasure, farthest_point_indices, rescale
from flatcurv.planefit import beta_p, jones_flatness, lsq_plane
from flatcurv.planeselect import select_plane
from flatcurv.separation import find_separated_balls
from flatcurv.simplex import CurvatureSpec, elevation_sine, polar_sine
from flatcurv.verify import VerifyConfig, verify_suite

MT = lambda d: CurvatureSpec("mt", d=d)


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:02d} {name}: {status}{' - ' + detail if detail else ''}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


def centroid_atom(mu):
    return mu.points[np.argmin(np.linalg.norm(mu.points - mu.points.mean(0), axis=1))]


def test_criterion_01_kernel_identities():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_law = worst_prod = worst_sin = 0.0
    for d in (1, 2, 3):
        ns = list(range(d + 1, 9))
        for i in range(1000):
            V = random_simplex(rng, d, ns[i % len(ns)])
            k = d + 2
            diff = V[:, None, :] - V[None, :, :]
            D = np.sqrt((diff**2).sum(-1))
            np.fill_diagonal(D, 1.0)
            prod_all = np.prod(D[np.triu_indices(k, 1)])
            row_prod = D.prod(axis=1)
            # law of sines: psin_i / (pairs excluding i) identical over i
            ratios = [polar_sine(V, j) * row_prod[j] / prod_all for j in range(k)]
            spread = (max(ratios) - min(ratios)) / max(ratios)
            worst_law = max(worst_law, spread)
            # product formula at one rotating face index
            j = 1 + (i % (d + 1))
            lhs = polar_sine(V, 0)
            rhs = elevation_sine(V, j) * polar_sine(np.delete(V, j, axis=0), 0)
            worst_prod = max(worst_prod, abs(lhs - rhs) / max(lhs, 1e-300))
            if d == 1:
                for iv in range(3):
                    o = [m for m in range(3) if m != iv]
                    s = sin_angle_kahan(V[o[0]] - V[iv], V[o[1]] - V[iv])
                    worst_sin = max(worst_sin, abs(polar_sine(V, iv) - s))
    elapsed = time.perf_counter() - t0
    ok = worst_law < 1e-9 and worst_prod < 1e-9 and worst_sin < 1e-12 and elapsed < 5.0
    report(
        1,
        "kernel-identities",
        ok,
        f"law {worst_law:.1e}, product {worst_prod:.1e}, sin {worst_sin:.1e}, {elapsed:.1f}s",
    )


def test_criterion_02_ordering_and_separation_bounds():
    slack = 1e-10
    violations = 0
    for d in (1, 2, 3):
        rng = np.random.default_rng(55 + d)
        X = rng.normal(size=(1000, d + 2, d + 2))
        vals = {}
        for name, kind in (
            ("mt", _kernels.MT_SQ),
            ("min", _kernels.MIN_SQ),
            ("max", _kernels.MAX_SQ),
            ("vol", _kernels.VOL_SQ),
            ("alg", _kernels.ALG_SQ),
        ):
            vals[name], min_edge, diam = _kernels.batch_kernel(X, kind, d, 2.0)
        lam = min_edge / diam
        checks = [
            vals["max"] >= vals["min"] * (1 - slack),
            vals["min"] >= vals["vol"] * (1 - slack),
            vals["max"] / (d + 2) <= vals["mt"] * (1 + slack),
            vals["mt"] <= vals["max"] * (1 + slack),
            vals["alg"] >= vals["mt"] * (1 - slack),
            vals["mt"] >= lam ** (d * (d + 1)) * vals["alg"] * (1 - slack),
            vals["vol"] >= lam ** (2 * (d + 1)) * vals["mt"] * (1 - slack),
        ]
        violations += sum(int((~c).sum()) for c in checks)
    report(2, "curvature-ordering", violations == 0, f"{violations} violations")


def test_criterion_03_zero_locus():
    worst = 0.0
    for d, count in ((1, 100), (2, 28)):
        mu = generate(GeneratorSpec("plane", d=d, n=d + 1, count=count, seed=31 + d))
        diam = mu.support_diameter()
        centers = mu.points[farthest_point_indices(mu.points, 4)]
        for x in centers:
            for t in (diam / 2, diam / 4):
                worst = max(worst, beta_p(mu, x, t, 2.0).beta)
                worst = max(worst, jones_flatness(mu, Ball(x, t), levels=3).value)
        x = centroid_atom(mu)
        t = 0.8 * diam
        worst = max(worst, ball_curvature_sq(mu, Ball(x, t), spec=MT(d)).value)
        worst = max(worst, ball_curvature_sq(mu, Ball(x, t), lam=0.3, spec=MT(d)).value)
        worst = max(worst, local_curvature_sq(mu, x, t, 0.3, MT(d)).value)
        worst = max(worst, psin_power_integral(mu, Ball(x, t), 3.0).value)
        worst = max(worst, leger_integral(mu, Ball(x, t)).value)
    report(3, "zero-locus", worst < 1e-10, f"largest magnitude {worst:.2e}")


def test_criterion_04_mc_estimator_correctness():
    t0 = time.perf_counter()
    results = []
    for d, count, seed0 in ((1, 12, 1), (2, 8, 2)):
        mu = generate(
            GeneratorSpec("plane", d=d, n=d + 1, count=count, noise_sigma=0.06, seed=seed0)
        )
        ball = Ball(mu.points.mean(axis=0), 1.2 * mu.support_diameter())
        exact = ball_curvature_sq(mu, ball, spec=MT(d)).value
        hits = 0
        for seed in range(100):
            r = ball_curvature_sq(mu, ball, spec=MT(d), mode=MonteCarlo(10**6, seed))
            if abs(r.value - exact) <= 3 * r.std_error:
                hits += 1
        results.append(hits)
    elapsed = time.perf_counter() - t0
    ok = all(h >= 95 for h in results) and elapsed < 60.0
    report(
        4,
        "mc-estimator",
        ok,
        f"hits d1 {results[0]}/100, d2 {results[1]}/100, {elapsed:.0f}s",
    )


def test_criterion_05_scaling_law():
    worst = 0.0
    for d in (1, 2):
        mu = generate(
            GeneratorSpec("plane", d=d, n=d + 1, count=10, noise_sigma=0.05, seed=7 + d)
        )
        x = mu.points.mean(axis=0)
        t = 1.1 * mu.support_diameter()
        mu2 = rescale(mu, 2.0)
        x2, t2 = 2.0 * x, 2.0 * t
        factor = 2.0**d

        pairs = []
        pairs.append(
            (
                local_curvature_sq(mu, x, t, 0.3, MT(d)).value,
                local_curvature_sq(mu2, x2, t2, 0.3, MT(d)).value,
            )
        )
        pairs.append(
            (
                ball_curvature_sq(mu, Ball(x, t), spec=MT(d)).value,
                ball_curvature_sq(mu2, Ball(x2, t2), spec=MT(d)).value,
            )
        )
        b1 = beta_p(mu, x, t, 2.0)
        b2 = beta_p(mu2, x2, t2, 2.0)
        pairs.append((b1.beta**2 * b1.mass, b2.beta**2 * b2.mass))
        pairs.append(
            (
                jones_flatness(mu, Ball(x, t), levels=3).value,
                jones_flatness(mu2, Ball(x2, t2), levels=3).value,
            )
        )
        for base, scaled in pairs:
            assert base > 0
            worst = max(worst, abs(scaled - factor * base) / (factor * base))
    report(5, "scaling-law", worst < 1e-9, f"worst relative error {worst:.1e}")


def test_criterion_06_sigma_comparability():
    t0 = time.perf_counter()
    sigmas = np.array([0.01, 0.02, 0.04, 0.08])
    lam = 0.2
    curv, beta_mass = [], []
    for s in sigmas:
        mu = generate(GeneratorSpec("plane", d=2, n=3, count=900, noise_sigma=float(s), seed=42))
        x = centroid_atom(mu)
        t = 0.6 * mu.support_diameter()
        r = local_curvature_sq(mu, x, t, lam, MT(2), mode=MonteCarlo(400_000, 3))
        b = beta_p(mu, x, t, 2.0)
        curv.append(r.value)
        beta_mass.append(b.beta**2 * b.mass)
    ls = np.log(sigmas)
    slope_c = np.polyfit(ls, np.log(curv), 1)[0]
    slope_b = np.polyfit(ls, np.log(beta_mass), 1)[0]
    ratios = np.array(curv) / np.array(beta_mass)
    spread = ratios.max() / ratios.min()
    elapsed = time.perf_counter() - t0
    ok = abs(slope_c - 2) <= 0.3 and abs(slope_b - 2) <= 0.3 and spread < 10 and elapsed < 300
    report(
        6,
        "sigma-comparability",
        ok,
        f"slopes {slope_c:.2f}/{slope_b:.2f}, ratio spread {spread:.2f}, {elapsed:.0f}s",
    )


def test_criterion_07_plane_selection():
    cases = []
    for fi, sigma in enumerate((0.01, 0.02, 0.04)):
        for rep in range(5):
            cases.append((dict(family="plane", d=2, n=3, count=400, noise_sigma=sigma), 0.55, 10 * fi + rep))
    for rep in range(7):
        cases.append((dict(family="lipschitz_graph", d=1, n=2, count=200), 0.55, 40 + rep))
    for rep in range(6):
        cases.append((dict(family="lipschitz_graph", d=2, n=3, count=400), 0.55, 50 + rep))
    for rep in range(6):
        cases.append((dict(family="sphere", d=1, n=2, count=200), 0.35, 60 + rep))
    for rep in range(6):
        cases.append((dict(family="sphere", d=2, n=3, count=500), 0.35, 70 + rep))
    assert len(cases) == 40
    ok_count = 0
    worst = 0.0
    for kw, tfrac, code in cases:
        seed = 1000 + 97 * code
        mu = generate(GeneratorSpec(seed=seed, **kw))
        x = centroid_atom(mu)
        t = tfrac * mu.support_diameter()
        sel = select_plane(mu, x, t, n_candidates=64, mc=MonteCarlo(20_000, seed), seed=seed)
        worst = max(worst, sel.ratio)
        if sel.ratio <= 4.0:
            ok_count += 1
    report(
        7,
        "plane-selection",
        ok_count >= 38,
        f"{ok_count}/40 trials with ratio <= 4 (worst {worst:.2f})",
    )


def test_criterion_08_separation():
    instances = [
        GeneratorSpec("plane", d=1, n=2, count=128, seed=1),
        GeneratorSpec("plane", d=2, n=3, count=300, seed=2),
        GeneratorSpec("plane", d=2, n=3, count=300, noise_sigma=0.02, seed=3),
        GeneratorSpec("lipschitz_graph", d=1, n=2, count=150, seed=4),
        GeneratorSpec("lipschitz_graph", d=2, n=3, count=300, seed=5),
        GeneratorSpec("sphere", d=1, n=2, count=160, seed=6),
        GeneratorSpec("sphere", d=2, n=3, count=260, seed=7),
        GeneratorSpec("segment", d=1, n=3, count=100, seed=8),
        GeneratorSpec("cantor_product", d=1, n=2, level=3, seed=0),
    ]
    min_omega = np.inf
    for spec in instances:
        mu = generate(spec)
        x = centroid_atom(mu)
        t = 0.7 * mu.support_diameter()
        sep = find_separated_balls(mu, x, t, sample_budget=10_000, seed=11)
        min_omega = min(min_omega, sep.omega_empirical)
        assert sep.omega_empirical > 0, spec.family
    # rank-deficient diagnostics
    line = np.linspace(0, 1, 20)[:, None] * np.array([[1.0, 0.3, 0.0]])
    with pytest.raises(SeparationError) as err:
        find_separated_balls(EmpiricalMeasure(line, np.ones(20), 2), line[10], 2.0)
    stage_ok = err.value.stage == 2
    rng = np.random.default_rng(3)
    U = rng.uniform(size=(24, 2))
    planar = np.concatenate([U, U @ np.array([[0.4], [0.2]]), np.zeros((24, 1))], axis=1)
    with pytest.raises(SeparationError) as err:
        find_separated_balls(EmpiricalMeasure(planar, np.ones(24), 3), planar.mean(0), 2.0)
    stage_ok = stage_ok and err.value.stage == 3
    with pytest.raises(SeparationError) as err:
        find_separated_balls(
            EmpiricalMeasure(np.eye(2), np.ones(2), 1), np.array([0.5, 0.5]), 2.0
        )
    stage_ok = stage_ok and err.value.stage == 0
    report(
        8,
        "d-separation",
        bool(stage_ok and min_omega > 0),
        f"min omega {min_omega:.2e}, diagnostics correct: {stage_ok}",
    )


def test_criterion_09_cantor_vs_segment():
    t0 = time.perf_counter()
    root = Ball(np.array([0.5, 0.5]), np.sqrt(2) / 2 * 1.001)
    curv, curv_se, jones = {}, {}, {}
    for level in (2, 3, 4, 5, 6):
        mu = generate(GeneratorSpec("cantor_product", d=1, n=2, level=level))
        mass = mu.total_mass
        if level <= 4:
            r = ball_curvature_sq(mu, root, spec=MT(1))
        else:
            n_samples = 6 * 10**7 if level == 5 else 12 * 10**7
            r = ball_curvature_sq(mu, root, spec=MT(1), mode=MonteCarlo(n_samples, 0))
        curv[level] = r.value / mass
        curv_se[level] = r.std_error / mass
        jones[level] = jones_flatness(mu, root, levels=2 * level).value / mass
    levels = sorted(curv)
    curv_monotone = all(curv[a] < curv[b] for a, b in zip(levels, levels[1:]))
    jones_monotone = all(jones[a] < jones[b] for a, b in zip(levels, levels[1:]))
    # MC gaps must clear the combined statistical error
    gaps_significant = all(
        curv[b] - curv[a] > 3 * np.hypot(curv_se[a], curv_se[b])
        for a, b in zip(levels, levels[1:])
    )

    seg = generate(GeneratorSpec("segment", d=1, n=2, count=256, seed=5))
    seg_ball = Ball(seg.points.mean(axis=0), 0.75 * seg.support_diameter())
    seg_curv = ball_curvature_sq(seg, seg_ball, spec=MT(1)).value / seg.total_mass
    seg_jones = jones_flatness(seg, seg_ball, levels=8).value / seg.total_mass
    elapsed = time.perf_counter() - t0
    ok = (
        curv_monotone
        and jones_monotone
        and gaps_significant
        and curv[6] > 5 * max(seg_curv, 1e-300) * 1e8  # segment is ~float noise
        and curv[6] > 5 * seg_curv
        and jones[6] > 5 * seg_jones
        and seg_curv < 1e-8
        and seg_jones < 1e-8
        and elapsed < 600
    )
    report(
        9,
        "cantor-vs-segment",
        ok,
        f"curv L2..L6 {[round(curv[k], 3) for k in levels]}, "
        f"jones {[round(jones[k], 4) for k in levels]}, segment {seg_curv:.1e}/{seg_jones:.1e}, "
        f"{elapsed:.0f}s",
    )


def test_criterion_10_leger_direction():
    mu = generate(GeneratorSpec("lipschitz_graph", d=2, n=3, count=600, noise_sigma=0.03, seed=77))
    cfg = VerifyConfig(seed=5, mc_samples=150_000, n_centers=8, n_scales=1, levels=3)
    rep = verify_suite("leger", mu, cfg)
    used = [r for r in rep.rows if r["reason"] == ""]
    violations = sum(
        1
        for r in rep.rows
        if r["reason"] != "" and r.get("jones_tilde_third_B", 0.0) > 1e-10
    )
    ratios = [r["ratio"] for r in used]
    stable = bool(ratios) and max(ratios) / min(ratios) < 20
    ok = violations == 0 and stable and len(used) == len(rep.rows)
    report(
        10,
        "leger-direction",
        ok,
        f"{len(used)} rows, ratio spread {max(ratios) / min(ratios):.2f}, "
        f"{violations} violations",
    )


def test_criterion_11_intersection_bound():
    rng = np.random.default_rng(99)
    checked = 0
    failures = 0
    for _ in range(200):
        masses = [Fraction(int(v), 1) for v in rng.integers(1, 25, size=6)]
        total = sum(masses)
        nu = [m / total for m in masses]
        xi_target = Fraction(int(rng.integers(55, 98)), 100)
        sets = []
        for _ in range(int(rng.integers(3, 6))):
            order = rng.permutation(6)
            acc, members = Fraction(0), []
            for j in order:
                if acc >= xi_target:
                    break
                members.append(int(j))
                acc += nu[j]
            sets.append(set(members))
        xi = min(sum(nu[j] for j in s) for s in sets)
        if not 0 < xi < 1:
            continue
        for k in range(len(sets)):
            inter = sets[0]
            for s in sets[1 : k + 1]:
                inter = inter & s
            inter_mass = sum(nu[j] for j in inter)
            checked += 1
            if inter_mass < (k + 1) * xi - k:  # exact rational comparison
                failures += 1
    report(
        11,
        "intersection-bound",
        failures == 0 and checked >= 200,
        f"{checked} exact checks, {failures} failures",
    )
