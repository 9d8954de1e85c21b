"""Least squares d-planes, Jones beta numbers, multiscale flatness.

beta for p = 2 is exact (weighted principal plane). For p != 2 the infimum
is approximated by iteratively reweighted fitting started from the p = 2
plane; the result never exceeds the p = 2 plane's L_p error. Flatness
functionals discretize the scale integral dyadically with weight ln 2 per
level and replace the center integral by the weighted sum over support
atoms in the ball.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .measure import Ball, EmpiricalMeasure
from .simplex import AffinePlane

IRLS_MAX_ITER = 50
IRLS_REL_TOL = 1e-8
IRLS_RESIDUAL_FLOOR = 1e-12


@dataclass(frozen=True)
class BetaResult:
    beta: float
    plane: AffinePlane
    p: float
    ball: Ball
    mass: float


@dataclass(frozen=True)
class FlatnessResult:
    value: float
    ball: Ball
    scale_grid: tuple
    per_scale: tuple  # records (center, scale, beta)


def _principal_plane(P, w, d):
    """Weighted centroid + top-d principal directions; deterministic signs.

    Returns (plane, residual_sq) with residual_sq = sum_i w_i dist_i^2
    accumulated from explicit per-point residuals; the trace identity would
    cancel catastrophically on flat inputs and floor beta near sqrt(eps).
    """
    wsum = w.sum()
    centroid = (w[:, None] * P).sum(axis=0) / wsum
    R = P - centroid
    cov = (R * w[:, None]).T @ R
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evecs = evecs[:, order]
    basis = np.empty((d, P.shape[1]))
    for j in range(d):
        v = evecs[:, j]
        pivot = int(np.argmax(np.abs(v)))
        basis[j] = v if v[pivot] >= 0 else -v
    resid = R - (R @ basis.T) @ basis
    residual_sq = float(np.sum(w * np.einsum("ij,ij->i", resid, resid)))
    return AffinePlane(centroid, basis), residual_sq


def lsq_plane(mu: EmpiricalMeasure, ball: Ball, d: int = None):
    """Exact weighted least squares d-plane on a ball and its beta_2.

    beta_2^2 = sum_B w (dist/diam(B))^2 / mass(B) with diam(B) = 2 radius;
    zero (with a point plane at the ball center) when the ball is empty.
    """
    d = mu.d if d is None else int(d)
    if d > mu.ambient_dim:
        raise InvalidInputError("plane dimension exceeds ambient dimension")
    idx = mu.indices_in_ball(ball.center, ball.radius)
    if idx.size == 0:
        plane = AffinePlane(np.asarray(ball.center, dtype=float), np.eye(mu.ambient_dim)[:d])
        return plane, 0.0
    P = mu.points[idx]
    w = mu.weights[idx]
    plane, residual_sq = _principal_plane(P, w, d)
    mass = w.sum()
    beta2 = math.sqrt(residual_sq / mass) / (2.0 * ball.radius)
    return plane, float(beta2)


def _lp_objective(P, w, plane, p, radius):
    dist = plane.distances(P)
    mass = w.sum()
    return float((np.sum(w * (dist / (2.0 * radius)) ** p) / mass) ** (1.0 / p))


def beta_p(mu: EmpiricalMeasure, x, t: float, p: float = 2.0, d: int = None) -> BetaResult:
    """Jones beta number of order p on the ball B(x, t).

    p = 2 is exact; p != 2 refines the p = 2 plane by reweighted fitting
    (weights ~ residual^(p-2) with residuals floored) and keeps the best
    plane seen, so the result is an upper bound for the true infimum that
    never exceeds the p = 2 plane's L_p error.
    """
    if p < 1:
        raise InvalidInputError("beta_p requires p >= 1")
    if not t > 0:
        raise InvalidInputError("beta_p requires t > 0")
    d = mu.d if d is None else int(d)
    ball = Ball(x, t)
    idx = mu.indices_in_ball(ball.center, ball.radius)
    if idx.size == 0:
        plane = AffinePlane(np.asarray(ball.center, dtype=float), np.eye(mu.ambient_dim)[:d])
        return BetaResult(0.0, plane, p, ball, 0.0)
    P = mu.points[idx]
    w = mu.weights[idx]
    mass = float(w.sum())
    plane, residual_sq = _principal_plane(P, w, d)
    if p == 2.0:
        beta2 = math.sqrt(residual_sq / mass) / (2.0 * t)
        return BetaResult(float(beta2), plane, p, ball, mass)
    best_plane = plane
    best = _lp_objective(P, w, plane, p, t)
    prev = best
    for _ in range(IRLS_MAX_ITER):
        resid = np.maximum(best_plane.distances(P), IRLS_RESIDUAL_FLOOR)
        w_mod = w * resid ** (p - 2.0)
        cand, _ = _principal_plane(P, w_mod, d)
        obj = _lp_objective(P, w, cand, p, t)
        if obj < best:
            best_plane, best = cand, obj
        if prev > 0 and abs(prev - obj) <= IRLS_REL_TOL * prev:
            break
        prev = obj
    return BetaResult(float(best), best_plane, p, ball, mass)


def default_levels(mu: EmpiricalMeasure, ball: Ball) -> int:
    """K = log2(diam(B) / median interpoint spacing) - 1, at least 1."""
    spacing = mu.median_spacing()
    diam = 2.0 * ball.radius
    if spacing <= 0 or diam <= spacing:
        return 1
    return max(1, int(math.floor(math.log2(diam / spacing))) - 1)


def jones_flatness(
    mu: EmpiricalMeasure,
    ball: Ball,
    p: float = 2.0,
    flavor: str = "J",
    levels: int = None,
) -> FlatnessResult:
    """Dyadic multiscale flatness of the measure restricted to a ball.

    Sum over scales t_k = diam(B)/2^k (k = 0..K-1, weight ln 2 each) and
    over support atoms x in B of w(x) beta_p^q(x, t_k), with q = 2 for
    flavor "J" and q = p for "J_tilde". The flavors coincide at p = 2.
    """
    if flavor not in ("J", "J_tilde"):
        raise InvalidInputError("flavor must be 'J' or 'J_tilde'")
    K = default_levels(mu, ball) if levels is None else int(levels)
    if K < 1:
        raise InvalidInputError("levels must be >= 1")
    q = 2.0 if flavor == "J" else float(p)
    idx = mu.indices_in_ball(ball.center, ball.radius)
    scales = tuple(2.0 * ball.radius / 2.0**k for k in range(K))
    records = []
    total = 0.0
    ln2 = math.log(2.0)
    for i in idx:
        x = mu.points[i]
        wi = mu.weights[i]
        for t in scales:
            b = beta_p(mu, x, t, p)
            records.append((tuple(x), t, b.beta))
            total += wi * b.beta**q * ln2
    return FlatnessResult(float(total), ball, scales, tuple(records))
