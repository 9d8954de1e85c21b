"""Weighted empirical measures: spatial queries, mass functionals, regularity.

An EmpiricalMeasure is the computational stand-in for a d-regular measure:
a finite weighted point set with closed-ball range queries. It is immutable
after construction, so concurrent readers need no coordination. Its fidelity
as a proxy for a continuum measure holds at scales well above the interpoint
spacing; below that, ball masses are dominated by single atoms.
"""

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import InvalidInputError


@dataclass(frozen=True)
class Ball:
    """Closed ball."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        center = np.asarray(self.center, dtype=np.float64)
        if not self.radius > 0:
            raise InvalidInputError("ball radius must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    def scaled(self, gamma: float) -> "Ball":
        """Same center, radius multiplied by gamma."""
        return Ball(self.center, gamma * self.radius)


@dataclass(frozen=True)
class RegularityEstimate:
    c_mu: float
    probes: int
    scale_range: tuple


class EmpiricalMeasure:
    """Finite weighted point set with a KD-tree index.

    points: (m, n) array; weights: (m,) positive masses; d: intrinsic
    dimension used by mass-regularity bookkeeping and integrals.
    """

    def __init__(self, points, weights, d):
        points = np.ascontiguousarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] == 0:
            raise InvalidInputError("points must be a non-empty (m, n) array")
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("points contain non-finite coordinates")
        weights = np.ascontiguousarray(weights, dtype=np.float64)
        if weights.shape != (points.shape[0],):
            raise InvalidInputError("weights must be one positive value per point")
        if not np.all(weights > 0):
            raise InvalidInputError("weights must all be positive")
        if not 1 <= int(d) <= points.shape[1]:
            raise InvalidInputError("need 1 <= d <= ambient dimension")
        points.setflags(write=False)
        weights.setflags(write=False)
        self.points = points
        self.weights = weights
        self.d = int(d)
        self.index = cKDTree(points)
        self._total = float(weights.sum())

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def count(self) -> int:
        return self.points.shape[0]

    @property
    def total_mass(self) -> float:
        return self._total

    def support_diameter(self) -> float:
        """Diameter of the point set (exact; uses the convex-hull-free
        pairwise maximum over a bounding subset for small m, full pairwise
        otherwise)."""
        P = self.points
        if P.shape[0] == 1:
            return 0.0
        if P.shape[0] <= 2048:
            diff = P[:, None, :] - P[None, :, :]
            return float(np.sqrt((diff**2).sum(-1)).max())
        # double sweep on coordinate extremes is not exact; fall back to
        # pairwise against extreme points of each axis, then refine
        cand = set()
        for ax in range(P.shape[1]):
            cand.add(int(np.argmin(P[:, ax])))
            cand.add(int(np.argmax(P[:, ax])))
        cand = sorted(cand)
        dmax = 0.0
        for i in cand:
            dmax = max(dmax, float(np.linalg.norm(P - P[i], axis=1).max()))
        return dmax

    def min_spacing(self) -> float:
        """Smallest positive distance between distinct points."""
        if self.count < 2:
            return 0.0
        dist, _ = self.index.query(self.points, k=2)
        pos = dist[:, 1][dist[:, 1] > 0]
        return float(pos.min()) if pos.size else 0.0

    def median_spacing(self) -> float:
        if self.count < 2:
            return 0.0
        dist, _ = self.index.query(self.points, k=2)
        return float(np.median(dist[:, 1]))

    def _check_center(self, center) -> np.ndarray:
        center = np.asarray(center, dtype=np.float64)
        if center.shape != (self.ambient_dim,):
            raise InvalidInputError(
                f"center dimension {center.shape} != ambient ({self.ambient_dim},)"
            )
        return center

    def indices_in_ball(self, center, radius: float) -> np.ndarray:
        """Indices of atoms in the closed ball, sorted by (distance, index)."""
        center = self._check_center(center)
        # KD-tree shortlist slightly inflated, then exact closed-ball filter
        cand = np.asarray(
            self.index.query_ball_point(center, radius * (1 + 1e-12) + 1e-300), dtype=np.intp
        )
        if cand.size == 0:
            return cand
        dist = np.linalg.norm(self.points[cand] - center, axis=1)
        keep = dist <= radius
        cand, dist = cand[keep], dist[keep]
        order = np.lexsort((cand, dist))
        return cand[order]

    def mass_in_ball(self, ball: Ball) -> float:
        idx = self.indices_in_ball(ball.center, ball.radius)
        return float(self.weights[idx].sum())


def mass_in_ball(mu: EmpiricalMeasure, ball: Ball) -> float:
    """Total weight of atoms with |p - center| <= radius."""
    return mu.mass_in_ball(ball)


def annulus_mass(mu: EmpiricalMeasure, x, r1: float, r2: float) -> float:
    """Mass of {y : r1 < |x-y| <= r2}; exactly the difference of ball masses."""
    if not 0 <= r1 < r2:
        raise InvalidInputError("annulus needs 0 <= r1 < r2")
    outer = mu.mass_in_ball(Ball(x, r2))
    inner = mu.mass_in_ball(Ball(x, r1)) if r1 > 0 else 0.0
    return outer - inner


def tube_mass(mu: EmpiricalMeasure, plane, eta: float, ball: Ball) -> float:
    """Mass of atoms inside the ball at distance <= eta from the plane."""
    if eta < 0:
        raise InvalidInputError("tube height must be >= 0")
    idx = mu.indices_in_ball(ball.center, ball.radius)
    if idx.size == 0:
        return 0.0
    dist = plane.distances(mu.points[idx])
    return float(mu.weights[idx][dist <= eta].sum())


def farthest_point_indices(points, k: int, start: int = 0) -> np.ndarray:
    """Greedy farthest-point subsample of the rows, deterministic."""
    P = np.asarray(points, dtype=np.float64)
    m = P.shape[0]
    k = min(k, m)
    chosen = np.empty(k, dtype=np.intp)
    chosen[0] = start
    dist = np.linalg.norm(P - P[start], axis=1)
    for j in range(1, k):
        nxt = int(np.argmax(dist))
        chosen[j] = nxt
        dist = np.minimum(dist, np.linalg.norm(P - P[nxt], axis=1))
    return chosen


def default_probe_grid(mu: EmpiricalMeasure, n_centers: int = 64, n_scales: int = 8):
    """Deterministic probe grid: FPS centers and dyadic scales clamped to
    (smallest interpoint distance, support diameter]."""
    diam = mu.support_diameter()
    lo = mu.min_spacing()
    if diam <= 0 or lo <= 0:
        raise InvalidInputError("probe grid needs at least two distinct points")
    centers = mu.points[farthest_point_indices(mu.points, n_centers)]
    scales = diam / 2.0 ** np.arange(n_scales)
    scales = scales[scales > lo]
    if scales.size == 0:
        scales = np.array([diam])
    return centers, scales


def estimate_regularity(
    mu: EmpiricalMeasure, probe_centers=None, scales=None
) -> RegularityEstimate:
    """Empirical regularity constant over a finite probe grid.

    c_mu = max over probed (x, t) of max(mass(B(x,t))/t^d, t^d/mass(B(x,t))).
    The supremum over all balls is uncomputable; the grid is the documented
    stand-in.
    """
    if probe_centers is None or scales is None:
        dc, ds = default_probe_grid(mu)
        probe_centers = dc if probe_centers is None else probe_centers
        scales = ds if scales is None else scales
    probe_centers = np.atleast_2d(np.asarray(probe_centers, dtype=np.float64))
    scales = np.atleast_1d(np.asarray(scales, dtype=np.float64))
    if probe_centers.size == 0 or scales.size == 0:
        raise InvalidInputError("empty probe set")
    if np.any(scales <= 0):
        raise InvalidInputError("scales must be positive")
    c = 1.0
    probes = 0
    for x in probe_centers:
        for t in scales:
            mass = mu.mass_in_ball(Ball(x, float(t)))
            td = float(t) ** mu.d
            if mass > 0:
                c = max(c, mass / td, td / mass)
            else:
                c = np.inf
            probes += 1
    return RegularityEstimate(float(c), probes, (float(scales.min()), float(scales.max())))


def rescale(mu: EmpiricalMeasure, s: float) -> EmpiricalMeasure:
    """Points scaled by s, weights by s^d (mass covariance)."""
    if not s > 0:
        raise InvalidInputError("rescale factor must be positive")
    return EmpiricalMeasure(mu.points * s, mu.weights * s**mu.d, mu.d)


def default_weights(points, d: int) -> np.ndarray:
    """Uniform weights making the total mass (support diameter)^d."""
    P = np.asarray(points, dtype=np.float64)
    diff = P[:, None, :] - P[None, :, :]
    diam = float(np.sqrt((diff**2).sum(-1)).max()) if P.shape[0] > 1 else 1.0
    if diam <= 0:
        diam = 1.0
    return np.full(P.shape[0], diam**d / P.shape[0])


def save_csv(mu: EmpiricalMeasure, path):
    header = [f"x{i}" for i in range(mu.ambient_dim)] + ["weight"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for p, w in zip(mu.points, mu.weights):
            writer.writerow([f"{v:.17g}" for v in p] + [f"{w:.17g}"])


def load_csv(path, d: int) -> EmpiricalMeasure:
    """Point cloud CSV: n coordinate columns, optional final weight column.

    A header row is optional; the weight column is recognized by the header
    name 'weight' or 'w'. Headerless files are read as coordinates only and
    get the default weights.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise InvalidInputError(f"csv file {path} is empty")
    has_weight = False
    first = rows[0]
    try:
        [float(c) for c in first]
        data_rows = rows
    except ValueError:
        name = first[-1].strip().lower()
        has_weight = name in ("weight", "w")
        data_rows = rows[1:]
    try:
        data = np.array([[float(c) for c in r] for r in data_rows], dtype=np.float64)
    except ValueError as exc:
        raise InvalidInputError(f"csv field is not numeric: {exc}") from None
    if data.ndim != 2 or data.shape[0] == 0:
        raise InvalidInputError("csv has no data rows")
    if has_weight:
        if data.shape[1] < 2:
            raise InvalidInputError("csv weight column requires at least one coordinate")
        points, weights = data[:, :-1], data[:, -1]
    else:
        points = data
        weights = default_weights(points, d)
    return EmpiricalMeasure(points, weights, d)


def load_dataset(path, d: int = None) -> EmpiricalMeasure:
    """Load a measure from CSV, or from a JSON generator descriptor."""
    text_path = str(path)
    if text_path.endswith(".json"):
        with open(text_path) as fh:
            desc = json.load(fh)
        from .datasets import from_descriptor

        return from_descriptor(desc)
    if d is None:
        raise InvalidInputError("loading a csv point cloud requires d")
    return load_csv(text_path, d)
