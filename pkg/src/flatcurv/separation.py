"""Greedy construction of d-separated ball collections on a measure.

The greedy variant replaces existence thresholds with argmax selections:
the first vertex is the support atom nearest the query center, each of the
next d vertices maximizes the distance to the affine span of the vertices
chosen so far, and the final vertex maximizes the smallest distance to the
spans of the d-point faces of the base simplex. Candidate vertices are
drawn from the concentric half-radius ball, which makes containment of the
returned balls in B(x, t) structural (centers within t/2, radii at most
t/4). The returned radius starts at a quarter of the smallest attained
selection distance and is halved (at most 6 times) until a sampled
verification certifies a positive separation constant, pairwise
disjointness and containment.

The verified constant omega_empirical is a sampled lower estimate of the
true infimum over the ball product, scaled by t^d.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._rng import substream
from .errors import InvalidInputError, SeparationError
from .measure import Ball, EmpiricalMeasure
from .simplex import affine_span

MAX_HALVINGS = 6
_STAGE_EPS_REL = 1e-9


@dataclass(frozen=True)
class SeparatedBalls:
    centers: np.ndarray  # (d+2, n) support atoms
    radius: float
    omega_empirical: float
    parent: Ball
    verification_samples: int

    def to_dict(self):
        return {
            "centers": self.centers.tolist(),
            "radius": self.radius,
            "omega_empirical": self.omega_empirical,
            "parent_center": np.asarray(self.parent.center).tolist(),
            "parent_radius": self.parent.radius,
            "verification_samples": self.verification_samples,
        }


def intersection_lower_bound(xi: float, k: int) -> float:
    """Mass lower bound (k+1) xi - k for the intersection of k+1 sets of
    probability-measure >= xi each; non-positive values signal a vacuous
    bound."""
    if not 0 < xi < 1:
        raise InvalidInputError("need 0 < xi < 1")
    if k < 0:
        raise InvalidInputError("k must be >= 0")
    return (k + 1) * xi - k


def _uniform_in_balls(rng, centers, radius, count):
    """count sample tuples, one uniform point per ball; (count, k, n)."""
    k, n = centers.shape
    g = rng.normal(size=(count, k, n))
    g /= np.linalg.norm(g, axis=2, keepdims=True)
    r = radius * rng.uniform(size=(count, k, 1)) ** (1.0 / n)
    return centers[None, :, :] + g * r


def sampled_omega(centers, radius, t, d, sample_budget, seed):
    """Smallest sampled face content over cross-ball tuples, scaled by t^d."""
    rng = substream(seed, 0)
    k = centers.shape[0]
    best = np.inf
    done = 0
    chunk = 4096
    while done < sample_budget:
        count = min(chunk, sample_budget - done)
        X = _uniform_in_balls(rng, centers, radius, count)
        face_min = np.full(count, np.inf)
        for i in range(k):
            face = np.delete(X, i, axis=1)
            face_min = np.minimum(face_min, _kernels.batch_content(face))
        best = min(best, float(face_min.min()))
        done += count
    return best / t**d


def find_separated_balls(
    mu: EmpiricalMeasure,
    x,
    t: float,
    sample_budget: int = 10_000,
    seed: int = 0,
) -> SeparatedBalls:
    """d+2 disjoint balls centered on support atoms in B(x,t) whose
    cross-ball tuples are d-separated, with a sampled verification of the
    separation constant.

    Raises SeparationError naming the failing stage when the in-ball
    support has too few atoms or spans fewer than d dimensions.
    """
    if not t > 0:
        raise InvalidInputError("scale t must be positive")
    d = mu.d
    x = np.asarray(x, dtype=np.float64)
    idx = mu.indices_in_ball(x, t / 2.0)
    if idx.size < d + 2:
        raise SeparationError(0, f"half ball holds {idx.size} atoms, need {d + 2}")
    P = mu.points[idx]
    eps = _STAGE_EPS_REL * t

    chosen = [0]  # P row indices; nearest atom to x comes first
    attained = []
    for stage in range(1, d + 1):
        span = affine_span(P[chosen])
        dist = span.distances(P)
        pick = int(np.argmax(dist))
        if dist[pick] <= eps:
            raise SeparationError(
                stage, f"support in the ball spans fewer than {stage} dimensions"
            )
        chosen.append(pick)
        attained.append(float(dist[pick]))

    base = P[chosen]  # (d+1, n)
    face_dist = np.empty((d + 1, P.shape[0]))
    for i in range(d + 1):
        face_dist[i] = affine_span(np.delete(base, i, axis=0)).distances(P)
    score = face_dist.min(axis=0)
    pick = int(np.argmax(score))
    if score[pick] <= eps:
        raise SeparationError(
            d + 1, "no atom keeps positive distance to every face of the base simplex"
        )
    chosen.append(pick)
    attained.append(float(score[pick]))

    centers = P[chosen]
    center_dist = np.linalg.norm(centers - x, axis=1)
    radius = min(attained) / 4.0
    for _ in range(MAX_HALVINGS + 1):
        contained = np.all(center_dist + radius <= t * (1 + 1e-12))
        pair = centers[:, None, :] - centers[None, :, :]
        pd = np.sqrt((pair**2).sum(-1))
        np.fill_diagonal(pd, np.inf)
        disjoint = pd.min() > 2 * radius
        if contained and disjoint:
            omega = sampled_omega(centers, radius, t, d, sample_budget, seed)
            if omega > 0:
                return SeparatedBalls(
                    centers, float(radius), float(omega), Ball(x, t), sample_budget
                )
        radius /= 2.0
    raise SeparationError(
        d + 1, "verification failed to certify positive separation after shrinking"
    )
