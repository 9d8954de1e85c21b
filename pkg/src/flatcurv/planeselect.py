"""Curvature-guided selection of an approximate least squares d-plane.

Candidates are simplices with one support atom per half-radius separated
ball. Each candidate is scored by two conditional curvature integrals over
completions of the candidate by free measure atoms: a single-variable
integral (the E functional) and the worst two-variable integral over
vertex replacements (the A functional). The selected plane is the span of
the candidate minimizing the larger normalized score; its least squares
error is then certified exactly against the principal-plane optimum.

Score normalizations (documented for the report schema): the raw E score
is multiplied by t^{d(d+1)} / mass(B); the raw A score by t^{d^2} /
mass(B)^2. Both are constant rescalings at fixed (x, t), so the argmin is
unaffected; they make scores comparable across scales.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rng import sample_uniforms
from .errors import InvalidCandidateError, InvalidInputError, SelectionError
from .integrals import EXACT, MonteCarlo
from .measure import Ball, EmpiricalMeasure
from .planefit import lsq_plane
from .separation import SeparatedBalls, find_separated_balls
from .simplex import AffinePlane, affine_span

_RATIO_FLOOR = 1e-15


@dataclass(frozen=True)
class CandidateScore:
    candidate: np.ndarray  # (d+1, n)
    e_score: float
    a_score: float
    plane: AffinePlane
    e_norm: float
    a_norm: float


@dataclass(frozen=True)
class PlaneSelection:
    plane: AffinePlane
    error_sq: float
    beta2_ref: float
    ratio: float
    candidates_tried: int
    lambda0: float
    separation: SeparatedBalls
    extra_vertex_dist: float
    scores: tuple = field(default=(), repr=False)

    def to_dict(self, include_scores=False):
        out = {
            "plane_base": self.plane.base.tolist(),
            "plane_basis": self.plane.basis.tolist(),
            "error_sq": self.error_sq,
            "beta2_ref": self.beta2_ref,
            "ratio": self.ratio,
            "candidates_tried": self.candidates_tried,
            "lambda0": self.lambda0,
            "extra_vertex_dist": self.extra_vertex_dist,
            "separation": self.separation.to_dict(),
        }
        if include_scores:
            out["scores"] = [
                {
                    "e_score": s.e_score,
                    "a_score": s.a_score,
                    "e_norm": s.e_norm,
                    "a_norm": s.a_norm,
                }
                for s in self.scores
            ]
        return out


def _complete_single(cand, atoms):
    m = atoms.shape[0]
    k = cand.shape[0] + 1
    X = np.empty((m, k, cand.shape[1]))
    X[:, : k - 1] = cand[None]
    X[:, k - 1] = atoms
    return X


def _one_var_integral(cand, P, w, d, floor, mc):
    """Sum or MC estimate of psin_0^2/diam^{d(d+1)} over completions by one
    atom, restricted to completions with min edge >= floor."""
    mass = w.sum()
    if mc is None:
        X = _complete_single(cand, P)
        vals, min_edge, _ = _kernels.batch_kernel(X, _kernels.MT_X0_SQ, d, 2.0)
        return float(np.sum(vals * w * (min_edge >= floor)))
    cum = np.cumsum(w)
    u = sample_uniforms(mc.seed, 0, mc.n_samples, 1)[:, 0]
    idx = np.minimum(np.searchsorted(cum, u * mass, side="right"), P.shape[0] - 1)
    X = _complete_single(cand, P[idx])
    vals, min_edge, _ = _kernels.batch_kernel(X, _kernels.MT_X0_SQ, d, 2.0)
    return float(np.mean(vals * (min_edge >= floor)) * mass)


def _two_var_integral(cand, i, P, w, d, floor, mc):
    """Same with vertex i replaced by one free atom and another appended."""
    mass = w.sum()
    k = cand.shape[0] + 1
    n = cand.shape[1]
    if mc is None:
        m = P.shape[0]
        yi, zi = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
        yi, zi = yi.ravel(), zi.ravel()
    else:
        cum = np.cumsum(w)
        u = sample_uniforms(mc.seed, 0, mc.n_samples, 2)
        yi = np.minimum(np.searchsorted(cum, u[:, 0] * mass, side="right"), P.shape[0] - 1)
        zi = np.minimum(np.searchsorted(cum, u[:, 1] * mass, side="right"), P.shape[0] - 1)
    X = np.empty((yi.size, k, n))
    X[:, : k - 1] = cand[None]
    X[:, i] = P[yi]
    X[:, k - 1] = P[zi]
    vals, min_edge, _ = _kernels.batch_kernel(X, _kernels.MT_X0_SQ, d, 2.0)
    keep = min_edge >= floor
    if mc is None:
        return float(np.sum(vals * keep * w[yi] * w[zi]))
    return float(np.mean(vals * keep) * mass * mass)


def score_candidate(
    mu: EmpiricalMeasure,
    x,
    t: float,
    lambda0: float,
    cand,
    mc: MonteCarlo = None,
) -> CandidateScore:
    """Score one candidate simplex (d+1 vertices, one per separated ball).

    e_score integrates the single-vertex squared polar sine kernel over
    admissible one-atom completions (min edge of the completed simplex
    >= lambda0 * t, all vertices in B(x, t)); a_score is the worst of the
    analogous two-variable integrals over vertex replacements. mc=None
    enumerates atoms exactly.
    """
    cand = np.asarray(cand, dtype=np.float64)
    d = mu.d
    if cand.shape != (d + 1, mu.ambient_dim):
        raise InvalidCandidateError(f"candidate must have shape ({d + 1}, {mu.ambient_dim})")
    if affine_span(cand).dim < d:
        raise InvalidCandidateError("candidate vertices are affinely dependent")
    idx = mu.indices_in_ball(np.asarray(x, dtype=float), t)
    P = mu.points[idx]
    w = mu.weights[idx]
    if idx.size == 0:
        plane = affine_span(cand)
        return CandidateScore(cand, 0.0, 0.0, plane, 0.0, 0.0)
    mass = float(w.sum())
    floor = lambda0 * t
    e_raw = _one_var_integral(cand, P, w, d, floor, mc)
    a_raw = 0.0
    for i in range(d + 1):
        mc_i = None
        if mc is not None:
            mc_i = MonteCarlo(mc.n_samples, seed=(mc.seed * 1_000_003 + 7919 * (i + 1)) % 2**63)
        a_raw = max(a_raw, _two_var_integral(cand, i, P, w, d, floor, mc_i))
    e_norm = e_raw * t ** (d * (d + 1)) / mass
    a_norm = a_raw * t ** (d * d) / (mass * mass)
    return CandidateScore(cand, e_raw, a_raw, affine_span(cand), e_norm, a_norm)


def select_plane(
    mu: EmpiricalMeasure,
    x,
    t: float,
    lambda0: float = None,
    n_candidates: int = 64,
    mc: MonteCarlo = None,
    sample_budget: int = 10_000,
    seed: int = 0,
    keep_scores: bool = False,
) -> PlaneSelection:
    """Pick the plane spanned by the best-scoring separated candidate.

    Candidates draw one atom per half-radius separated ball (weight
    proportional sampling); the winner minimizes max(e_norm, a_norm), ties
    broken by candidate index. The certified error_sq is the exact
    normalized least squares error of the winning plane over in-ball atoms,
    reported against the principal-plane optimum beta2_ref.
    """
    if n_candidates < 1:
        raise InvalidInputError("need n_candidates >= 1")
    x = np.asarray(x, dtype=np.float64)
    d = mu.d
    sep = find_separated_balls(mu, x, t, sample_budget=sample_budget, seed=seed)
    if lambda0 is None:
        lambda0 = sep.radius / (2.0 * t)
    half = sep.radius / 2.0
    pools = []
    for i in range(d + 1):
        pool = mu.indices_in_ball(sep.centers[i], half)
        if pool.size == 0:
            raise SelectionError(f"half ball {i} holds no support atoms")
        pools.append(pool)

    u = sample_uniforms(seed, 0, n_candidates, d + 1)
    scored = []
    for c in range(n_candidates):
        vertices = np.empty((d + 1, mu.ambient_dim))
        for i, pool in enumerate(pools):
            wp = mu.weights[pool]
            cum = np.cumsum(wp)
            j = min(int(np.searchsorted(cum, u[c, i] * cum[-1], side="right")), pool.size - 1)
            vertices[i] = mu.points[pool[j]]
        try:
            mc_c = None
            if mc is not None:
                mc_c = MonteCarlo(mc.n_samples, seed=(mc.seed * 2_000_003 + c) % 2**63)
            scored.append(score_candidate(mu, x, t, lambda0, vertices, mc_c))
        except InvalidCandidateError:
            continue
    if not scored:
        raise SelectionError("no admissible candidate among the sampled tuples")

    key = np.array([max(s.e_norm, s.a_norm) for s in scored])
    best = int(np.argmin(key))
    chosen = scored[best]

    ball = Ball(x, t)
    idx = mu.indices_in_ball(x, t)
    w = mu.weights[idx]
    dist = chosen.plane.distances(mu.points[idx])
    mass = float(w.sum())
    error_sq = float(np.sum(w * (dist / (2.0 * t)) ** 2) / mass) if mass > 0 else 0.0
    _, beta2_ref = lsq_plane(mu, ball, d)
    err = np.sqrt(error_sq)
    if err < _RATIO_FLOOR and beta2_ref < _RATIO_FLOOR:
        ratio = 1.0
    else:
        ratio = float(err / max(beta2_ref, _RATIO_FLOOR))

    extra_pool = mu.indices_in_ball(sep.centers[d + 1], half)
    if extra_pool.size:
        extra = float(np.min(chosen.plane.distances(mu.points[extra_pool])) / t)
    else:
        extra = float("nan")

    return PlaneSelection(
        plane=chosen.plane,
        error_sq=error_sq,
        beta2_ref=beta2_ref,
        ratio=ratio,
        candidates_tried=len(scored),
        lambda0=float(lambda0),
        separation=sep,
        extra_vertex_dist=extra,
        scores=tuple(scored) if keep_scores else (),
    )
