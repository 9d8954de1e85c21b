"""Curvature functionals integrated over tuples of measure atoms.

The product measure semantics are literal: exact mode enumerates all
ordered (d+2)-tuples of in-ball atoms with repetition (repeats contribute
zero through degenerate kernels), weighting each tuple by the product of
its atom weights. Monte Carlo draws atoms i.i.d. proportionally to weight
restricted to the ball, averages indicator * kernel and multiplies by
mass^(d+2); its per-sample randomness comes from counter-based streams, so
results do not depend on chunking or scheduling.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels, _rng
from .errors import BudgetExceededError, InvalidInputError
from .measure import Ball, EmpiricalMeasure
from .simplex import CurvatureSpec

EXACT = "exact"
DEFAULT_BUDGET = 10**8
_CHUNK = 1 << 18

_SYMMETRIC_KIND = {
    "mt": _kernels.MT_SQ,
    "min": _kernels.MIN_SQ,
    "max": _kernels.MAX_SQ,
    "vol": _kernels.VOL_SQ,
    "alg": _kernels.ALG_SQ,
    "leger": _kernels.LEGER_POW,
}


@dataclass(frozen=True)
class MonteCarlo:
    """Plain i.i.d. sampling plan: sample count and stream seed."""

    n_samples: int
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidInputError("MonteCarlo needs n_samples >= 1")


@dataclass(frozen=True)
class IntegralResult:
    value: float
    std_error: float
    tuples_evaluated: int
    accepted_fraction: float

    def to_dict(self):
        return {
            "value": self.value,
            "std_error": self.std_error,
            "tuples_evaluated": self.tuples_evaluated,
            "accepted_fraction": self.accepted_fraction,
        }


def _run_exact(P, w, k, kind, d, power, domain, budget):
    m = P.shape[0]
    total = m**k
    if total > budget:
        raise BudgetExceededError(total, budget)
    shape = (m,) * k
    value = 0.0
    accepted = 0
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total))
        idx = np.unravel_index(flat, shape)
        gather = np.stack(idx, axis=1)
        vals, min_edge, diam = _kernels.batch_kernel_indexed(P, gather, kind, d, power)
        mask = domain(min_edge, diam)
        wprod = w[idx[0]].copy()
        for j in range(1, k):
            wprod *= w[idx[j]]
        value += float(np.sum(vals * wprod * mask))
        accepted += int(mask.sum())
    return IntegralResult(value, 0.0, total, accepted / total if total else 0.0)


def _run_mc(P, w, k, kind, d, power, domain, mc):
    cum = np.cumsum(w)
    mass = cum[-1]
    scale = mass**k
    n = mc.n_samples
    s1 = 0.0
    s2 = 0.0
    accepted = 0
    for start in range(0, n, _CHUNK):
        count = min(_CHUNK, n - start)
        u = _rng.sample_uniforms(mc.seed, start, count, k)
        idx = _kernels.weighted_indices(cum, u)
        vals, min_edge, diam = _kernels.batch_kernel_indexed(P, idx, kind, d, power)
        mask = domain(min_edge, diam)
        f = vals * mask * scale
        s1 += float(f.sum())
        s2 += float(np.dot(f, f))
        accepted += int(mask.sum())
    mean = s1 / n
    var = max(s2 - n * mean * mean, 0.0) / (n - 1) if n > 1 else 0.0
    return IntegralResult(mean, float(np.sqrt(var / n)), n, accepted / n)


def _integrate(mu, center, radius, kind, d, power, domain, mode, budget):
    idx = mu.indices_in_ball(center, radius)
    if idx.size == 0:
        return IntegralResult(0.0, 0.0, 0, 0.0)
    P = mu.points[idx]
    w = mu.weights[idx]
    k = d + 2
    if mode == EXACT:
        return _run_exact(P, w, k, kind, d, power, domain, budget)
    if isinstance(mode, MonteCarlo):
        return _run_mc(P, w, k, kind, d, power, domain, mode)
    raise InvalidInputError(f"mode must be 'exact' or MonteCarlo, got {mode!r}")


def _spec_or_default(spec, mu):
    return CurvatureSpec("mt", d=mu.d) if spec is None else spec


def local_curvature_sq(
    mu: EmpiricalMeasure,
    x,
    t: float,
    lam: float,
    spec: CurvatureSpec = None,
    mode=EXACT,
    budget: int = DEFAULT_BUDGET,
) -> IntegralResult:
    """Squared-curvature mass of tuples in B(x,t) with all edges >= lam * t."""
    if not 0 < lam < 2:
        raise InvalidInputError("local integral needs 0 < lambda < 2")
    if not t > 0:
        raise InvalidInputError("scale t must be positive")
    spec = _spec_or_default(spec, mu)
    kind = _SYMMETRIC_KIND[spec.kind]
    floor = lam * t

    def domain(min_edge, diam):
        return min_edge >= floor

    return _integrate(mu, x, t, kind, spec.d, spec.power, domain, mode, budget)


def ball_curvature_sq(
    mu: EmpiricalMeasure,
    ball: Ball,
    lam: float = None,
    spec: CurvatureSpec = None,
    mode=EXACT,
    budget: int = DEFAULT_BUDGET,
) -> IntegralResult:
    """Squared-curvature mass of a ball: all tuples, or the well-scaled set
    min(X) >= lam * diam(X) > 0 when lam is given.

    For the mt kind the integrand is the single-vertex form
    psin_0^2/diam^{d(d+1)}, which integrates identically over these
    permutation-invariant domains.
    """
    spec = _spec_or_default(spec, mu)
    kind = _kernels.MT_X0_SQ if spec.kind == "mt" else _SYMMETRIC_KIND[spec.kind]
    if lam is None:

        def domain(min_edge, diam):
            return np.ones(min_edge.shape, dtype=bool)

    else:
        if not 0 < lam <= 1:
            raise InvalidInputError("well-scaled domain needs 0 < lambda <= 1")

        def domain(min_edge, diam):
            return (min_edge >= lam * diam) & (diam > 0)

    return _integrate(
        mu, ball.center, ball.radius, kind, spec.d, spec.power, domain, mode, budget
    )


def psin_power_integral(
    mu: EmpiricalMeasure,
    ball: Ball,
    p: float,
    mode=EXACT,
    budget: int = DEFAULT_BUDGET,
    d: int = None,
) -> IntegralResult:
    """Integral of psin_0^p / diam^{d(d+1)} over all in-ball tuples."""
    if p < 1:
        raise InvalidInputError("psin power integral needs p >= 1")
    d = mu.d if d is None else int(d)
    # p == 2 shares the mt code path bit for bit
    kind = _kernels.MT_X0_SQ if p == 2.0 else _kernels.PSIN0_POW

    def domain(min_edge, diam):
        return np.ones(min_edge.shape, dtype=bool)

    return _integrate(mu, ball.center, ball.radius, kind, d, float(p), domain, mode, budget)


def leger_integral(
    mu: EmpiricalMeasure,
    ball: Ball,
    mode=EXACT,
    budget: int = DEFAULT_BUDGET,
    d: int = None,
) -> IntegralResult:
    """Integral of the Leger kernel c_L^{d+1} over all in-ball tuples."""
    d = mu.d if d is None else int(d)

    def domain(min_edge, diam):
        return np.ones(min_edge.shape, dtype=bool)

    return _integrate(
        mu, ball.center, ball.radius, _kernels.LEGER_POW, d, 2.0, domain, mode, budget
    )
