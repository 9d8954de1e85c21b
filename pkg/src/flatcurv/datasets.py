"""Deterministic point-cloud generators used throughout the experiments.

Every family produces an EmpiricalMeasure whose weights give unit d-density
(ball mass close to t^d at mid scales), so regularity-based inequalities are
meaningful without renormalization. Same spec + seed => bitwise identical
clouds.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .errors import InvalidInputError
from .measure import EmpiricalMeasure

FAMILIES = ("plane", "lipschitz_graph", "sphere", "cantor_product", "segment")


@dataclass(frozen=True)
class GeneratorSpec:
    family: str
    d: int
    n: int
    count: int = None
    level: int = None
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInputError(f"unknown generator family {self.family!r}")
        if self.d < 1 or self.d > self.n:
            raise InvalidInputError("need 1 <= d <= n")
        if self.noise_sigma < 0:
            raise InvalidInputError("noise_sigma must be >= 0")
        if self.family == "cantor_product":
            if self.level is None or self.level < 1:
                raise InvalidInputError("cantor_product needs level >= 1")
            if self.n != 2 * self.d:
                raise InvalidInputError("cantor_product lives in n = 2*d")
        else:
            if self.count is None or self.count < self.d + 2:
                raise InvalidInputError("count must be at least d + 2")
        if self.family == "sphere" and self.n != self.d + 1:
            raise InvalidInputError("sphere lives in n = d + 1")


def _rng(spec: GeneratorSpec) -> Generator:
    return Generator(Philox(key=spec.seed))


def _grid_coords(rng, d, count, jitter=0.4):
    """count cell-center points of the unit d-cube, jittered within cells."""
    side = max(2, math.ceil(count ** (1.0 / d)))
    axes = (np.arange(side) + 0.5) / side
    U = np.stack(np.meshgrid(*([axes] * d), indexing="ij"), axis=-1).reshape(-1, d)
    U = U + rng.uniform(-jitter, jitter, size=U.shape) / side
    if U.shape[0] > count:
        keep = rng.permutation(U.shape[0])[:count]
        keep.sort()
        U = U[keep]
    cell = 1.0 / side
    # each point carries its cell volume: unit d-density
    return U, cell**d


def _random_frame(rng, n):
    A = rng.normal(size=(n, n))
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))


def _plane(spec: GeneratorSpec) -> EmpiricalMeasure:
    rng = _rng(spec)
    U, w = _grid_coords(rng, spec.d, spec.count)
    frame = _random_frame(rng, spec.n)
    tangent = frame[:, : spec.d].T
    normal = frame[:, spec.d :].T
    origin = rng.uniform(-0.5, 0.5, size=spec.n)
    P = origin + U @ tangent
    if spec.noise_sigma > 0 and normal.shape[0] > 0:
        P = P + rng.normal(scale=spec.noise_sigma, size=(U.shape[0], normal.shape[0])) @ normal
    return EmpiricalMeasure(P, np.full(P.shape[0], w), spec.d)


def _lipschitz_graph(spec: GeneratorSpec) -> EmpiricalMeasure:
    rng = _rng(spec)
    U, w = _grid_coords(rng, spec.d, spec.count)
    q = spec.n - spec.d
    n_hinges = 6
    heights = np.zeros((U.shape[0], q))
    total_slope = 0.4
    for col in range(q):
        dirs = rng.normal(size=(n_hinges, spec.d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        amps = rng.uniform(-1.0, 1.0, size=n_hinges)
        amps *= total_slope / np.abs(amps).sum()
        offs = rng.uniform(-0.5, 0.5, size=n_hinges)
        for a, v, b in zip(amps, dirs, offs):
            heights[:, col] += a * np.maximum(0.0, U @ v - b)
    P = np.concatenate([U, heights], axis=1)
    P = P + rng.uniform(-0.5, 0.5, size=spec.n)
    if spec.noise_sigma > 0 and q > 0:
        P[:, spec.d :] += rng.normal(scale=spec.noise_sigma, size=(U.shape[0], q))
    return EmpiricalMeasure(P, np.full(P.shape[0], w), spec.d)


def _sphere(spec: GeneratorSpec) -> EmpiricalMeasure:
    rng = _rng(spec)
    G = rng.normal(size=(spec.count, spec.d + 1))
    P = G / np.linalg.norm(G, axis=1, keepdims=True)
    if spec.noise_sigma > 0:
        P = P * (1.0 + rng.normal(scale=spec.noise_sigma, size=(spec.count, 1)))
    area = 2 * math.pi ** ((spec.d + 1) / 2) / math.gamma((spec.d + 1) / 2)
    return EmpiricalMeasure(P, np.full(spec.count, area / spec.count), spec.d)


def _segment(spec: GeneratorSpec) -> EmpiricalMeasure:
    rng = _rng(spec)
    direction = rng.normal(size=spec.n)
    direction /= np.linalg.norm(direction)
    origin = rng.uniform(-0.5, 0.5, size=spec.n)
    ts = np.sort(rng.uniform(0.0, 1.0, size=spec.count))
    P = origin + ts[:, None] * direction
    if spec.noise_sigma > 0:
        P = P + rng.normal(scale=spec.noise_sigma, size=P.shape)
    length = float(ts.max() - ts.min()) if spec.count > 1 else 1.0
    return EmpiricalMeasure(P, np.full(spec.count, length / spec.count), 1)


def _cantor_axis(level: int) -> np.ndarray:
    """Cell centers of the 4-corner Cantor construction at the given level."""
    pts = np.array([[0.0, 0.0]])
    corners = np.array([[0.0, 0.0], [0.75, 0.0], [0.0, 0.75], [0.75, 0.75]])
    for _ in range(level):
        pts = (pts[:, None, :] / 4.0 + corners[None, :, :]).reshape(-1, 2)
    side = 0.25**level
    return pts + side / 2.0


def _cantor_product(spec: GeneratorSpec) -> EmpiricalMeasure:
    axis = _cantor_axis(spec.level)
    P = axis
    for _ in range(spec.d - 1):
        m, q = P.shape
        P = np.concatenate(
            [
                np.repeat(P, axis.shape[0], axis=0),
                np.tile(axis, (m, 1)),
            ],
            axis=1,
        )
    # natural self-similar mass: 4^-level per factor, total mass 1
    w = (0.25**spec.level) ** spec.d * np.ones(P.shape[0])
    return EmpiricalMeasure(P, w, spec.d)


_BUILDERS = {
    "plane": _plane,
    "lipschitz_graph": _lipschitz_graph,
    "sphere": _sphere,
    "segment": _segment,
    "cantor_product": _cantor_product,
}


def generate(spec: GeneratorSpec) -> EmpiricalMeasure:
    """Build the point cloud for a generator spec."""
    return _BUILDERS[spec.family](spec)


def from_descriptor(desc: dict) -> EmpiricalMeasure:
    """Build from a JSON-style descriptor naming the generator and parameters."""
    allowed = {"family", "d", "n", "count", "level", "noise_sigma", "seed"}
    unknown = set(desc) - allowed
    if unknown:
        raise InvalidInputError(f"unknown generator fields: {sorted(unknown)}")
    try:
        spec = GeneratorSpec(**desc)
    except TypeError as exc:
        raise InvalidInputError(str(exc)) from None
    return generate(spec)
