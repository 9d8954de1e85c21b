"""Simplex kernels: contents, polar sines, discrete curvatures, separation.

A simplex is an ordered tuple of vertices, given as an array of shape
(m+1, n). Curvature kernels consume d+2 vertices for intrinsic dimension d.
All kernels return exactly 0 on degenerate input (the zero-denominator
convention), and contents below the rank tolerance snap to 0.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DegenerateInputError, InvalidInputError

CURVATURE_KINDS = ("mt", "min", "max", "vol", "alg", "leger")

# relative rank tolerance for content snapping: M_m <= tol * diam^m -> 0
RANK_REL_TOL = 1e-10


def as_vertices(X) -> np.ndarray:
    """Coerce a Simplex or array-like into a float (m+1, n) vertex array."""
    if isinstance(X, Simplex):
        return X.vertices
    V = np.asarray(X, dtype=np.float64)
    if V.ndim == 1:
        V = V[None, :]
    if V.ndim != 2:
        raise InvalidInputError(f"vertices must be a 2d array, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise InvalidInputError("vertices contain non-finite coordinates")
    return V


@dataclass(frozen=True)
class Simplex:
    """Ordered vertex tuple; d+2 vertices when fed to curvature kernels."""

    vertices: np.ndarray

    def __post_init__(self):
        V = as_vertices(self.vertices)
        object.__setattr__(self, "vertices", V)

    @property
    def ambient_dim(self) -> int:
        return self.vertices.shape[1]

    def __len__(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True)
class CurvatureSpec:
    """Which discrete curvature to evaluate: kind, intrinsic d, exponent."""

    kind: str
    d: int
    power: float = 2.0

    def __post_init__(self):
        if self.kind not in CURVATURE_KINDS:
            raise InvalidInputError(f"unknown curvature kind {self.kind!r}")
        if self.d < 1:
            raise InvalidInputError("intrinsic dimension d must be >= 1")
        if not self.power > 0:
            raise InvalidInputError("power must be positive")


@dataclass(frozen=True)
class AffinePlane:
    """Affine subspace given by a base point and orthonormal direction rows."""

    base: np.ndarray
    basis: np.ndarray  # (k, n), orthonormal rows; k == 0 is a single point

    def __post_init__(self):
        base = np.asarray(self.base, dtype=np.float64)
        basis = np.asarray(self.basis, dtype=np.float64)
        if basis.ndim == 1:
            basis = basis[None, :]
        if basis.size == 0:
            basis = basis.reshape(0, base.shape[0])
        if basis.shape[1] != base.shape[0]:
            raise InvalidInputError("basis and base ambient dimensions differ")
        if basis.shape[0] > base.shape[0]:
            raise InvalidInputError("plane dimension exceeds ambient dimension")
        gram = basis @ basis.T
        if basis.shape[0] and not np.allclose(gram, np.eye(basis.shape[0]), atol=1e-12):
            raise InvalidInputError("basis is not orthonormal within 1e-12")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def project(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        rel = y - self.base
        return self.base + rel @ self.basis.T @ self.basis

    def distance(self, y) -> float:
        y = np.asarray(y, dtype=np.float64)
        if y.shape[-1] != self.base.shape[0]:
            raise InvalidInputError(
                f"point dimension {y.shape[-1]} != plane dimension {self.base.shape[0]}"
            )
        rel = y - self.base
        resid = rel - (rel @ self.basis.T) @ self.basis
        return float(np.linalg.norm(resid))

    def distances(self, Y) -> np.ndarray:
        """Vectorized distance for an array of points (rows)."""
        Y = np.asarray(Y, dtype=np.float64)
        rel = Y - self.base
        resid = rel - (rel @ self.basis.T) @ self.basis
        return np.linalg.norm(resid, axis=-1)


def edge_stats(X):
    """(diam, min_edge): the largest and smallest pairwise vertex distance."""
    V = as_vertices(X)
    if V.shape[0] < 2:
        raise InvalidInputError("edge_stats needs at least 2 vertices")
    diff = V[:, None, :] - V[None, :, :]
    D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu = np.triu_indices(V.shape[0], 1)
    edges = D[iu]
    return float(edges.max()), float(edges.min())


def content(X, base: int = 0, rank_tol: float = None) -> float:
    """Parallelotope content M_m of the m+1 vertices: m-volume times m!.

    Computed as the square root of the Gram determinant of the difference
    vectors from the ``base`` vertex; snaps to 0 below the rank tolerance
    (default RANK_REL_TOL * diam^m).
    """
    V = as_vertices(X)
    m = V.shape[0] - 1
    if m == 0:
        return 1.0
    if m > V.shape[1]:
        raise InvalidInputError(
            f"{m} difference vectors cannot be independent in dimension {V.shape[1]}"
        )
    diffs = np.delete(V, base, axis=0) - V[base]
    gram = diffs @ diffs.T
    det = float(np.linalg.det(gram))
    M = np.sqrt(max(det, 0.0))
    diam, _ = edge_stats(V)
    tol = RANK_REL_TOL * diam**m if rank_tol is None else rank_tol
    return 0.0 if M <= tol else float(M)


def face(X, removals, insertions=None):
    """Remove one or two vertices, optionally substituting replacement points.

    removals: an index or a pair of distinct indices (ascending).
    insertions: optional replacements aligned with removals; None entries
    mean plain removal. Vertex order is preserved.
    """
    V = as_vertices(X)
    if np.isscalar(removals):
        removals = (int(removals),)
    removals = tuple(int(r) for r in removals)
    if len(removals) not in (1, 2):
        raise InvalidInputError("removals must be one or two indices")
    if len(set(removals)) != len(removals):
        raise InvalidInputError("removal indices must be distinct")
    if any(r < 0 or r >= V.shape[0] for r in removals):
        raise InvalidInputError(f"removal index out of range for {V.shape[0]} vertices")
    if insertions is None:
        insertions = (None,) * len(removals)
    elif len(removals) == 1:
        # a bare point for a single removal; also accept a 1-tuple of it
        if len(insertions) != 1 or np.isscalar(insertions[0]):
            insertions = (insertions,)
    if len(insertions) != len(removals):
        raise InvalidInputError("insertions must align with removals")
    repl = dict(zip(removals, insertions))
    rows = []
    for i in range(V.shape[0]):
        if i in repl:
            if repl[i] is not None:
                p = np.asarray(repl[i], dtype=np.float64)
                if p.shape != (V.shape[1],):
                    raise InvalidInputError("replacement point dimension mismatch")
                rows.append(p)
        else:
            rows.append(V[i])
    return Simplex(np.array(rows))


def affine_span(X, rank_tol: float = None) -> AffinePlane:
    """Minimal affine subspace containing the vertices.

    rank_tol is an absolute singular-value cutoff; default
    RANK_REL_TOL * (largest pairwise distance).
    """
    V = as_vertices(X)
    if V.shape[0] == 0:
        raise InvalidInputError("affine_span of an empty vertex set")
    base = V[0]
    if V.shape[0] == 1:
        return AffinePlane(base, np.empty((0, V.shape[1])))
    diffs = V[1:] - base
    diam, _ = edge_stats(V)
    tol = RANK_REL_TOL * diam if rank_tol is None else rank_tol
    _, s, vt = np.linalg.svd(diffs, full_matrices=False)
    rank = int(np.sum(s > tol))
    return AffinePlane(base, vt[:rank])


def dist_to_plane(y, plane: AffinePlane) -> float:
    """Euclidean distance from y to its orthogonal projection on the plane."""
    return plane.distance(y)


def polar_sine(X, i: int) -> float:
    """Polar sine at vertex i: content / product of edges from vertex i.

    Zero when the denominator (or the content) vanishes. Value in [0, 1].
    """
    V = as_vertices(X)
    k = V.shape[0]
    if not 0 <= i < k:
        raise InvalidInputError(f"vertex index {i} out of range")
    M = content(V, base=i)
    if M == 0.0:
        return 0.0
    dists = np.linalg.norm(np.delete(V, i, axis=0) - V[i], axis=1)
    denom = float(np.prod(dists))
    if denom == 0.0:
        return 0.0
    return float(min(M / denom, 1.0))


def elevation_sine(X, i: int) -> float:
    """sin of the elevation angle of x_i - x_0 over span(X with x_i removed)."""
    V = as_vertices(X)
    if i < 1 or i >= V.shape[0]:
        raise InvalidInputError("elevation index must satisfy 1 <= i <= m")
    _, min_edge = edge_stats(V)
    if min_edge == 0.0:
        raise DegenerateInputError("elevation_sine requires min edge > 0")
    L = affine_span(np.delete(V, i, axis=0))
    return float(min(L.distance(V[i]) / np.linalg.norm(V[i] - V[0]), 1.0))


def _psines(V) -> np.ndarray:
    return np.array([polar_sine(V, i) for i in range(V.shape[0])])


def leger_power(X, d: int) -> float:
    """Leger kernel in its integrand form: c_L^{d+1}(X).

    dist(x_0, span(x_1..x_{d+1}))^{d+1} / prod_i |x_i - x_0|^{d+1};
    zero when the face spanned by x_1..x_{d+1} is degenerate or some
    edge from x_0 vanishes.
    """
    V = as_vertices(X)
    if V.shape[0] != d + 2:
        raise InvalidInputError(f"leger kernel needs d+2={d + 2} vertices")
    dists = np.linalg.norm(V[1:] - V[0], axis=1)
    denom = float(np.prod(dists))
    if denom == 0.0:
        return 0.0
    base = content(V[1:])
    if base == 0.0:
        return 0.0
    height = content(V) / base
    return float((height / denom) ** (d + 1))


def curvature(X, spec: CurvatureSpec) -> float:
    """Discrete curvature of a (d+1)-simplex given as d+2 vertices.

    Nonnegative, rigid-motion invariant, zero on degenerate input. The
    ``leger`` kind returns c_L (the (d+1)-th root of the integrand form).
    """
    V = as_vertices(X)
    d = spec.d
    if V.shape[0] != d + 2:
        raise InvalidInputError(f"curvature needs d+2={d + 2} vertices, got {V.shape[0]}")
    diam, min_edge = edge_stats(V)
    if diam == 0.0:
        return 0.0
    if spec.kind == "vol":
        return float(content(V) / diam ** ((d + 1) * (d + 2) / 2.0))
    if spec.kind == "alg":
        if min_edge == 0.0:
            return 0.0
        M = content(V)
        if M == 0.0:
            return 0.0
        diff = V[:, None, :] - V[None, :, :]
        D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        iu = np.triu_indices(V.shape[0], 1)
        return float(M / np.prod(D[iu]))
    if spec.kind == "leger":
        return float(leger_power(V, d) ** (1.0 / (d + 1)))
    ps = _psines(V)
    scale = diam ** (d * (d + 1) / 2.0)
    if spec.kind == "mt":
        return float(np.sqrt(np.mean(ps**2)) / scale)
    if spec.kind == "min":
        return float(ps.min() / scale)
    if spec.kind == "max":
        return float(ps.max() / scale)
    raise InvalidInputError(f"unknown curvature kind {spec.kind!r}")


def separation_ratio(X, n: int) -> float:
    """Smallest n-content over all (n+1)-vertex subsets, scaled by diam^n.

    X is n-separated for omega iff the returned ratio is >= omega.
    """
    V = as_vertices(X)
    if not 1 <= n <= V.shape[0] - 1:
        raise InvalidInputError(f"need 1 <= n <= {V.shape[0] - 1}")
    diam, _ = edge_stats(V)
    if diam == 0.0:
        raise DegenerateInputError("separation_ratio requires diam > 0")
    best = min(content(V[list(c)]) for c in combinations(range(V.shape[0]), n + 1))
    return float(best / diam**n)
