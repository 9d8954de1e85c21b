"""Shared helpers for the test suite."""

import numpy as np

from flatcurv.simplex import polar_sine


def random_simplex(rng, d, n, k=None, min_psin=1e-3, min_edge_ratio=0.05):
    """Random well-conditioned vertex tuple (k points in R^n), rejection sampled."""
    k = d + 2 if k is None else k
    while True:
        V = rng.normal(size=(k, n))
        diff = V[:, None, :] - V[None, :, :]
        D = np.sqrt((diff**2).sum(-1))
        iu = np.triu_indices(k, 1)
        edges = D[iu]
        if edges.min() < min_edge_ratio * edges.max():
            continue
        if min(polar_sine(V, i) for i in range(k)) < min_psin:
            continue
        return V


def random_rotation(rng, n):
    """Haar-ish random rotation matrix via QR with sign fix."""
    A = rng.normal(size=(n, n))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def apply_rigid(V, Q, shift):
    return V @ Q.T + shift


def sin_angle_kahan(u, v):
    """|sin| of the angle between u and v, numerically stable at all angles."""
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    a = np.linalg.norm(u * nv - v * nu)
    b = np.linalg.norm(u * nv + v * nu)
    theta = 2.0 * np.arctan2(a, b)
    return abs(np.sin(theta))
