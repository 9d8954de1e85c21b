"""Pure-numpy batch kernels (fallback backend).

Vectorized over the tuple axis; semantics documented in _kernels.py.
"""

import numpy as np

_MT_SQ = 0
_MT_X0_SQ = 1
_MIN_SQ = 2
_MAX_SQ = 3
_VOL_SQ = 4
_ALG_SQ = 5
_LEGER_POW = 6
_PSIN0_POW = 7


def _pairwise(X):
    diff = X[:, :, None, :] - X[:, None, :, :]
    return np.sqrt(np.einsum("nijk,nijk->nij", diff, diff))


def _gram_content(X, base, diam, rel_tol):
    """Content of the vertex set of X relative to vertex `base`, snapped."""
    n_tuples, k, _ = X.shape
    m = k - 1
    if m == 0:
        return np.ones(n_tuples)
    sel = [i for i in range(k) if i != base]
    V = X[:, sel, :] - X[:, base : base + 1, :]
    G = V @ V.transpose(0, 2, 1)
    det = np.linalg.det(G)
    M = np.sqrt(np.clip(det, 0.0, None))
    M[M <= rel_tol * diam**m] = 0.0
    return M


def batch_content(X, rel_tol):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[1] <= 1:
        return np.ones(X.shape[0])
    D = _pairwise(X)
    diam = D.max(axis=(1, 2))
    return _gram_content(X, 0, diam, rel_tol)


def batch_kernel_indexed(P, idx, kind, d, power, rel_tol):
    P = np.ascontiguousarray(P, dtype=np.float64)
    idx = np.asarray(idx, dtype=np.intp)
    return batch_kernel(P[idx], kind, d, power, rel_tol)


def weighted_indices(cum, u):
    cum = np.asarray(cum, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    idx = np.searchsorted(cum, u * cum[-1], side="right")
    return np.minimum(idx, cum.shape[0] - 1)


def batch_kernel(X, kind, d, power, rel_tol):
    X = np.ascontiguousarray(X, dtype=np.float64)
    n_tuples, k, _ = X.shape
    if k != d + 2:
        raise ValueError(f"expected {d + 2} vertices per tuple, got {k}")
    iu, ju = np.triu_indices(k, 1)
    D = _pairwise(X)
    edges = D[:, iu, ju]
    min_edge = edges.min(axis=1)
    diam = edges.max(axis=1)
    ok = diam > 0.0

    M = _gram_content(X, 0, diam, rel_tol)
    vals = np.zeros(n_tuples)

    if kind == _VOL_SQ:
        denom = np.where(ok, diam, 1.0) ** ((d + 1) * (d + 2))
        vals = np.where(ok, M * M / denom, 0.0)
        return vals, min_edge, diam

    if kind == _ALG_SQ:
        prod_all = edges.prod(axis=1)
        good = (min_edge > 0.0) & ok
        ratio = np.where(good, M / np.where(good, prod_all, 1.0), 0.0)
        return ratio * ratio, min_edge, diam

    if kind == _LEGER_POW:
        base = _gram_content(X[:, 1:, :], 0, diam, rel_tol)
        prod0 = np.where(D[:, 0, 1:] > 0, D[:, 0, 1:], 1.0).prod(axis=1)
        good = ok & (base > 0.0) & (D[:, 0, 1:] > 0).all(axis=1)
        height = np.where(good, M / np.where(base > 0, base, 1.0), 0.0)
        vals = np.where(good, (height / prod0) ** (d + 1), 0.0)
        return vals, min_edge, diam

    # polar-sine based kinds
    Dp = D.copy()
    idx = np.arange(k)
    Dp[:, idx, idx] = 1.0
    prods = Dp.prod(axis=2)
    psin = np.where(prods > 0.0, M[:, None] / np.where(prods > 0, prods, 1.0), 0.0)
    np.clip(psin, 0.0, 1.0, out=psin)
    denom = np.where(ok, diam, 1.0) ** (d * (d + 1))

    if kind == _MT_SQ:
        vals = np.where(ok, (psin * psin).sum(axis=1) / (k * denom), 0.0)
    elif kind == _MT_X0_SQ:
        vals = np.where(ok, psin[:, 0] ** 2 / denom, 0.0)
    elif kind == _MIN_SQ:
        vals = np.where(ok, (psin * psin).min(axis=1) / denom, 0.0)
    elif kind == _MAX_SQ:
        vals = np.where(ok, (psin * psin).max(axis=1) / denom, 0.0)
    elif kind == _PSIN0_POW:
        vals = np.where(ok, psin[:, 0] ** power / denom, 0.0)
    else:
        raise ValueError(f"unknown kernel kind {kind}")
    return vals, min_edge, diam
