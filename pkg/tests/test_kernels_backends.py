"""Compiled kernels and the numpy fallback must agree, and both must match
the scalar reference kernels."""

import numpy as np
import pytest
from util import random_simplex

from flatcurv import _kernels, _kernels_py
from flatcurv.simplex import CurvatureSpec, content, curvature, leger_power, polar_sine

KINDS = {
    _kernels.MT_SQ: lambda V, d: curvature(V, CurvatureSpec("mt", d=d)) ** 2,
    _kernels.MIN_SQ: lambda V, d: curvature(V, CurvatureSpec("min", d=d)) ** 2,
    _kernels.MAX_SQ: lambda V, d: curvature(V, CurvatureSpec("max", d=d)) ** 2,
    _kernels.VOL_SQ: lambda V, d: curvature(V, CurvatureSpec("vol", d=d)) ** 2,
    _kernels.ALG_SQ: lambda V, d: curvature(V, CurvatureSpec("alg", d=d)) ** 2,
    _kernels.LEGER_POW: lambda V, d: leger_power(V, d),
}


def _batch(rng, d, n, count):
    return np.array([random_simplex(rng, d, n) for _ in range(count)])


@pytest.mark.parametrize("d,n", [(1, 2), (1, 4), (2, 3), (2, 6), (3, 5)])
def test_backends_agree(d, n):
    rng = np.random.default_rng(100 + d + 10 * n)
    X = rng.normal(size=(500, d + 2, n))
    for kind in range(8):
        vc, mc, dc = _kernels.batch_kernel(X, kind, d, 3.0, 1e-10)
        vp, mp, dp = _kernels_py.batch_kernel(X, kind, d, 3.0, 1e-10)
        scale = np.abs(vp).max()
        assert np.allclose(vc, vp, rtol=1e-9, atol=1e-12 * scale)
        assert np.array_equal(mc, mp) or np.allclose(mc, mp, rtol=1e-13)
        assert np.allclose(dc, dp, rtol=1e-13)
    assert np.allclose(
        _kernels.batch_content(X, 1e-10), _kernels_py.batch_content(X, 1e-10), rtol=1e-9
    )


@pytest.mark.parametrize("d,n", [(1, 3), (2, 4)])
def test_batch_matches_scalar(d, n):
    rng = np.random.default_rng(200 + d)
    X = _batch(rng, d, n, 40)
    for kind, oracle in KINDS.items():
        vals, _, _ = _kernels.batch_kernel(X, kind, d, 2.0, 1e-10)
        expect = [oracle(V, d) for V in X]
        assert np.allclose(vals, expect, rtol=1e-9)
    # x0 form and psin powers
    vals, _, _ = _kernels.batch_kernel(X, _kernels.MT_X0_SQ, d, 2.0, 1e-10)
    diam = np.array([np.max(np.linalg.norm(V[:, None] - V[None, :], axis=-1)) for V in X])
    expect = [polar_sine(V, 0) ** 2 / dm ** (d * (d + 1)) for V, dm in zip(X, diam)]
    assert np.allclose(vals, expect, rtol=1e-9)
    for p in (1.0, 2.0, 3.5):
        vals, _, _ = _kernels.batch_kernel(X, _kernels.PSIN0_POW, d, p, 1e-10)
        expect = [polar_sine(V, 0) ** p / dm ** (d * (d + 1)) for V, dm in zip(X, diam)]
        assert np.allclose(vals, expect, rtol=1e-9)
    cont = _kernels.batch_content(X, 1e-10)
    assert np.allclose(cont, [content(V) for V in X], rtol=1e-9)


def test_degenerate_tuples_are_zero():
    rng = np.random.default_rng(5)
    X = rng.normal(size=(30, 4, 3))
    X[:, 3] = X[:, 1]  # repeated vertex
    for kind in range(8):
        vals, mins, _ = _kernels.batch_kernel(X, kind, 2, 2.0, 1e-10)
        assert np.all(vals == 0.0)
        assert np.all(mins == 0.0)
    X = np.zeros((5, 3, 2))  # all points coincide: diam == 0
    for kind in range(8):
        vals, _, diams = _kernels.batch_kernel(X, kind, 1, 2.0, 1e-10)
        assert np.all(vals == 0.0) and np.all(diams == 0.0)


def test_psin_power_p2_equals_x0_form():
    rng = np.random.default_rng(6)
    X = rng.normal(size=(200, 3, 2))
    a, _, _ = _kernels.batch_kernel(X, _kernels.PSIN0_POW, 1, 2.0, 1e-10)
    b, _, _ = _kernels.batch_kernel(X, _kernels.MT_X0_SQ, 1, 2.0, 1e-10)
    assert np.allclose(a, b, rtol=1e-14)
