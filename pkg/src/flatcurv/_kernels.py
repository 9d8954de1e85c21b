"""Batch simplex-kernel dispatch.

The hot loops (curvature kernels evaluated over millions of vertex tuples)
are implemented twice: a compiled Cython core and a vectorized numpy
fallback with identical semantics. The compiled core is preferred when it
imported successfully and the FLATCURV_PURE_PYTHON environment variable is
not set.

Kernel values by kind (X has k = d+2 vertices, psin_i = polar sine at
vertex i, M = parallelotope content of the full vertex set):

  MT_SQ      mean_i psin_i^2 / diam^{d(d+1)}
  MT_X0_SQ   psin_0^2 / diam^{d(d+1)}
  MIN_SQ     min_i psin_i^2 / diam^{d(d+1)}
  MAX_SQ     max_i psin_i^2 / diam^{d(d+1)}
  VOL_SQ     M^2 / diam^{(d+1)(d+2)}
  ALG_SQ     (M / prod of all pairwise edges)^2, 0 unless min edge > 0
  LEGER_POW  (dist(x_0, span(x_1..x_{d+1})) / prod_i |x_i-x_0|)^{d+1}
  PSIN0_POW  psin_0^power / diam^{d(d+1)}

All kinds return exactly 0 on degenerate input (zero denominator or
content below the rank tolerance).
"""

import os

from . import _kernels_py

MT_SQ = 0
MT_X0_SQ = 1
MIN_SQ = 2
MAX_SQ = 3
VOL_SQ = 4
ALG_SQ = 5
LEGER_POW = 6
PSIN0_POW = 7

# relative content tolerance: M_m <= RANK_REL_TOL * diam^m snaps to 0
RANK_REL_TOL = 1e-10

if os.environ.get("FLATCURV_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def backend_name() -> str:
    return BACKEND


def batch_kernel(X, kind, d, power=2.0, rel_tol=RANK_REL_TOL):
    """Evaluate one kernel kind on tuples X of shape (N, d+2, n).

    Returns (values, min_edge, diam), each of shape (N,).
    """
    return _impl.batch_kernel(X, kind, d, power, rel_tol)


def batch_kernel_indexed(P, idx, kind, d, power=2.0, rel_tol=RANK_REL_TOL):
    """As batch_kernel on the tuples P[idx] for an (N, d+2) index array."""
    return _impl.batch_kernel_indexed(P, idx, kind, d, power, rel_tol)


def weighted_indices(cum, u):
    """Atom indices for uniforms in [0,1) under cumulative weights cum."""
    return _impl.weighted_indices(cum, u)


def batch_content(X, rel_tol=RANK_REL_TOL):
    """Parallelotope content M_m for tuples X of shape (N, m+1, n)."""
    return _impl.batch_content(X, rel_tol)
