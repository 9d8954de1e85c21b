"""Curvature and multiscale-flatness diagnostics for weighted point clouds.

Computes discrete Menger-type curvatures of simplices, Jones beta numbers,
multiscale flatness functionals and their integrals over empirical measures,
plus the constructive ball-separation and curvature-guided plane selection
procedures built on them.
"""

from ._kernels import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
