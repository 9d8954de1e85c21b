"""Build the optional compiled kernel extension.

The package works without it (a numpy fallback is selected at import time),
so a missing compiler or Cython only costs speed, not functionality.
"""

from setuptools import setup, Extension

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "flatcurv._kernels_cy",
                ["src/flatcurv/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
